"""Fixed-step time-domain driver and hysteresis audits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import kernels
from .device_model import DeviceParams, Window
from .errors import IntegrityError, PreconditionError
from .impedance import FLUX_LIMIT_EPS, decompose_arrays, flux_to_boundary

MIN_STEPS_PER_PERIOD = 200
COUPLINGS = ("flux_driven", "current_driven")
WAVEFORMS = ("sine", "triangle")
TRACE_COLUMNS = ("t", "v", "i", "phi", "n_b", "R", "z1_re", "z1_im", "z2_re", "z2_im", "p1", "p2")


@dataclass(frozen=True)
class DriveSignal:
    waveform: str = "sine"
    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if self.waveform not in WAVEFORMS:
            raise PreconditionError(f"waveform must be one of {WAVEFORMS}")
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise PreconditionError("amplitude must be finite and >= 0")
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise PreconditionError("frequency must be finite and > 0")
        if not math.isfinite(self.phase):
            raise PreconditionError("phase must be finite")

    @property
    def period(self):
        return 1.0 / self.frequency

    def __call__(self, t):
        arg = 2.0 * np.pi * self.frequency * np.asarray(t, dtype=float) + self.phase
        if self.waveform == "sine":
            return self.amplitude * np.sin(arg)
        return self.amplitude * (2.0 / np.pi) * np.arcsin(np.sin(arg))


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    cycles: int = 3
    coupling: str = "flux_driven"
    mobility: float = 2e4
    window: Window = field(default_factory=Window)
    kappa: float = 20.0
    phi0: float = 0.15
    n_b0: float = 0.1
    phi_init: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise PreconditionError("dt must be > 0")
        if int(self.cycles) != self.cycles or self.cycles < 1:
            raise PreconditionError("cycles must be a positive integer")
        if self.coupling not in COUPLINGS:
            raise PreconditionError(f"coupling must be one of {COUPLINGS}")
        for name in ("mobility", "kappa", "phi0", "n_b0", "phi_init"):
            if not math.isfinite(getattr(self, name)):
                raise PreconditionError(f"{name} must be finite")
        if not 0 <= self.n_b0 <= 1:
            raise PreconditionError("n_b0 must lie in [0, 1]")


@dataclass(frozen=True)
class Trace:
    """Per-step simulation record; ``z1``/``z2`` are complex arrays."""

    t: np.ndarray
    v: np.ndarray
    i: np.ndarray
    phi: np.ndarray
    n_b: np.ndarray
    R: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    dt: float
    frequency: float
    amplitude: float
    coupling: str = "flux_driven"
    anomalies: int = 0

    def __len__(self):
        return len(self.t)

    def columns(self):
        return {
            "t": self.t,
            "v": self.v,
            "i": self.i,
            "phi": self.phi,
            "n_b": self.n_b,
            "R": self.R,
            "z1_re": self.z1.real,
            "z1_im": self.z1.imag,
            "z2_re": self.z2.real,
            "z2_im": self.z2.imag,
            "p1": self.p1,
            "p2": self.p2,
        }

    def steps_per_cycle(self):
        """Samples per drive period; raises unless the period is a whole number of steps
        and the trace holds a whole number of periods."""
        spp = 1.0 / (self.frequency * self.dt)
        steps = int(round(spp))
        if steps < 1 or abs(spp - steps) > 1e-6 * spp:
            raise PreconditionError("drive period is not an integer number of steps")
        if (len(self.t) - 1) % steps:
            raise PreconditionError("trace does not span an integer number of cycles")
        return steps

    @property
    def cycles(self):
        return (len(self.t) - 1) // self.steps_per_cycle()

    def boundary_velocity(self):
        return np.gradient(self.n_b, self.t)


def integrate_flux(v, dt, phi_init=0.0):
    """Cumulative trapezoidal flux ``phi = phi_init + int v dt`` on a uniform grid."""
    return phi_init + cumulative_trapezoid(np.asarray(v, dtype=float), dx=dt, initial=0.0)


def run(drive: DriveSignal, device: DeviceParams, cfg: SimConfig) -> Trace:
    spp = drive.period / cfg.dt
    if spp < MIN_STEPS_PER_PERIOD * (1 - 1e-12):
        raise PreconditionError(
            f"dt resolves only {spp:.1f} steps per period (need {MIN_STEPS_PER_PERIOD})"
        )
    steps = int(round(cfg.cycles * spp))
    t = np.arange(steps + 1) * cfg.dt
    v = drive(t)
    phi = integrate_flux(v, cfg.dt, cfg.phi_init)
    anomalies = 0

    if cfg.coupling == "flux_driven":
        n_b = flux_to_boundary(phi, cfg.kappa, cfg.phi0)
        z1, z2, status = decompose_arrays(phi, n_b, device, limit_eps=FLUX_LIMIT_EPS)
        bad = np.flatnonzero(status & kernels.SINGULAR)
        if bad.size:
            raise IntegrityError(f"singular logarithm argument at t = {t[bad[0]]:.6g} s")
        anomalies = int(np.count_nonzero(status & kernels.ANOMALY))
        R = z1.real + z2.real
    else:
        n_b, _ = kernels.current_driven_loop(
            v, cfg.dt, cfg.n_b0, cfg.mobility, device.rho1, device.rho2, *cfg.window.knobs()
        )
        r1 = device.rho1 * n_b
        r2 = device.rho2 * (1.0 - n_b)
        R = device.rho1 * n_b + device.rho2 * (1.0 - n_b)
        z1 = r1 + 0j
        z2 = r2 + 0j

    nonpositive = np.flatnonzero(~(R > 0))
    if nonpositive.size:
        k = nonpositive[0]
        raise IntegrityError(
            f"composite resistance {R[k]!r} <= 0 at t = {t[k]:.6g} s (positivity violated)"
        )
    i = v / R
    return Trace(
        t=t,
        v=v,
        i=i,
        phi=phi,
        n_b=n_b,
        R=R,
        z1=z1,
        z2=z2,
        p1=i * i * z1.real,
        p2=i * i * z2.real,
        dt=cfg.dt,
        frequency=drive.frequency,
        amplitude=drive.amplitude,
        coupling=cfg.coupling,
        anomalies=anomalies,
    )


@dataclass(frozen=True)
class PinchReport:
    pinched: bool
    max_current_at_zero_voltage: float
    crossings: int


def _zero_voltage_current(v, i, k):
    """Current at the v = 0 crossing between samples k and k+1.

    Cubic interpolation in v through up to four neighbouring samples; near a
    crossing the loop is close to odd in v, so this is accurate to O(v^5).
    """
    lo = max(0, k - 1)
    hi = min(len(v), k + 3)
    vs, cs = v[lo:hi], i[lo:hi]
    if np.unique(vs).size < len(vs):
        s = v[k] / (v[k] - v[k + 1])
        return i[k] + s * (i[k + 1] - i[k])
    total = 0.0
    for a in range(len(vs)):
        weight = 1.0
        for b in range(len(vs)):
            if a != b:
                weight *= (0.0 - vs[b]) / (vs[a] - vs[b])
        total += weight * cs[a]
    return total


def detect_pinch(trace: Trace, tol_abs=None, v_tol=None) -> PinchReport:
    v, i = trace.v, trace.i
    i_max = float(np.max(np.abs(i))) if len(i) else 0.0
    if tol_abs is None:
        tol_abs = 1e-12 + 1e-9 * i_max
    if v_tol is None:
        v_tol = 1e-9 * float(np.max(np.abs(v)))
    at_zero = np.abs(v) <= v_tol
    currents = list(np.abs(i[at_zero]))
    sign_change = np.flatnonzero((v[:-1] * v[1:] < 0) & ~at_zero[:-1] & ~at_zero[1:])
    for k in sign_change:
        currents.append(abs(_zero_voltage_current(v, i, k)))
    worst = max(currents) if currents else 0.0
    return PinchReport(bool(worst <= tol_abs), float(worst), len(currents))


def _folded_shoelace(v, i):
    """Closed-curve integral of i d|v| with v = 0 crossings inserted."""
    x = [abs(v[0])]
    y = [i[0]]
    for k in range(1, len(v)):
        if v[k - 1] * v[k] < 0:
            s = v[k - 1] / (v[k - 1] - v[k])
            x.append(0.0)
            y.append(i[k - 1] + s * (i[k] - i[k - 1]))
        x.append(abs(v[k]))
        y.append(i[k])
    x = np.asarray(x)
    y = np.asarray(y)
    ccw = 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    return -ccw


def loop_area(trace: Trace):
    """Per-cycle hysteresis area, ``closed-integral i d|v|``, in watts.

    Folding the voltage axis makes the two counter-rotating lobes of a pinched
    loop add instead of cancel. The sign follows the traversal direction, so a
    reversed trace gives the negated areas; a single-valued (resistive) curve
    gives zero.
    """
    steps = trace.steps_per_cycle()
    areas = []
    for c in range(trace.cycles):
        sl = slice(c * steps, (c + 1) * steps + 1)
        areas.append(float(_folded_shoelace(trace.v[sl], trace.i[sl])))
    return areas


@dataclass(frozen=True)
class NDRReport:
    negative_component_steps: np.ndarray
    intervals: list

    @property
    def empty(self):
        return self.negative_component_steps.size == 0 and not self.intervals


def detect_ndr(trace: Trace) -> NDRReport:
    """Negative-component steps and terminal dV/dI < 0 intervals ``(t_start, t_end)``."""
    neg = np.flatnonzero(np.minimum(trace.z1.real, trace.z2.real) < 0)
    dv = np.diff(trace.v)
    di = np.diff(trace.i)
    v_floor = 1e-12 * float(np.max(np.abs(trace.v), initial=0.0))
    i_floor = 1e-12 * float(np.max(np.abs(trace.i), initial=0.0))
    ndr = (dv * di < 0) & (np.abs(dv) > v_floor) & (np.abs(di) > i_floor)
    intervals = []
    k = 0
    while k < len(ndr):
        if ndr[k]:
            start = k
            while k + 1 < len(ndr) and ndr[k + 1]:
                k += 1
            intervals.append((float(trace.t[start]), float(trace.t[k + 1])))
        k += 1
    return NDRReport(neg, intervals)


@dataclass(frozen=True)
class EnergyAudit:
    E1: float
    E2: float
    E_total: float
    active_component: bool
    per_cycle: list


def energy_audit(trace: Trace) -> EnergyAudit:
    p1 = trace.p1[:-1]
    p2 = trace.p2[:-1]
    e1 = float(np.sum(p1) * trace.dt)
    e2 = float(np.sum(p2) * trace.dt)
    per_cycle = []
    try:
        steps = trace.steps_per_cycle()
    except PreconditionError:
        steps = None
    if steps:
        for c in range(trace.cycles):
            sl = slice(c * steps, (c + 1) * steps)
            c1 = float(np.sum(trace.p1[sl]) * trace.dt)
            c2 = float(np.sum(trace.p2[sl]) * trace.dt)
            per_cycle.append((c1, c2, c1 + c2))
    active = e1 < 0 or e2 < 0 or bool(np.any(p1 < 0)) or bool(np.any(p2 < 0))
    return EnergyAudit(e1, e2, e1 + e2, active, per_cycle)


def ideal_memristor_current(t, v_const, phi0):
    """Current of the ideal flux-controlled memristor under constant voltage,
    ``i(t) = 3 v (phi0 + v t)**2``; exact for Fraction or int arguments."""
    return 3 * v_const * (phi0 + v_const * t) ** 2
