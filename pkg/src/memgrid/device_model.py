"""Vacancy-transport device model.

Positions are normalized by the device length, ``n = x / d`` in ``[0, 1]``.
The vacancy concentration is the logistic travelling profile

    u(n, t) = 1 / (1 + a * exp(-f0 * theta * (n - n_b(t))))

where ``n_b(t)`` is the accumulation boundary and ``theta`` the local wave
velocity, held constant over an evaluation window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import kernels
from .errors import DomainError, InvalidGridError, OutOfRangeError, PreconditionError


@dataclass(frozen=True)
class DeviceParams:
    """Phenomenological constants of the vacancy model.

    The defaults keep ``p < 1`` and ``0 < alpha < 1``: both logarithm
    arguments of the impedance closed forms are then negative reals, so the
    reactive parts cancel exactly and the composite resistance stays positive
    under a one-decade scaling of any parameter.
    """

    a: float = 1.0
    f0: float = 10.0
    p: float = -10.0
    alpha: float = 0.09
    d: float = 1e-8
    rho1: float = 100.0
    rho2: float = 1e4
    eps_geom: float = 1e-12
    area: float = 1e-14

    def __post_init__(self):
        for name in ("a", "f0", "p", "alpha", "d", "rho1", "rho2", "eps_geom", "area"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite number, got {value!r}")
        if self.a <= 0:
            raise DomainError("a must be > 0")
        if self.p == 1:
            raise PreconditionError("p must differ from 1")
        if self.f0 == 0:
            raise PreconditionError("f0 must be nonzero")
        for name in ("rho1", "rho2", "eps_geom", "d", "area"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be > 0")

    def replace(self, **changes) -> "DeviceParams":
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update(changes)
        return DeviceParams(**values)


@dataclass(frozen=True)
class BoundaryTrajectory:
    """Sampled boundary position ``n_b(t)`` and its rate of change.

    ``n_b_dot`` defaults to second-order central differences of ``n_b``.
    Between samples, ``n_b`` and ``n_b_dot`` are linearly interpolated.
    """

    times: np.ndarray
    n_b: np.ndarray
    n_b_dot: np.ndarray = field(default=None)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        n_b = np.asarray(self.n_b, dtype=float)
        if times.ndim != 1 or times.shape != n_b.shape or times.size < 2:
            raise InvalidGridError("times and n_b must be 1-D arrays of equal length >= 2")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(n_b))):
            raise DomainError("trajectory samples must be finite")
        if np.any(np.diff(times) <= 0):
            raise InvalidGridError("times must be strictly increasing")
        if np.any(n_b < 0) or np.any(n_b > 1):
            raise DomainError("n_b samples must lie in [0, 1]")
        if self.n_b_dot is None:
            n_b_dot = np.gradient(n_b, times)
        else:
            n_b_dot = np.asarray(self.n_b_dot, dtype=float)
            if n_b_dot.shape != times.shape:
                raise InvalidGridError("n_b_dot must match times in length")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "n_b", n_b)
        object.__setattr__(self, "n_b_dot", n_b_dot)

    @classmethod
    def linear(cls, n_b0, velocity, t_end, samples=2, t_start=0.0):
        """Constant-velocity trajectory ``n_b(t) = n_b0 + velocity * (t - t_start)``."""
        times = np.linspace(t_start, t_end, samples)
        n_b = n_b0 + velocity * (times - t_start)
        return cls(times, n_b, np.full(samples, float(velocity)))

    @property
    def span(self):
        return float(self.times[0]), float(self.times[-1])

    def _check_span(self, t):
        t = np.asarray(t, dtype=float)
        if not np.all(np.isfinite(t)):
            raise DomainError("time must be finite")
        lo, hi = self.span
        if np.any(t < lo) or np.any(t > hi):
            raise OutOfRangeError(f"t outside trajectory span [{lo}, {hi}]")
        return t

    def position(self, t):
        t = self._check_span(t)
        return np.interp(t, self.times, self.n_b)

    def velocity(self, t):
        t = self._check_span(t)
        return np.interp(t, self.times, self.n_b_dot)


def _finite(*values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise DomainError("non-finite argument")


def eval_profile(n, t, boundary: BoundaryTrajectory, theta, params: DeviceParams):
    """Vacancy concentration at normalized position ``n`` and time ``t``.

    Broadcasts over array ``n`` and ``t``. The result lies in (0, 1); in
    double precision it saturates to exactly 0 or 1 once the exponent
    exceeds roughly 36 in magnitude.
    """
    _finite(n, theta)
    n = np.asarray(n, dtype=float)
    if np.any(n < 0) or np.any(n > 1):
        raise DomainError("n must lie in [0, 1]")
    n_b = boundary.position(t)
    z = params.f0 * theta * (n - n_b) - math.log(params.a)
    u = expit(z)
    return float(u) if np.ndim(u) == 0 else u


def profile_derivatives(n, t, boundary: BoundaryTrajectory, theta, params: DeviceParams):
    """Analytic ``(u_t, u_n)`` of the logistic profile.

    ``u_n = f0*theta*u*(1-u)`` and, because the profile depends on time only
    through ``n - n_b(t)``, ``u_t = -n_b'(t) * u_n``.
    """
    u = eval_profile(n, t, boundary, theta, params)
    u_n = params.f0 * theta * u * (1.0 - u)
    u_t = -boundary.velocity(t) * u_n
    return u_t, u_n


def vca_residual(grid_n, grid_t, boundary: BoundaryTrajectory, theta, params: DeviceParams):
    """Max |u_t + theta*u_n| over interior grid points, by central differences."""
    grid_n = np.asarray(grid_n, dtype=float)
    grid_t = np.asarray(grid_t, dtype=float)
    if grid_n.ndim != 1 or grid_t.ndim != 1 or grid_n.size < 3 or grid_t.size < 3:
        raise InvalidGridError("each grid axis needs at least 3 points")
    if np.any(np.diff(grid_n) <= 0) or np.any(np.diff(grid_t) <= 0):
        raise InvalidGridError("grid axes must be strictly increasing")
    _finite(theta)
    tt, nn = np.meshgrid(grid_t, grid_n, indexing="ij")
    u = eval_profile(nn, tt, boundary, theta, params)
    u_t, u_n = np.gradient(u, grid_t, grid_n)
    residual = u_t[1:-1, 1:-1] + theta * u_n[1:-1, 1:-1]
    return float(np.max(np.abs(residual)))


def local_wave_velocity(boundary: BoundaryTrajectory, t):
    """Local wave velocity at the boundary, ``theta = -n_b'(t)``."""
    v = boundary.velocity(t)
    return -float(v) if np.ndim(v) == 0 else -v


def wave_velocity_check(boundary: BoundaryTrajectory, t, params: DeviceParams, theta=None):
    """Evaluate both sides of the boundary velocity identity at ``n = n_b(t)``.

    Returns ``(ratio, expected)`` with ``ratio = -u_t/u_n`` from the analytic
    derivatives of the profile and ``expected = -n_b'(t)``. ``theta`` defaults
    to :func:`local_wave_velocity`; it must be nonzero so that ``u_n != 0``.
    """
    if theta is None:
        theta = local_wave_velocity(boundary, t)
    if theta == 0:
        raise DomainError("theta = 0 gives a flat profile; -u_t/u_n is undefined")
    n_b = float(boundary.position(t))
    u_t, u_n = profile_derivatives(n_b, t, boundary, theta, params)
    return float(-u_t / u_n), float(-boundary.velocity(t))


@dataclass(frozen=True)
class Window:
    """Smooth boundary-speed limiter.

    ``w(n) = [4n(1-n)]**s * (1 - g*exp(-((n - n_e)/sigma)**2))``: zero at both
    device ends, flat in the interior, with a dip at the entry position.
    """

    s: float = 1.0
    g: float = 0.5
    n_e: float = 0.15
    sigma: float = 0.05

    def __post_init__(self):
        _finite(self.s, self.g, self.n_e, self.sigma)
        if self.s <= 0 or self.sigma <= 0:
            raise DomainError("window exponent s and width sigma must be > 0")
        if not 0 <= self.g < 1:
            raise DomainError("dip depth g must lie in [0, 1)")

    def __call__(self, n):
        if np.ndim(n) == 0:
            return kernels.window(float(n), self.s, self.g, self.n_e, self.sigma)
        n = np.asarray(n, dtype=float)
        inner = (n > 0) & (n < 1)
        out = np.zeros_like(n)
        m = n[inner]
        out[inner] = (4 * m * (1 - m)) ** self.s * (1 - self.g * np.exp(-(((m - self.n_e) / self.sigma) ** 2)))
        return out

    def knobs(self):
        return self.s, self.g, self.n_e, self.sigma


@dataclass(frozen=True)
class BoundaryState:
    n_b: float
    t: float = 0.0


def advance_boundary(state: BoundaryState, drive_current, dt, mobility, window: Window = Window()):
    """One explicit step of ``dn_b/dt = mobility * i * w(n_b)``, clamped to [0, 1]."""
    if not (math.isfinite(drive_current) and math.isfinite(mobility)):
        raise DomainError("current and mobility must be finite")
    if not dt > 0:
        raise PreconditionError("dt must be > 0")
    if not 0 <= state.n_b <= 1:
        raise DomainError("n_b must lie in [0, 1]")
    n = state.n_b + mobility * drive_current * window(state.n_b) * dt
    return BoundaryState(min(1.0, max(0.0, n)), state.t + dt)


def boundary_velocity_trace(current, mobility, dt, steps, n_b0=0.01, window: Window = Window()):
    """Integrate the boundary under a constant current.

    Returns a :class:`BoundaryTrajectory` whose ``n_b_dot`` holds the
    realized per-step velocity ``(n_b[k+1] - n_b[k]) / dt`` (the last sample
    repeats the final step).
    """
    if not dt > 0 or steps < 1:
        raise PreconditionError("need dt > 0 and at least one step")
    if not (math.isfinite(current) and math.isfinite(mobility)):
        raise DomainError("current and mobility must be finite")
    currents = np.full(steps, float(current))
    n_b = kernels.walk_boundary(currents, dt, float(n_b0), float(mobility), *window.knobs())
    velocity = np.diff(n_b) / dt
    velocity = np.append(velocity, velocity[-1])
    times = np.arange(steps + 1) * dt
    return BoundaryTrajectory(times, n_b, velocity)
