"""Closed-form impedance decomposition of the vacancy-transport memristor.

The composite resistance is the sum of two complex impedances

    Z1(phi) = -p Ln((alpha-1) e^{f0 (n_b-1) phi} + (p-1) alpha) / (f0 (p-1) phi) - 1/(2(p-1))
    Z2(phi) = +p Ln((alpha-1) e^{f0 n_b phi}     + (p-1) alpha) / (f0 (p-1) phi) - 1/(2(p-1))

with ``Ln`` the principal complex logarithm. When a logarithm argument is
a negative real the impedance picks up a reactive part of magnitude
``p*pi / (f0 |p-1| |phi|)``; the two reactive parts cancel whenever both
arguments share their sign. Points where the signs differ are flagged as
branch anomalies instead of being forced onto another branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import kernels
from .device_model import DeviceParams
from .errors import DomainError, PreconditionError, SingularBranchError

# Below this |f0*phi| the direct formula loses more digits to the 1/phi pole
# than the first-order series loses to truncation.
FLUX_LIMIT_EPS = 1e-8

CANCELLATION_RTOL = 1e-9
LIMIT_RTOL = 1e-4


@dataclass(frozen=True)
class ComplexOhms:
    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise DomainError(f"non-finite impedance ({self.re}, {self.im})")

    def __add__(self, other):
        return ComplexOhms(self.re + other.re, self.im + other.im)

    def __complex__(self):
        return complex(self.re, self.im)


@dataclass(frozen=True)
class FluxState:
    phi: float
    n_b_of_phi: float

    def __post_init__(self):
        if not (math.isfinite(self.phi) and math.isfinite(self.n_b_of_phi)):
            raise DomainError("flux state must be finite")
        if not 0 <= self.n_b_of_phi <= 1:
            raise DomainError("n_b must lie in [0, 1]")


@dataclass(frozen=True)
class Decomposition:
    """A Z1/Z2 pair and their sum.

    ``composite`` is always the componentwise sum ``z1 + z2``.
    ``constant_resistance`` marks the alpha = 1 case, where the closed forms
    lose their flux dependence.
    """

    z1: ComplexOhms
    z2: ComplexOhms
    branch_anomaly: bool = False
    at_flux_limit: bool = False
    constant_resistance: bool = False

    @property
    def composite(self) -> ComplexOhms:
        return self.z1 + self.z2

    @property
    def negative_components(self):
        """Indices (1, 2) of the components whose real part is negative."""
        return tuple(k for k, z in ((1, self.z1), (2, self.z2)) if z.re < 0)

    @property
    def dominance_holds(self) -> bool:
        """True unless the real parts have opposite sign and the negative one wins."""
        r1, r2 = self.z1.re, self.z2.re
        if r1 * r2 >= 0:
            return True
        return max(r1, r2) > abs(min(r1, r2))

    @property
    def cancellation_error(self) -> float:
        return abs(self.z1.im + self.z2.im) / max(1.0, abs(self.z1.im))


def _check_params(params: DeviceParams):
    if params.p == 1 or params.f0 == 0:
        raise PreconditionError("closed forms need p != 1 and f0 != 0")


def decompose_arrays(phi, n_b, params: DeviceParams, limit_eps=0.0):
    """Vectorised Z1/Z2 evaluation.

    Returns ``(z1, z2, status)`` where ``z1``/``z2`` are complex arrays and
    ``status`` is a ``uint8`` bit field (``kernels.ANOMALY``,
    ``kernels.SINGULAR``, ``kernels.AT_LIMIT``). Points with ``phi == 0`` or
    ``|f0*phi| < limit_eps`` take the analytic small-flux limit.
    """
    _check_params(params)
    phi, n_b = np.broadcast_arrays(np.asarray(phi, dtype=float), np.asarray(n_b, dtype=float))
    shape = phi.shape
    z1re, z1im, z2re, z2im, status = kernels.impedance_arrays(
        phi.ravel(), n_b.ravel(), params.f0, params.p, params.alpha, limit_eps
    )
    z1 = (z1re + 1j * z1im).reshape(shape)
    z2 = (z2re + 1j * z2im).reshape(shape)
    return z1, z2, status.reshape(shape)


def _pair(state: FluxState, params: DeviceParams):
    _check_params(params)
    if state.phi == 0:
        raise PreconditionError("phi = 0 is a removable singularity; use small_flux_limit")
    z1, z2, status = decompose_arrays([state.phi], [state.n_b_of_phi], params)
    if status[0] & kernels.SINGULAR:
        raise SingularBranchError("logarithm argument is exactly zero")
    return z1[0], z2[0], bool(status[0] & kernels.ANOMALY)


def z1(state: FluxState, params: DeviceParams) -> ComplexOhms:
    z, _, _ = _pair(state, params)
    return ComplexOhms(z.real, z.imag)


def z2(state: FluxState, params: DeviceParams) -> ComplexOhms:
    _, z, _ = _pair(state, params)
    return ComplexOhms(z.real, z.imag)


def decompose(state: FluxState, params: DeviceParams) -> Decomposition:
    a, b, anomaly = _pair(state, params)
    return Decomposition(
        ComplexOhms(a.real, a.imag),
        ComplexOhms(b.real, b.imag),
        branch_anomaly=anomaly,
        constant_resistance=params.alpha == 1,
    )


def small_flux_limit(n_b, params: DeviceParams) -> Decomposition:
    """The phi -> 0 limit of the decomposition.

    Each component carries a ``-/+ p Ln(p*alpha - 1) / (f0 (p-1) phi)`` pole
    that cancels in the sum; the returned components are the finite parts
    that remain, from a first-order expansion of the logarithm arguments.
    Their sum is the exact limit ``-1 / (p*alpha - 1)``.
    """
    _check_params(params)
    if not 0 <= n_b <= 1:
        raise DomainError("n_b must lie in [0, 1]")
    if params.p * params.alpha == 1:
        raise SingularBranchError("p*alpha = 1 puts the logarithm argument at zero")
    z1v, z2v, _ = decompose_arrays([0.0], [n_b], params)
    return Decomposition(
        ComplexOhms(z1v[0].real, 0.0),
        ComplexOhms(z2v[0].real, 0.0),
        at_flux_limit=True,
        constant_resistance=params.alpha == 1,
    )


def flux_to_boundary(phi, kappa=20.0, phi0=0.15):
    """Monotone saturating closure ``n_b(phi) = 1 / (1 + exp(-kappa (phi - phi0)))``."""
    out = expit(kappa * (np.asarray(phi, dtype=float) - phi0))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class StaticPartition:
    """Series resistances and capacitive reactance magnitudes.

    Reactances are capacitive: the complex impedance of each is ``-1j * x_c``.
    """

    resistances: tuple
    reactances: tuple
    orientation: str = "-j"

    @property
    def total_resistance(self):
        return self.resistances[0] + self.resistances[1]

    def complex_reactances(self):
        return tuple(-1j * x for x in self.reactances)


def static_partition(n_b, omega, params: DeviceParams) -> StaticPartition:
    if not 0 <= n_b <= 1:
        raise DomainError("n_b must lie in [0, 1]")
    if not omega > 0:
        raise PreconditionError("omega must be > 0")
    r1 = params.rho1 * n_b
    r2 = params.rho2 * (1.0 - n_b)
    x1 = n_b / (omega * params.eps_geom)
    x2 = (1.0 - n_b) / (omega * params.eps_geom)
    return StaticPartition((r1, r2), (x1, x2))


def dynamic_reactance_pair(n_b_dot, omega):
    """Rate of change of the two capacitive reactances, as imaginary values."""
    if not omega > 0:
        raise PreconditionError("omega must be > 0")
    x = n_b_dot / omega
    return complex(0.0, -x), complex(0.0, x)


def dynamic_resistance_pair(n_b_dot, params: DeviceParams):
    return params.rho1 * n_b_dot, -params.rho2 * n_b_dot
