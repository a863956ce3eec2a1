"""Filter functions for trigonometric integrators.

A filter is an even real function of the dimensionless argument ``xi = h*omega``.
The integrator uses two of them: ``phi`` filters the position at which the
force is evaluated and ``psi1`` filters the force itself. The pair is
*compliant* when ``psi1 = sinc * phi``; compliant pairs conserve the modified
energy exactly in the linear case.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "SINC_SERIES_THRESHOLD",
    "FilterFunction",
    "FilterPair",
    "sinc",
    "catalog",
    "get_filter",
    "from_phi",
    "apply_filter",
]

# Below this |xi| sinc uses 1 - xi^2/6 + xi^4/120; truncation error is
# xi^6/5040 < 2e-34 there.
SINC_SERIES_THRESHOLD = 1e-5


def sinc(xi):
    """sin(xi)/xi with the removable singularity filled in.

    Works on scalars and arrays; evaluates through ``|xi|`` so the result is
    exactly even.
    """
    x = np.abs(np.asarray(xi, dtype=np.float64))
    small = x < SINC_SERIES_THRESHOLD
    x2 = x * x
    series = 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = np.sin(x) / x
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def _one(xi):
    x = np.asarray(xi, dtype=np.float64)
    out = np.ones_like(x)
    return out if out.ndim else 1.0


def _sinc2(xi):
    s = sinc(xi)
    return s * s


@dataclass(frozen=True)
class FilterFunction:
    evaluator: Callable
    label: str

    def __call__(self, xi):
        return self.evaluator(xi)


@dataclass(frozen=True)
class FilterPair:
    """Named (phi, psi1) pair with its bound constants.

    ``c0`` bounds ``|phi|`` and ``|psi1|`` uniformly and ``c1`` bounds
    ``|phi(xi) - 1| / |xi|``.
    """

    name: str
    phi: FilterFunction
    psi1: FilterFunction
    c0: float
    c1: float
    hl_compliant: bool

    def evaluate(self, xi):
        """Return ``(phi(xi), psi1(xi))`` as float arrays."""
        xi = np.asarray(xi, dtype=np.float64)
        return np.broadcast_to(self.phi(xi), xi.shape), np.broadcast_to(
            self.psi1(xi), xi.shape
        )


ONE = FilterFunction(_one, "1")
SINC = FilterFunction(sinc, "sinc")
SINC2 = FilterFunction(_sinc2, "sinc^2")

# c1 for phi = sinc: sup |sinc(xi) - 1| / |xi| = 1/pi, attained at xi = pi.
_HL_C1 = 0.32

_CATALOG = {
    "deuflhard": FilterPair("deuflhard", ONE, SINC, 1.0, 0.0, True),
    "hairer-lubich": FilterPair("hairer-lubich", SINC, SINC2, 1.0, _HL_C1, True),
    "gautschi": FilterPair("gautschi", ONE, SINC2, 1.0, 0.0, False),
    "unfiltered": FilterPair("unfiltered", ONE, ONE, 1.0, 0.0, False),
}


def catalog():
    """Named filter pairs, keyed by name."""
    return dict(_CATALOG)


def get_filter(name):
    try:
        return _CATALOG[name]
    except KeyError:
        raise ValueError(
            f"unknown filter {name!r}; choose from {', '.join(sorted(_CATALOG))}"
        ) from None


def from_phi(phi, label, c0, c1):
    """Build a compliant pair from ``phi`` alone, with ``psi1 = sinc * phi``.

    ``c0`` and ``c1`` must bound ``phi``; since ``|sinc| <= 1`` the same ``c0``
    then bounds ``psi1``.
    """
    phi_f = phi if isinstance(phi, FilterFunction) else FilterFunction(phi, label)

    def psi1(xi):
        return sinc(xi) * phi_f(xi)

    return FilterPair(
        label, phi_f, FilterFunction(psi1, f"sinc*{phi_f.label}"), c0, c1, True
    )


def apply_filter(f, h, omegas, v):
    """Componentwise ``f(h*omega_j) * v_j``."""
    omegas = np.asarray(omegas, dtype=np.float64)
    v = np.asarray(v)
    if omegas.shape != v.shape:
        raise ValueError(f"dimension mismatch: omegas {omegas.shape} vs v {v.shape}")
    if not h > 0:
        raise ValueError("step size must be positive")
    return f(h * omegas) * v
