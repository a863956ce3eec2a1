"""Oscillatory second-order systems q'' = -Omega^2 q + g(q) and their energies."""
import json
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .linalg import spectral_norm

__all__ = [
    "AsymmetryWarning",
    "OscillatorSystem",
    "State",
    "Nonlinearity",
    "linear_nonlinearity",
    "cubic_nonlinearity",
    "energy",
    "modified_energy",
    "modified_energy_general",
    "exchange_terms",
    "exchange_defect",
    "random_system",
    "random_state",
]

ASYMMETRY_WARN_RTOL = 1e-10


class AsymmetryWarning(UserWarning):
    pass


def _readonly(a):
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class OscillatorSystem:
    """Diagonal frequencies ``omegas`` plus a self-adjoint coupling ``A``.

    The coupling is replaced by ``(A + A*)/2`` on construction; a warning is
    issued when that changed it by more than 1e-10 relative.
    """

    omegas: np.ndarray
    coupling: np.ndarray

    def __post_init__(self):
        om = np.array(self.omegas, dtype=np.float64).reshape(-1)
        d = om.size
        A = np.array(self.coupling, dtype=np.complex128)
        if A.shape != (d, d):
            raise ValueError(f"coupling must be {d}x{d}, got {A.shape}")
        if not np.all(np.isfinite(om)) or np.any(om < 0):
            raise ValueError("frequencies must be finite and nonnegative")
        if not np.all(np.isfinite(A)):
            raise ValueError("coupling has non-finite entries")
        scale = np.abs(A).max() if d else 0.0
        asym = np.abs(A - A.conj().T).max() if d else 0.0
        if asym > ASYMMETRY_WARN_RTOL * scale:
            warnings.warn(
                f"coupling was not Hermitian (max |A - A*| = {asym:.3e}); "
                "using (A + A*)/2",
                AsymmetryWarning,
                stacklevel=3,
            )
        A = 0.5 * (A + A.conj().T)
        object.__setattr__(self, "omegas", _readonly(om))
        object.__setattr__(self, "coupling", _readonly(np.ascontiguousarray(A)))

    @property
    def d(self):
        return self.omegas.size

    @cached_property
    def a_norm(self):
        return spectral_norm(self.coupling)

    @cached_property
    def omega_min_nonzero(self):
        nz = self.omegas[self.omegas > 0]
        return float(nz.min()) if nz.size else np.inf

    @classmethod
    def decoupled(cls, omegas):
        omegas = np.asarray(omegas, dtype=np.float64)
        return cls(omegas, np.zeros((omegas.size, omegas.size)))

    def to_dict(self):
        return {
            "omegas": self.omegas.tolist(),
            "coupling_re": self.coupling.real.tolist(),
            "coupling_im": self.coupling.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            omegas = data["omegas"]
            re = np.asarray(data["coupling_re"], dtype=np.float64)
        except KeyError as exc:
            raise ValueError(f"system JSON is missing key {exc.args[0]!r}") from None
        im = np.asarray(data.get("coupling_im", np.zeros_like(re)), dtype=np.float64)
        return cls(omegas, re + 1j * im)

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass
class State:
    q: np.ndarray
    qdot: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.q = np.array(self.q, dtype=np.complex128).reshape(-1)
        self.qdot = np.array(self.qdot, dtype=np.complex128).reshape(-1)
        if self.q.shape != self.qdot.shape:
            raise ValueError("position and velocity dimensions differ")

    def copy(self):
        return State(self.q.copy(), self.qdot.copy(), self.t)


@dataclass(frozen=True)
class Nonlinearity:
    """Force ``g`` with optional potential ``U`` such that ``g = -grad U``.

    The gradient is the complex one, ``grad = grad_x + i grad_y``.
    """

    g: Callable[[np.ndarray], np.ndarray]
    U: Optional[Callable[[np.ndarray], float]] = None
    label: str = field(default="g")

    def __call__(self, q):
        return self.g(q)


def linear_nonlinearity(sys):
    A = sys.coupling

    def g(q):
        return -(A @ q)

    def U(q):
        return 0.5 * float(np.real(np.vdot(q, A @ q)))

    return Nonlinearity(g, U, "linear")


def cubic_nonlinearity(strength=1.0):
    """g(q)_j = -strength |q_j|^2 q_j with U = strength/4 sum |q_j|^4."""

    def g(q):
        return -strength * np.abs(q) ** 2 * q

    def U(q):
        return 0.25 * strength * float(np.sum(np.abs(q) ** 4))

    return Nonlinearity(g, U, "cubic")


def _check_dims(sys, s):
    if s.q.shape != (sys.d,):
        raise ValueError(f"state has dimension {s.q.shape[0]}, system has {sys.d}")


def _norm2(x):
    return float(np.sum(x.real**2 + x.imag**2))


def energy(sys, s, g=None):
    """Total energy 1/2|Omega q|^2 + 1/2|q'|^2 + U(q).

    Without ``g`` the potential is the linear one, 1/2 Re(q* A q).
    """
    _check_dims(sys, s)
    kinetic = 0.5 * _norm2(sys.omegas * s.q) + 0.5 * _norm2(s.qdot)
    if g is None:
        return kinetic + 0.5 * float(np.real(np.vdot(s.q, sys.coupling @ s.q)))
    if g.U is None:
        raise ValueError("total energy needs the potential U of the nonlinearity")
    return kinetic + g.U(s.q)


def _filter_arrays(sys, fp, h):
    xi = h * sys.omegas
    phi, psi1 = fp.evaluate(xi)
    return np.cos(xi), phi, psi1


def modified_energy_general(sys, g, fp, h, s):
    """Modified energy for an arbitrary force ``g``.

    1/2|Om q|^2 + 1/2|q'|^2 - 1/2 Re((cos(hOm) Phi q)* g(Phi q))
    - h^2/8 |Psi1 g(Phi q)|^2
    """
    _check_dims(sys, s)
    cos, phi, psi1 = _filter_arrays(sys, fp, h)
    phq = phi * s.q
    gq = np.asarray(g(phq))
    return (
        0.5 * _norm2(sys.omegas * s.q)
        + 0.5 * _norm2(s.qdot)
        - 0.5 * float(np.real(np.vdot(cos * phq, gq)))
        - 0.125 * h * h * _norm2(psi1 * gq)
    )


def modified_energy(sys, fp, h, s):
    """Modified energy of the linear system, exactly conserved by compliant
    trigonometric integrators."""
    _check_dims(sys, s)
    cos, phi, psi1 = _filter_arrays(sys, fp, h)
    phq = phi * s.q
    aphq = sys.coupling @ phq
    return (
        0.5 * _norm2(sys.omegas * s.q)
        + 0.5 * _norm2(s.qdot)
        + 0.5 * float(np.real(np.vdot(cos * phq, aphq)))
        - 0.125 * h * h * _norm2(psi1 * aphq)
    )


def exchange_terms(sys, g, fp, h, s_n, s_next):
    """Both sides of the two-step exchange identity plus the cross terms.

    Returns ``(lhs, rhs, cross_a, cross_b)`` where
    ``cross_a = (Phi q_n)* g(Phi q_{n+1})``, ``cross_b = (Phi q_{n+1})* g(Phi q_n)``,
    ``lhs = H_{n+1} + Re(cross_a)/2`` and ``rhs = H_n + Re(cross_b)/2``.
    """
    _, phi, _ = _filter_arrays(sys, fp, h)
    ph_n = phi * s_n.q
    ph_next = phi * s_next.q
    cross_a = complex(np.vdot(ph_n, g(ph_next)))
    cross_b = complex(np.vdot(ph_next, g(ph_n)))
    lhs = modified_energy_general(sys, g, fp, h, s_next) + 0.5 * cross_a.real
    rhs = modified_energy_general(sys, g, fp, h, s_n) + 0.5 * cross_b.real
    return lhs, rhs, cross_a, cross_b


def exchange_defect(sys, g, fp, h, s_n, s_next):
    """|lhs - rhs| of the exchange identity for one integrator step."""
    lhs, rhs, _, _ = exchange_terms(sys, g, fp, h, s_n, s_next)
    return abs(lhs - rhs)


def random_system(rng, d, omega_max=1e3, a_norm=1.0, zero_modes=0, psd=True):
    """Random test system with frequencies in [0, omega_max] and ||A|| = a_norm.

    ``psd=True`` draws A = B B* so that the exact flow is stable even with
    zero frequencies.
    """
    omegas = rng.uniform(0.0, omega_max, d)
    omegas[:zero_modes] = 0.0
    B = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    A = B @ B.conj().T if psd else 0.5 * (B + B.conj().T)
    A = 0.5 * (A + A.conj().T)
    if a_norm == 0:
        A = np.zeros((d, d))
    else:
        A *= a_norm / np.abs(np.linalg.eigvalsh(A)).max()
    return OscillatorSystem(omegas, A)


def random_state(rng, d, scale=1.0):
    q = scale * (rng.normal(size=d) + 1j * rng.normal(size=d))
    qdot = scale * (rng.normal(size=d) + 1j * rng.normal(size=d))
    return State(q, qdot)
