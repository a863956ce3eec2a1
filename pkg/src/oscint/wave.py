"""Fourier collocation of the 1-D Klein-Gordon equation u_tt = u_xx - rho u - V u.

Conventions used throughout:

* Modes j = -K..K-1 are stored in DFT order ``0, 1, ..., K-1, -K, ..., -1``
  (see :func:`mode_indices`).
* Grid samples are stored at x_m = m*pi/K for m = 0..2K-1, which is the
  collocation set {k*pi/K : k = -K..K-1} taken mod 2*pi, in the same wrap
  order.
* Norms are coefficient norms: ||u||_{L2} = sqrt(sum |u_j|^2), i.e. the
  integral norm with weight 1/(2*pi). No sqrt(2*pi) factors appear anywhere.

The semi-discretization is q'' = -Omega^2 q - A q with omega_j = sqrt(j^2 + rho)
and a_{jl} = sum_m V_{j-l+2Km}.
"""
import json
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .linalg import spectral_norm
from .system import OscillatorSystem, State

__all__ = [
    "mode_indices",
    "collocation_points",
    "frequencies",
    "PotentialSpec",
    "WaveProblem",
    "potential_matrix",
    "synthesize",
    "trig_interpolate",
    "build_system",
    "sobolev_norms",
    "operator_norm_ratio",
    "RhoCertificate",
    "rho_certificate",
    "C2_UPPER",
]

# ||A|| = max_k |V(x_k)| <= sum |V_j| <= sqrt(sum 1/(1+j^2)) ||V||_{H1}
# and sum_j 1/(1+j^2) = pi*coth(pi).
C2_UPPER = float(np.sqrt(np.pi / np.tanh(np.pi)))


def mode_indices(K):
    """Wavenumbers in storage order, ``0..K-1, -K..-1``."""
    if K < 1:
        raise ValueError("K must be at least 1")
    return np.concatenate([np.arange(K), np.arange(-K, 0)])


def collocation_points(K):
    return np.arange(2 * K) * np.pi / K


def frequencies(K, rho):
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    j = mode_indices(K)
    return np.sqrt(j.astype(np.float64) ** 2 + rho)


@dataclass(frozen=True)
class PotentialSpec:
    """Real potential V(x) = sum_{|j|<=J} V_j e^{ijx} given by its coefficients.

    ``coeffs`` maps j to V_j. Conjugate symmetry V_{-j} = conj(V_j) is
    required; missing entries are zero.
    """

    coeffs: Mapping[int, complex]

    def __post_init__(self):
        c = {int(j): complex(v) for j, v in self.coeffs.items() if v != 0}
        scale = max((abs(v) for v in c.values()), default=0.0)
        for j, v in c.items():
            partner = c.get(-j, 0.0)
            if abs(partner - v.conjugate()) > 1e-12 * scale:
                raise ValueError(
                    f"potential is not real: V_{-j} = {partner} but conj(V_{j}) = "
                    f"{v.conjugate()}"
                )
        # exact symmetry
        for j in list(c):
            if j > 0:
                c[-j] = c[j].conjugate()
            elif j == 0:
                c[0] = complex(c[0].real, 0.0)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_nonnegative(cls, coeffs):
        """Fill in negative modes by conjugation; V_0 must be real."""
        c = {}
        for j, v in coeffs.items():
            if j < 0:
                raise ValueError("give only j >= 0")
            c[j] = complex(v)
            if j > 0:
                c[-j] = complex(v).conjugate()
        return cls(c)

    @property
    def support(self):
        return max((abs(j) for j in self.coeffs), default=0)

    def h1_norm(self):
        return float(np.sqrt(sum((1 + j * j) * abs(v) ** 2 for j, v in self.coeffs.items())))

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros(x.shape, dtype=np.complex128)
        for j, v in self.coeffs.items():
            out += v * np.exp(1j * j * x)
        return out

    def to_list(self):
        return [{"j": j, "re": v.real, "im": v.imag} for j, v in sorted(self.coeffs.items())]


def _coeff_list(entries):
    out = {}
    for e in entries or []:
        try:
            out[int(e["j"])] = out.get(int(e["j"]), 0) + complex(e.get("re", 0.0), e.get("im", 0.0))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"bad coefficient entry {e!r}") from exc
    return out


def synthesize(coeffs):
    """Values of sum_j q_j e^{ijx} at the 2K collocation points."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    return coeffs.size * np.fft.ifft(coeffs)


def trig_interpolate(samples):
    """Coefficients of the degree-K trigonometric interpolant of 2K samples."""
    samples = np.asarray(samples, dtype=np.complex128)
    n = samples.size
    if n < 2 or n % 2:
        raise ValueError(f"need 2K samples, got {n}")
    return np.fft.fft(samples) / n


def _interpolate_coeff_map(K, coeffs):
    # continuous coefficients (any j) -> interpolant coefficients of length 2K
    x = collocation_points(K)
    samples = np.zeros(2 * K, dtype=np.complex128)
    for j, v in coeffs.items():
        samples += v * np.exp(1j * j * x)
    return trig_interpolate(samples)


@dataclass(frozen=True, eq=False)
class WaveProblem:
    """Klein-Gordon discretization parameters and initial Fourier data.

    ``u0`` and ``v0`` are 2K coefficient vectors in storage order.
    """

    K: int
    rho: float
    potential: PotentialSpec
    u0: np.ndarray
    v0: np.ndarray

    def __post_init__(self):
        if int(self.K) < 1:
            raise ValueError("K must be at least 1")
        if not self.rho >= 0:
            raise ValueError("rho must be nonnegative")
        for name in ("u0", "v0"):
            a = np.asarray(getattr(self, name), dtype=np.complex128).reshape(-1)
            if a.size != 2 * self.K:
                raise ValueError(f"{name} must have 2K = {2 * self.K} entries, got {a.size}")
            object.__setattr__(self, name, a)

    @classmethod
    def from_functions(cls, K, rho, potential, u0, v0=None):
        """Initial data from callables sampled at the collocation points."""
        x = collocation_points(K)
        a = trig_interpolate(u0(x))
        b = trig_interpolate(v0(x)) if v0 is not None else np.zeros(2 * K, complex)
        return cls(K, rho, potential, a, b)

    @classmethod
    def from_dict(cls, data, K=None, rho=None):
        try:
            K = int(data["K"] if K is None else K)
            rho = float(data["rho"] if rho is None else rho)
        except KeyError as exc:
            raise ValueError(f"problem JSON is missing key {exc.args[0]!r}") from None
        potential = PotentialSpec(_coeff_list(data.get("potential")))
        u0 = _interpolate_coeff_map(K, _coeff_list(data.get("u0")))
        v0 = _interpolate_coeff_map(K, _coeff_list(data.get("v0")))
        return cls(K, rho, potential, u0, v0)

    @classmethod
    def from_json(cls, text, **overrides):
        return cls.from_dict(json.loads(text), **overrides)

    def to_dict(self):
        j = mode_indices(self.K)

        def entries(a):
            return [
                {"j": int(jj), "re": float(v.real), "im": float(v.imag)}
                for jj, v in zip(j, a)
                if v != 0
            ]

        return {
            "K": self.K,
            "rho": self.rho,
            "potential": self.potential.to_list(),
            "u0": entries(self.u0),
            "v0": entries(self.v0),
        }


def potential_matrix(K, potential):
    """a_{jl} = sum over m of V_{j-l+2Km}, in storage order."""
    j = mode_indices(K)
    diff = j[:, None] - j[None, :]
    A = np.zeros((2 * K, 2 * K), dtype=np.complex128)
    for p, v in potential.coeffs.items():
        # V_p lands where j - l = p (mod 2K)
        A[(diff - p) % (2 * K) == 0] += v
    return A


def build_system(problem):
    """Assemble (OscillatorSystem, initial State) for a wave problem."""
    omegas = frequencies(problem.K, problem.rho)
    A = potential_matrix(problem.K, problem.potential)
    u0 = trig_interpolate(synthesize(problem.u0))
    v0 = trig_interpolate(synthesize(problem.v0))
    return OscillatorSystem(omegas, A), State(u0, v0)


def sobolev_norms(coeffs, rho):
    """(L2, H1, Omega-weighted) norms of coefficients in storage order."""
    coeffs = np.asarray(coeffs)
    n = coeffs.size
    j = mode_indices(n // 2).astype(np.float64)
    a2 = np.abs(coeffs) ** 2
    return (
        float(np.sqrt(a2.sum())),
        float(np.sqrt(((1 + j * j) * a2).sum())),
        float(np.sqrt(((j * j + rho) * a2).sum())),
    )


def operator_norm_ratio(K, potential):
    """||A|| / ||V||_{H1}; its sup over K and V is the constant c2."""
    v = potential.h1_norm()
    if v == 0:
        raise ValueError("potential is zero")
    return spectral_norm(potential_matrix(K, potential)) / v


@dataclass(frozen=True)
class RhoCertificate:
    rho: float
    omega_min: float
    a_norm: float
    v_h1: float
    c2_est: float
    theorem_threshold: float
    theorem_ok: bool
    direct_threshold: float
    direct_ok: bool
    refused: bool
    message: str

    @property
    def certified(self):
        return self.direct_ok and not self.refused

    def to_dict(self):
        return dict(self.__dict__, certified=self.certified)


def rho_certificate(problem, fp, c2_est, a_norm: Optional[float] = None):
    """Check the mass-parameter conditions for step-size-uniform energy bounds.

    Two conditions are evaluated: the one stated in terms of ``c2_est`` and
    ||V||_{H1}, and the sharper ``min_j omega_j >= c0^2 ||A|| / 2 + 1`` with
    the computed ||A||. The drift is then O(h) uniformly in h and K.
    """
    sys, _ = build_system(problem)
    a = sys.a_norm if a_norm is None else a_norm
    om = float(sys.omegas.min())
    v = problem.potential.h1_norm()
    th_theorem = 0.5 * fp.c0**2 * c2_est * v + 1.0
    th_direct = 0.5 * fp.c0**2 * a + 1.0
    refused = om == 0.0 or not fp.hl_compliant
    if om == 0.0:
        msg = "refused: rho = 0 leaves the zero mode omega_0 = 0"
    elif not fp.hl_compliant:
        msg = f"refused: filter pair {fp.name!r} is not compliant"
    elif om >= th_direct:
        msg = f"certified: drift <= C h with omega = sqrt(rho) = {om:.6g} >= {th_direct:.6g}"
    else:
        msg = (
            f"not certified: omega = sqrt(rho) = {om:.6g} < c0^2||A||/2 + 1 = {th_direct:.6g}; "
            "drift stays bounded only while |q_n| does"
        )
    return RhoCertificate(
        rho=problem.rho,
        omega_min=om,
        a_norm=a,
        v_h1=v,
        c2_est=c2_est,
        theorem_threshold=th_theorem,
        theorem_ok=(not refused) and problem.rho >= th_theorem,
        direct_threshold=th_direct,
        direct_ok=(not refused) and om >= th_direct,
        refused=refused,
        message=msg,
    )


def default_problem(K=32, rho=4.0):
    """Smooth default setup: V(x) = 1/2 + 1/2 cos x + 1/5 sin 2x."""
    potential = PotentialSpec.from_nonnegative({0: 0.5, 1: 0.25, 2: -0.1j})

    def u0(x):
        return np.exp(np.cos(x)) - 1.0

    def v0(x):
        return 0.5 * np.sin(x) + 0.1 * np.cos(3 * x)

    return WaveProblem.from_functions(K, rho, potential, u0, v0)
