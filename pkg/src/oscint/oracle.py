"""Reference solutions used only for verification.

Nothing in the integrator imports this module. The exact propagator
diagonalizes M = Omega^2 + A with LAPACK (``numpy.linalg.eigh``), which keeps
it independent of the package's own Jacobi solver.
"""
from dataclasses import dataclass

import numpy as np

from .system import State, linear_nonlinearity

__all__ = [
    "ExactPropagator",
    "exact_solution",
    "BruteForceResult",
    "brute_force",
    "power_norm_estimate",
]

_SERIES_CUTOFF = 1.0


def _cos_sqrt(z):
    """cos(sqrt(z)) for real z of either sign (cosh for z < 0)."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_CUTOFF
    zs = z[small]
    # even series sum_k (-z)^k / (2k)!, terms beyond k=10 are < 1e-19
    term = np.ones_like(zs)
    acc = np.ones_like(zs)
    for k in range(1, 11):
        term = term * (-zs) / ((2 * k - 1) * (2 * k))
        acc = acc + term
    out[small] = acc
    pos = ~small & (z > 0)
    neg = ~small & (z < 0)
    out[pos] = np.cos(np.sqrt(z[pos]))
    out[neg] = np.cosh(np.sqrt(-z[neg]))
    return out


def _sinc_sqrt(z):
    """sin(sqrt(z))/sqrt(z), continued through z = 0 and to z < 0."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_CUTOFF
    zs = z[small]
    term = np.ones_like(zs)
    acc = np.ones_like(zs)
    for k in range(1, 11):
        term = term * (-zs) / ((2 * k) * (2 * k + 1))
        acc = acc + term
    out[small] = acc
    pos = ~small & (z > 0)
    neg = ~small & (z < 0)
    r = np.sqrt(z[pos])
    out[pos] = np.sin(r) / r
    r = np.sqrt(-z[neg])
    out[neg] = np.sinh(r) / r
    return out


@dataclass(frozen=True, eq=False)
class ExactPropagator:
    """Exact flow of q'' = -(Omega^2 + A) q."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def for_system(cls, sys):
        M = np.diag(sys.omegas**2).astype(np.complex128) + sys.coupling
        w, V = np.linalg.eigh(M)
        return cls(w, V)

    def propagate(self, s0, t):
        if t == 0:
            return s0.copy()
        lam, V = self.eigenvalues, self.eigenvectors
        a = V.conj().T @ s0.q
        b = V.conj().T @ s0.qdot
        z = lam * t * t
        C = _cos_sqrt(z)
        S = _sinc_sqrt(z)
        q = V @ (C * a + t * S * b)
        v = V @ (-lam * t * S * a + C * b)
        return State(q, v, s0.t + t)


def exact_solution(sys, s0, t):
    return ExactPropagator.for_system(sys).propagate(s0, t)


@dataclass(frozen=True)
class BruteForceResult:
    state: State
    error_estimate: float
    n_substeps: int
    converged: bool


def _rk4(sys, g, s0, t, n):
    dt = t / n
    Om2 = sys.omegas**2
    q, v = s0.q.copy(), s0.qdot.copy()

    def acc(q):
        return -Om2 * q + g(q)

    for _ in range(n):
        k1q, k1v = v, acc(q)
        k2q, k2v = v + 0.5 * dt * k1v, acc(q + 0.5 * dt * k1q)
        k3q, k3v = v + 0.5 * dt * k2v, acc(q + 0.5 * dt * k2q)
        k4q, k4v = v + dt * k3v, acc(q + dt * k3q)
        q = q + dt / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
        v = v + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return q, v


def brute_force(sys, g, s0, t, n_substeps, tol=None, max_substeps=2**20):
    """Classical RK4 reference with a step-halving (Richardson) error estimate.

    With ``tol`` the substep count is doubled until the estimate meets it or
    ``max_substeps`` is reached; the result is returned either way with
    ``converged`` telling which.
    """
    g = linear_nonlinearity(sys) if g is None else g
    if t == 0:
        return BruteForceResult(s0.copy(), 0.0, 0, True)
    n = max(1, int(n_substeps))
    while True:
        q1, v1 = _rk4(sys, g, s0, t, n)
        q2, v2 = _rk4(sys, g, s0, t, 2 * n)
        est = max(np.abs(q2 - q1).max(), np.abs(v2 - v1).max()) / 15.0
        converged = tol is None or est <= tol
        if converged or 4 * n > max_substeps:
            return BruteForceResult(State(q2, v2, s0.t + t), float(est), 2 * n, converged)
        n *= 2


def power_norm_estimate(M, iters=2000, seed=0):
    """Spectral norm of a Hermitian matrix by power iteration on M*M."""
    M = np.asarray(M, dtype=np.complex128)
    rng = np.random.default_rng(seed)
    x = rng.normal(size=M.shape[0]) + 1j * rng.normal(size=M.shape[0])
    x /= np.linalg.norm(x)
    val = 0.0
    for _ in range(iters):
        y = M.conj().T @ (M @ x)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        val = np.sqrt(np.vdot(x, y).real)
        x = y / ny
    return float(val)
