"""Dense Hermitian eigensolver (cyclic Jacobi) and spectral norm."""
import numpy as np

from ._kernels import jacobi_hermitian

__all__ = ["EigenConvergenceError", "hermitian_eig", "spectral_norm"]

OFF_DIAGONAL_RTOL = 1e-14
MAX_SWEEPS = 100
HERMITIAN_RTOL = 1e-12


class EigenConvergenceError(RuntimeError):
    def __init__(self, sweeps, residual):
        super().__init__(
            f"Jacobi iteration did not converge after {sweeps} sweeps "
            f"(off-diagonal Frobenius norm {residual:.3e})"
        )
        self.sweeps = sweeps
        self.residual = residual


def hermitian_eig(M):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(w, V)`` with ``w`` ascending and ``V`` unitary such that
    ``M @ V = V @ diag(w)``.
    """
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    scale = np.abs(M).max()
    asym = np.abs(M - M.conj().T).max()
    if asym > HERMITIAN_RTOL * scale:
        raise ValueError(
            f"matrix is not Hermitian: max |M - M*| = {asym:.3e} "
            f"exceeds {HERMITIAN_RTOL:g} * max|M|"
        )
    a = np.ascontiguousarray(0.5 * (M + M.conj().T))
    tol = OFF_DIAGONAL_RTOL * np.linalg.norm(a)
    V, sweeps, off = jacobi_hermitian(a, tol, MAX_SWEEPS)
    if off > tol:
        raise EigenConvergenceError(sweeps, off)
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def spectral_norm(M):
    """Largest absolute eigenvalue of a Hermitian matrix."""
    M = np.asarray(M)
    if M.size == 0 or not np.any(M):
        return 0.0
    w, _ = hermitian_eig(M)
    return float(np.abs(w).max())
