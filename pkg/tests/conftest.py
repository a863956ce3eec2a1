import numpy as np
import pytest

from oscint.system import OscillatorSystem, Nonlinearity


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rel(a, b):
    """Relative distance, with an absolute floor for zero references."""
    a, b = np.asarray(a), np.asarray(b)
    nb = np.linalg.norm(b)
    return float(np.linalg.norm(a - b) / nb) if nb > 0 else float(np.linalg.norm(a - b))


def zero_force():
    return Nonlinearity(lambda q: np.zeros_like(q), lambda q: 0.0, "zero")


def hermitian(rng, d, norm=1.0):
    B = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    A = 0.5 * (B + B.conj().T)
    return A * norm / np.abs(np.linalg.eigvalsh(A)).max()


def decoupled(omegas):
    return OscillatorSystem.decoupled(np.asarray(omegas, dtype=float))
