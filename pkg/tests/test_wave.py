import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscint.filters import get_filter
from oscint.integrator import IntegratorConfig, integrate
from oscint.linalg import spectral_norm
from oscint.wave import (
    C2_UPPER,
    PotentialSpec,
    WaveProblem,
    build_system,
    collocation_points,
    default_problem,
    frequencies,
    mode_indices,
    operator_norm_ratio,
    potential_matrix,
    rho_certificate,
    sobolev_norms,
    synthesize,
    trig_interpolate,
)

from conftest import rel

HL = get_filter("hairer-lubich")
COS2 = PotentialSpec({1: 1.0, -1: 1.0})  # V(x) = 2 cos x


def dft_synthesize(coeffs):
    # O(K^2) reference for sum_j q_j e^{ijx_m}
    K = len(coeffs) // 2
    j = mode_indices(K)
    x = collocation_points(K)
    return np.array([sum(c * np.exp(1j * jj * xm) for c, jj in zip(coeffs, j)) for xm in x])


def random_potential(rng, J):
    c = {0: rng.normal()}
    for j in range(1, J + 1):
        c[j] = rng.normal() + 1j * rng.normal()
    return PotentialSpec.from_nonnegative(c)


def random_coeffs(rng, K):
    return rng.normal(size=2 * K) + 1j * rng.normal(size=2 * K)


class TestGrid:
    def test_mode_order(self):
        assert list(mode_indices(3)) == [0, 1, 2, -3, -2, -1]

    def test_frequencies(self):
        om = frequencies(2, 1.0)
        assert np.allclose(om, [1.0, np.sqrt(2), np.sqrt(5), np.sqrt(2)], rtol=1e-15)
        assert frequencies(4, 0.0)[0] == 0.0
        assert frequencies(4, 4.0)[3] == pytest.approx(np.sqrt(13))

    def test_bad_input(self):
        with pytest.raises(ValueError):
            mode_indices(0)
        with pytest.raises(ValueError):
            frequencies(4, -1.0)


class TestTransforms:
    def test_single_mode(self):
        x = collocation_points(8)
        q = trig_interpolate(np.exp(1j * x))
        assert abs(q[1] - 1) <= 1e-14
        assert np.max(np.abs(np.delete(q, 1))) <= 1e-14

    def test_constant(self):
        q = trig_interpolate(np.full(16, 2.5 - 1j))
        assert abs(q[0] - (2.5 - 1j)) <= 1e-14
        assert np.max(np.abs(q[1:])) <= 1e-14

    def test_against_direct_dft(self, rng):
        c = random_coeffs(rng, 6)
        assert rel(synthesize(c), dft_synthesize(c)) <= 1e-13

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 64), st.integers(0, 2**31))
    def test_roundtrip(self, K, seed):
        c = random_coeffs(np.random.default_rng(seed), K)
        err = np.max(np.abs(trig_interpolate(synthesize(c)) - c))
        assert err <= 1e-13 * max(1, np.abs(c).max())

    def test_odd_sample_count(self):
        with pytest.raises(ValueError):
            trig_interpolate(np.ones(5))


class TestPotential:
    def test_rejects_complex_potential(self):
        with pytest.raises(ValueError, match="not real"):
            PotentialSpec({1: 1.0, -1: 2.0})

    def test_from_nonnegative(self):
        v = PotentialSpec.from_nonnegative({0: 1.0, 2: 1j})
        assert v.coeffs[-2] == -1j
        assert v.support == 2
        assert np.max(np.abs(v(np.linspace(0, 6, 50)).imag)) <= 1e-15
        with pytest.raises(ValueError):
            PotentialSpec.from_nonnegative({-1: 1.0})

    def test_h1_norm(self):
        assert COS2.h1_norm() == pytest.approx(2.0)


class TestPotentialMatrix:
    def test_zero(self):
        assert not np.any(potential_matrix(4, PotentialSpec({})))

    def test_cosine_k2(self):
        expected = np.array([[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]])
        A = potential_matrix(2, COS2)
        assert np.array_equal(A, expected)
        # aliased corners (j, l) = (-2, 1) and (1, -2); storage index of -2 is 2
        assert A[2, 1] == 1 and A[1, 2] == 1

    def test_direct_summation_oracle(self, rng):
        K = 3
        V = random_potential(rng, 5)  # support beyond K forces aliasing
        j = mode_indices(K)
        ref = np.zeros((2 * K, 2 * K), complex)
        for a, ja in enumerate(j):
            for b, jb in enumerate(j):
                for m in range(-5, 6):
                    ref[a, b] += V.coeffs.get(ja - jb + 2 * K * m, 0.0)
        assert np.allclose(potential_matrix(K, V), ref, atol=1e-15)

    @pytest.mark.parametrize("K", [2, 4, 8, 32])
    def test_collocation_route(self, rng, K):
        V = random_potential(rng, 3)
        q = random_coeffs(rng, K)
        via_matrix = potential_matrix(K, V) @ q
        via_grid = trig_interpolate(V(collocation_points(K)) * synthesize(q))
        assert rel(via_matrix, via_grid) <= 1e-12

    def test_norm_is_grid_maximum(self, rng):
        V = random_potential(rng, 3)
        K = 16
        assert spectral_norm(potential_matrix(K, V)) == pytest.approx(
            np.abs(V(collocation_points(K))).max(), rel=1e-12
        )


class TestBuildSystem:
    def test_hand_assembly(self):
        p = WaveProblem(2, 1.0, COS2, np.zeros(4), np.zeros(4))
        sys, _ = build_system(p)
        assert np.allclose(sys.omegas, [1, np.sqrt(2), np.sqrt(5), np.sqrt(2)])
        assert np.array_equal(sys.coupling, potential_matrix(2, COS2))

    def test_hermitian(self, rng):
        p = WaveProblem(8, 2.0, random_potential(rng, 4), random_coeffs(rng, 8),
                        random_coeffs(rng, 8))
        A = potential_matrix(8, p.potential)
        assert np.max(np.abs(A - A.conj().T)) <= 1e-14 * np.abs(A).max()

    def test_free_klein_gordon(self, rng):
        p = WaveProblem(8, 1.0, PotentialSpec({}), random_coeffs(rng, 8), random_coeffs(rng, 8))
        sys, s0 = build_system(p)
        _, series = integrate(sys, None, IntegratorConfig(0.1, HL), s0, 100_000, stride=100)
        assert series.max_abs_drift("H") <= 1e-9 * series.H[0]


class TestNorms:
    def test_unit_vectors(self):
        e0 = np.zeros(8, complex)
        e0[0] = 1
        assert sobolev_norms(e0, 1.0) == (1.0, 1.0, 1.0)
        e3 = np.zeros(8, complex)
        e3[3] = 1
        _, h1, om = sobolev_norms(e3, 0.0)
        assert h1 == pytest.approx(np.sqrt(10)) and om == pytest.approx(3.0)

    def test_rho_one(self, rng):
        _, h1, om = sobolev_norms(random_coeffs(rng, 8), 1.0)
        assert h1 == om

    def test_ratio_cosine(self):
        assert operator_norm_ratio(16, COS2) <= 1.0 + 1e-14

    def test_ratio_constant(self):
        V = PotentialSpec({0: 1.0})
        assert np.array_equal(potential_matrix(5, V), np.eye(10))
        assert operator_norm_ratio(5, V) == pytest.approx(1.0)

    def test_ratio_below_analytic_ceiling(self, rng):
        for _ in range(20):
            assert operator_norm_ratio(8, random_potential(rng, 4)) <= C2_UPPER


class TestCertificate:
    def test_free(self, rng):
        p = WaveProblem(4, 1.0, PotentialSpec({}), random_coeffs(rng, 4), random_coeffs(rng, 4))
        assert rho_certificate(p, HL, 1.0).certified

    def test_half_cosine(self):
        V = PotentialSpec.from_nonnegative({1: 0.25})
        x = collocation_points(32)
        p = WaveProblem.from_functions(32, 4.0, V, lambda y: np.sin(y))
        cert = rho_certificate(p, HL, 1.0)
        assert cert.a_norm == pytest.approx(np.abs(V(x)).max(), rel=1e-12)
        assert cert.a_norm == pytest.approx(0.5, rel=1e-12)
        assert cert.direct_threshold == pytest.approx(1.25, rel=1e-12)
        assert cert.certified and "certified" in cert.message

    def test_zero_mode_refused(self):
        cert = rho_certificate(default_problem(8, 0.0), HL, 1.0)
        assert cert.refused and not cert.certified
        assert "zero mode" in cert.message

    def test_non_compliant_refused(self):
        cert = rho_certificate(default_problem(8, 4.0), get_filter("gautschi"), 1.0)
        assert cert.refused

    def test_too_small_rho(self):
        p = WaveProblem(4, 0.01, PotentialSpec({0: 3.0}), np.ones(8), np.zeros(8))
        cert = rho_certificate(p, HL, 1.0)
        assert not cert.certified and not cert.refused
        assert "not certified" in cert.message

    def test_to_dict(self):
        d = rho_certificate(default_problem(8, 4.0), HL, 1.0).to_dict()
        json.dumps(d)
        assert d["certified"] is True


class TestProblemIO:
    def test_roundtrip(self):
        p = default_problem(8, 2.0)
        q = WaveProblem.from_dict(json.loads(json.dumps(p.to_dict())))
        assert q.K == 8 and q.rho == 2.0
        assert np.allclose(q.u0, p.u0, atol=1e-15) and np.allclose(q.v0, p.v0, atol=1e-15)
        assert q.potential.coeffs == p.potential.coeffs

    def test_overrides_and_aliasing(self):
        data = {"K": 4, "rho": 1.0, "u0": [{"j": 9, "re": 1.0}]}
        p = WaveProblem.from_dict(data, K=4, rho=3.0)
        assert p.rho == 3.0
        # e^{9ix} on 8 points aliases to e^{ix}
        assert abs(p.u0[1] - 1) <= 1e-14

    def test_missing_key(self):
        with pytest.raises(ValueError, match="missing"):
            WaveProblem.from_dict({"K": 4})

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            WaveProblem(4, 1.0, PotentialSpec({}), np.zeros(5), np.zeros(8))
