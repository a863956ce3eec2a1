import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from oscint.filters import (
    SINC_SERIES_THRESHOLD,
    apply_filter,
    catalog,
    from_phi,
    get_filter,
    sinc,
)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


class TestSinc:
    def test_zero(self):
        assert sinc(0.0) == 1.0

    def test_pi(self):
        assert abs(sinc(np.pi)) < 1e-16

    def test_small_argument_against_mpmath(self):
        mpmath.mp.dps = 50
        for x in (1e-6, 3e-6, 9.9e-6, -2e-6):
            exact = mpmath.sin(mpmath.mpf(x)) / mpmath.mpf(x)
            series = 1 - mpmath.mpf(x) ** 2 / 6 + mpmath.mpf(x) ** 4 / 120
            assert abs(series - exact) <= 1e-30
            assert abs(mpmath.mpf(sinc(x)) - exact) <= 1.2e-16

    def test_1e6_value(self):
        assert sinc(1e-6) == pytest.approx(1 - 1e-12 / 6, abs=1e-16)

    def test_branch_continuity(self):
        lo = np.nextafter(SINC_SERIES_THRESHOLD, 0)
        hi = SINC_SERIES_THRESHOLD
        assert abs(sinc(lo) - sinc(hi)) <= 2 * np.spacing(1.0)

    def test_array_and_scalar(self):
        out = sinc(np.array([0.0, np.pi / 2]))
        assert out.shape == (2,)
        assert out[1] == pytest.approx(2 / np.pi, rel=1e-15)
        assert isinstance(sinc(0.3), float)

    @given(finite)
    def test_even_and_bounded(self, x):
        assert sinc(x) == sinc(-x)
        assert abs(sinc(x)) <= 1.0


class TestCatalog:
    def test_names(self):
        assert set(catalog()) == {"deuflhard", "hairer-lubich", "gautschi", "unfiltered"}

    def test_deuflhard_psi1_at_zero(self):
        assert catalog()["deuflhard"].psi1(0.0) == 1.0

    def test_hairer_lubich_phi_at_pi(self):
        assert abs(catalog()["hairer-lubich"].phi(np.pi)) < 1e-16

    def test_gautschi_not_compliant(self):
        fp = catalog()["gautschi"]
        assert not fp.hl_compliant
        x = np.pi / 2
        assert abs(fp.psi1(x) - sinc(x) * fp.phi(x)) > 0.2

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown filter"):
            get_filter("leapfrog")

    def test_catalog_is_a_copy(self):
        c = catalog()
        c.pop("deuflhard")
        assert "deuflhard" in catalog()

    @pytest.mark.parametrize("name", ["deuflhard", "hairer-lubich"])
    def test_compliance_holds(self, name):
        fp = get_filter(name)
        x = np.linspace(-50, 50, 20001)
        phi, psi1 = fp.evaluate(x)
        assert np.max(np.abs(psi1 - sinc(x) * phi)) <= 1e-16

    @pytest.mark.parametrize("name", sorted(catalog()))
    def test_constants_bound_the_filters(self, name):
        fp = get_filter(name)
        x = np.concatenate([np.linspace(-200, 200, 400001), [np.pi, -np.pi]])
        phi, psi1 = fp.evaluate(x)
        assert np.all(np.abs(phi) <= fp.c0 + 1e-15)
        assert np.all(np.abs(psi1) <= fp.c0 + 1e-15)
        nz = x != 0
        assert np.all(np.abs(phi[nz] - 1) / np.abs(x[nz]) <= fp.c1 + 1e-15)

    def test_sinc_c1_is_sharp(self):
        # sup |sinc(x) - 1| / |x| is 1/pi, reached at x = pi
        assert (1 - sinc(np.pi)) / np.pi == pytest.approx(1 / np.pi)
        assert get_filter("hairer-lubich").c1 >= 1 / np.pi

    @given(finite)
    def test_filters_even(self, x):
        for fp in catalog().values():
            assert fp.phi(x) == fp.phi(-x)
            assert fp.psi1(x) == fp.psi1(-x)


def test_from_phi_is_compliant():
    fp = from_phi(lambda x: np.exp(-np.asarray(x) ** 2), "gauss", 1.0, 1.0)
    x = np.linspace(-5, 5, 101)
    phi, psi1 = fp.evaluate(x)
    assert fp.hl_compliant
    assert np.allclose(psi1, sinc(x) * phi, rtol=0, atol=1e-16)


class TestApplyFilter:
    def test_identity(self, rng):
        v = rng.normal(size=5) + 1j * rng.normal(size=5)
        one = get_filter("deuflhard").phi
        assert np.array_equal(apply_filter(one, 0.3, rng.uniform(0, 10, 5), v), v)

    def test_sinc_at_pi(self):
        out = apply_filter(sinc, 1.0, [np.pi, np.pi], np.array([1.0, 1.0]))
        assert np.max(np.abs(out)) <= 1e-15

    def test_sinc_squared(self):
        mpmath.mp.dps = 30
        expected = float((mpmath.sin(1) / 1) ** 2)
        out = apply_filter(get_filter("gautschi").psi1, 0.5, [2.0], np.array([1 + 0j]))
        assert out[0] == pytest.approx(expected, rel=1e-15)
        assert expected == pytest.approx(0.708073418273571)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            apply_filter(sinc, 1.0, [1.0, 2.0], np.ones(3))
