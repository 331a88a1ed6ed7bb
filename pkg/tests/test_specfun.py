"""Tests for Fresnel integrals, Airy functions and Airy zeros."""

import math
import numpy as np
import pytest
import sys
from pathlib import Path
from scipy import integrate, special

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from gravidiff.specfun import (
    AIRY_ASYMPTOTIC_RADIUS,
    airy_Ai,
    airy_log_derivative_complex,
    airy_zero,
    airy_zeros,
    fresnel_CS,
    fresnel_F,
    log_airy_complex,
)


class TestFresnel:
    """Test the exponential and real Fresnel integrals."""

    def test_zero(self):
        """Test F(0) = 0."""
        assert fresnel_F(0.0) == 0

    def test_matches_quadrature(self):
        """Test C and S against direct numerical integration."""
        for x in (0.3, 1.2, 2.7):
            c_ref, _ = integrate.quad(lambda t: math.cos(t * t), 0.0, x, epsabs=1e-14)
            s_ref, _ = integrate.quad(lambda t: math.sin(t * t), 0.0, x, epsabs=1e-14)
            c, s = fresnel_CS(x)
            assert c == pytest.approx(c_ref, abs=1e-12)
            assert s == pytest.approx(s_ref, abs=1e-12)

    def test_random_points_match_quadrature(self):
        """Test F against adaptive quadrature on the real axis and on the ray e^{i pi/4} [0, 5]."""
        rng = np.random.default_rng(11)
        for x in rng.uniform(-5.0, 5.0, 100):
            re, _ = integrate.quad(lambda t: math.cos(t * t), 0.0, x, epsabs=1e-14, limit=200)
            im, _ = integrate.quad(lambda t: math.sin(t * t), 0.0, x, epsabs=1e-14, limit=200)
            assert abs(fresnel_F(x) - complex(re, im)) <= 1e-10
        eighth = np.exp(0.25j * math.pi)
        for r in rng.uniform(0.0, 5.0, 100):
            gauss, _ = integrate.quad(lambda t: math.exp(-t * t), 0.0, r, epsabs=1e-14)
            assert abs(fresnel_F(eighth * r) - eighth * gauss) <= 1e-10

    def test_exponential_form_agrees_with_real_pair(self):
        """Test F(x) = C(x) + i S(x) on the real axis."""
        x = np.linspace(-4.0, 4.0, 41)
        c, s = fresnel_CS(x)
        np.testing.assert_allclose(fresnel_F(x), c + 1j * s, atol=1e-12)

    def test_limit(self):
        """Test F(Z) tends to (sqrt(pi)/2) e^{i pi/4}."""
        limit = math.sqrt(math.pi) / 2.0 * np.exp(0.25j * math.pi)
        assert abs(fresnel_F(200.0) - limit) < 1e-2

    def test_value_at_one(self):
        """Test F(1) against its reference value."""
        assert fresnel_F(1.0) == pytest.approx(0.9045243 + 0.3102683j, abs=1e-7)

    def test_odd(self):
        """Test F(-Z) = -F(Z)."""
        assert fresnel_F(-1.3) == pytest.approx(-fresnel_F(1.3))


class TestAiry:
    """Test Airy zeros and complex log-Airy evaluation."""

    def test_first_zeros(self):
        """Test the first zeros against reference values."""
        assert airy_zero(1) == pytest.approx(-2.338107410459767, abs=1e-12)
        assert airy_zero(2) == pytest.approx(-4.087949444130970, abs=1e-12)
        np.testing.assert_allclose(airy_zeros(5), special.ai_zeros(5)[0], atol=1e-12)

    def test_zeros_decrease(self):
        """Test zeros are strictly decreasing."""
        assert np.all(np.diff(airy_zeros(10)) < 0)

    def test_invalid_index(self):
        """Test index 0 is rejected."""
        with pytest.raises(ValueError):
            airy_zero(0)

    def test_real_values(self):
        """Test Ai(0) and Ai'(0)."""
        ai, aip = airy_Ai(0.0)
        assert ai == pytest.approx(0.3550280538878172)
        assert aip == pytest.approx(-0.2588194037928068)

    def test_log_airy_near_branch(self):
        """Test exp(log Ai(w)) reproduces Ai(w) for moderate complex w."""
        w = np.array([1.0 + 1.0j, -0.5 + 2.0j, 3.0 - 0.5j])
        ai, aip, _, _ = special.airy(w)
        np.testing.assert_allclose(np.exp(log_airy_complex(w)), ai, rtol=1e-12)
        np.testing.assert_allclose(airy_log_derivative_complex(w), aip / ai, rtol=1e-12)

    def test_asymptotic_branch_continues_scaled_airy(self):
        """Test the asymptotic series against the scaled Airy function beyond the switch radius."""
        w = 1.2 * AIRY_ASYMPTOTIC_RADIUS * np.exp(1j * np.array([0.0, 1.0, 2.0]))
        eai, eaip, _, _ = special.airye(w)
        reference = np.log(eai) - (2.0 / 3.0) * w * np.sqrt(w)
        np.testing.assert_allclose(log_airy_complex(w), reference, atol=1e-7)
        np.testing.assert_allclose(airy_log_derivative_complex(w), eaip / eai, rtol=1e-7)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
