"""Tests for the quantum bouncer, falling packets and other cross-check oracles."""

import math
import numpy as np
import pytest
import sys
from pathlib import Path
from scipy import integrate

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from gravidiff.models import EV, DomainError, FieldStrength, Species, UNIT_PARTICLE, UnitsMode, get_species
from gravidiff.reference import (
    GaussianPacket,
    InterferometerConfig,
    LevelBasis,
    bohr_frequency,
    bouncer_density,
    bouncer_eigenfunction,
    bouncer_kappa,
    bouncer_levels,
    bouncer_norm,
    bouncer_state,
    bouncer_support,
    falling_packet,
    free_halfspace_kernel,
    gaussian_packet,
    interferometer_phase,
)

UNIT_FIELD = FieldStrength(1.0)


class TestBouncerLevels:
    """Test the bouncer spectrum in its three bases."""

    def test_exact_ground_state(self):
        """Test E_1 = |a_1| (hbar^2 F^2 / 2m)^(1/3) in model units."""
        levels = bouncer_levels(3, UNIT_PARTICLE, UNIT_FIELD)
        assert levels[0] == pytest.approx(2.338107410459767 * 0.5 ** (1.0 / 3.0))
        assert np.all(np.diff(levels) > 0)

    def test_neutron_ground_state(self):
        """Test the neutron ground state is about 1.41 peV."""
        levels = bouncer_levels(1, get_species("neutron"), FieldStrength(), units=UnitsMode.SI)
        assert levels[0] / EV == pytest.approx(1.407e-12, rel=1e-2)

    def test_textbook_wkb_close_to_exact(self):
        """Test the Bohr-Sommerfeld levels lie within one percent of the exact ones."""
        exact = bouncer_levels(5, UNIT_PARTICLE, UNIT_FIELD, LevelBasis.EXACT_AIRY)
        wkb = bouncer_levels(5, UNIT_PARTICLE, UNIT_FIELD, LevelBasis.WKB_TEXTBOOK)
        np.testing.assert_allclose(wkb, exact, rtol=1e-2)

    def test_quoted_wkb_is_about_half(self):
        """Test the quoted bracket lies about a factor two below the exact levels."""
        exact = bouncer_levels(5, UNIT_PARTICLE, UNIT_FIELD, LevelBasis.EXACT_AIRY)
        quoted = bouncer_levels(5, UNIT_PARTICLE, UNIT_FIELD, LevelBasis.WKB_PAPER)
        np.testing.assert_allclose(exact / quoted, 2.0, rtol=2e-2)

    def test_invalid(self):
        """Test n_max < 1 and F <= 0 are rejected."""
        with pytest.raises(DomainError):
            bouncer_levels(0, UNIT_PARTICLE, UNIT_FIELD)
        with pytest.raises(DomainError):
            bouncer_levels(2, UNIT_PARTICLE, FieldStrength(0.0))

    def test_bohr_frequency(self):
        """Test omega_nn' = (E_n - E_n') / hbar and zero on the diagonal."""
        levels = bouncer_levels(3, UNIT_PARTICLE, UNIT_FIELD)
        assert bohr_frequency(3, 1, UNIT_PARTICLE, UNIT_FIELD) == pytest.approx(levels[2] - levels[0])
        assert bohr_frequency(1, 3, UNIT_PARTICLE, UNIT_FIELD) == pytest.approx(levels[0] - levels[2])
        assert bohr_frequency(2, 2, UNIT_PARTICLE, UNIT_FIELD) == 0.0
        with pytest.raises(DomainError):
            bohr_frequency(0, 1, UNIT_PARTICLE, UNIT_FIELD)


class TestBouncerStates:
    """Test eigenfunctions and superpositions."""

    def test_eigenfunction_normalized_and_zero_below_floor(self):
        """Test psi_n is normalized on z >= 0 and vanishes below."""
        kappa = bouncer_kappa(UNIT_PARTICLE, UNIT_FIELD)
        z = np.linspace(0.0, 20.0 / kappa, 8001)
        for n in (1, 3):
            psi = bouncer_eigenfunction(n, z, UNIT_PARTICLE, UNIT_FIELD)
            assert integrate.simpson(psi ** 2, x=z) == pytest.approx(1.0, abs=1e-6)
            assert abs(psi[0]) < 1e-10
        assert bouncer_eigenfunction(1, np.array([-1.0]), UNIT_PARTICLE, UNIT_FIELD)[0] == 0.0

    def test_state_is_normalized(self):
        """Test coefficients are normalized on construction."""
        state = bouncer_state([1.0, 1.0j, 0.5], UNIT_PARTICLE, UNIT_FIELD)
        assert np.sum(np.abs(state.coefficients) ** 2) == pytest.approx(1.0)
        with pytest.raises(DomainError):
            bouncer_state([0.0, 0.0], UNIT_PARTICLE, UNIT_FIELD)

    def test_norm_is_conserved(self):
        """Test the density integrates to one at several times."""
        state = bouncer_state([1.0, 1.0], UNIT_PARTICLE, UNIT_FIELD)
        for t in (0.0, 1.3, 7.0):
            assert bouncer_norm(state, t) == pytest.approx(1.0, abs=1e-6)

    def test_density_revives_with_bohr_period(self):
        """Test a two-level density is periodic with 2 pi / omega_21."""
        state = bouncer_state([1.0, 1.0], UNIT_PARTICLE, UNIT_FIELD)
        period = 2.0 * math.pi / bohr_frequency(2, 1, UNIT_PARTICLE, UNIT_FIELD)
        z = np.linspace(0.0, bouncer_support(state), 401)
        np.testing.assert_allclose(bouncer_density(state, z, 0.3 + period), bouncer_density(state, z, 0.3),
                                   atol=1e-10)
        assert not np.allclose(bouncer_density(state, z, 0.3 + period / 2), bouncer_density(state, z, 0.3))


class TestFallingPacket:
    """Test Gaussian packets in a linear potential."""

    def test_free_packet_normalized(self):
        """Test the packet keeps unit norm."""
        z = np.linspace(-30.0, 30.0, 6001)
        psi = gaussian_packet(GaussianPacket(0.0, 0.7, 1.0), z, 2.0, m_i=1.0)
        assert integrate.simpson(np.abs(psi) ** 2, x=z) == pytest.approx(1.0, abs=1e-8)

    def test_field_is_translation_plus_phase(self):
        """Test the falling packet is the free one translated by F t^2 / 2m times a phase."""
        check = falling_packet(GaussianPacket(0.5, 0.3, 1.0), 2.0, UNIT_PARTICLE, FieldStrength(1.5))
        assert check.density_deviation < 1e-12
        assert check.phase_deviation < 1e-8
        assert check.centroid == pytest.approx(check.expected_centroid, abs=1e-6)

    def test_wep_violating_species(self):
        """Test the translation uses F / m_i with F = m_g g."""
        species = Species("heavy", 1.0, 2.0)
        check = falling_packet(GaussianPacket(0.0, 0.0, 1.0), 1.0, species, FieldStrength(1.0))
        assert check.expected_centroid == pytest.approx(-1.0)
        assert check.centroid == pytest.approx(-1.0, abs=1e-6)

    def test_invalid_width(self):
        """Test non-positive widths are rejected."""
        with pytest.raises(DomainError):
            GaussianPacket(sigma=0.0)


class TestOtherOracles:
    """Test the interferometer phase and the free half-space kernel."""

    def test_interferometer_phase(self):
        """Test phi = m_i F A / hbar^2."""
        config = InterferometerConfig(3.0, UNIT_PARTICLE, FieldStrength(2.0))
        assert interferometer_phase(config) == pytest.approx(6.0)
        with pytest.raises(DomainError):
            InterferometerConfig(-1.0, UNIT_PARTICLE, FieldStrength(2.0))

    def test_halfspace_kernel_far_field(self):
        """Test the kernel magnitude falls off like r^(-1/2) on a ray."""
        near = abs(free_halfspace_kernel(30.0, -40.0, 2.0))
        far = abs(free_halfspace_kernel(60.0, -80.0, 2.0))
        assert far / near == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-2)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
