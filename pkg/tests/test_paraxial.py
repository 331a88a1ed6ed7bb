"""Tests for paraxial slit patterns, the focusing constant and the focusing height."""

import math
import numpy as np
import pytest
import sys
from pathlib import Path
from scipy import integrate

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from gravidiff.models import (
    Aperture,
    BeamConfig,
    Direction,
    DomainError,
    FieldStrength,
    Grid,
    UNIT_PARTICLE,
    UnitsMode,
    get_species,
)
from gravidiff.paraxial import (
    PAPER_FOCUS_CONSTANT,
    PUBLISHED_FOCUS_ESTIMATES,
    aperture_wave,
    double_slit_terms,
    focus_constant,
    focus_constant_estimate,
    focus_height,
    focus_root,
    focus_root_by_maximization,
    fresnel_amplitude,
    incident_wave,
    on_axis_amplitude,
    pattern_grid,
    propagation_time,
    slit_amplitude,
)
from gravidiff.presets import get_figure_preset
from gravidiff.quasitime import QuasiTimeMap
from gravidiff.reference import free_fresnel_pattern

QMAP = QuasiTimeMap(E=2.0, F=5.0, m_i=1.0)
SINGLE = Aperture.single(1.0)
DOUBLE = Aperture.double(1.0, 1.0)


class TestApertureWave:
    """Test the normalized aperture function."""

    def test_unit_norm(self):
        """Test both apertures are normalized."""
        assert aperture_wave(SINGLE).norm() == pytest.approx(1.0)
        assert aperture_wave(DOUBLE).norm() == pytest.approx(1.0)

    def test_edges_take_half_height(self):
        """Test values inside, on the edge and outside a slit."""
        wave = aperture_wave(SINGLE)
        assert list(wave(np.array([0.0, 0.5, 0.7]))) == [1.0, 0.5, 0.0]
        double = aperture_wave(DOUBLE)
        assert double(np.array([1.0]))[0] == pytest.approx(1.0 / math.sqrt(2.0))
        assert double(np.array([0.0]))[0] == 0.0

    def test_zero_quasi_time_returns_aperture(self):
        """Test the pattern at s = 0 is the aperture itself."""
        x = np.linspace(-2.0, 2.0, 9)
        np.testing.assert_allclose(fresnel_amplitude(x, 0.0, DOUBLE), aperture_wave(DOUBLE)(x))

    def test_short_quasi_time_recovers_aperture(self):
        """Test the L2 distance to the aperture is small at s = 1e-6 m L^2 / hbar."""
        x = np.linspace(-1.5, 1.5, 30001)
        psi = fresnel_amplitude(x, 1e-6, SINGLE)
        distance = math.sqrt(integrate.simpson(np.abs(psi - aperture_wave(SINGLE)(x)) ** 2, x=x))
        assert distance <= 0.05


class TestPropagationTime:
    """Test quasi-time along the beam."""

    def test_upstream_rejected(self):
        """Test heights upstream of the plate are rejected."""
        with pytest.raises(DomainError):
            propagation_time(0.1, QMAP)
        with pytest.raises(DomainError):
            propagation_time(-0.1, QMAP, Direction.UPWARD)

    def test_upward_beyond_turning_point_is_damped(self):
        """Test the upward continuation past z_t has a negative imaginary part."""
        s = propagation_time(1.0, QMAP, Direction.UPWARD)
        assert s.imag < 0
        assert s.real == pytest.approx(0.4)

    def test_evanescent_decay_above_turning_point(self):
        """Test the upward beam decays monotonically on axis beyond z_t."""
        preset = get_figure_preset("fig3")
        qmap = QuasiTimeMap(E=preset.E, F=preset.F, m_i=preset.m)
        heights = [1.0, 3.0, 10.0, 30.0]
        values = [abs(slit_amplitude(0.0, z, preset.aperture, qmap, Direction.UPWARD)) for z in heights]
        assert all(later < earlier for earlier, later in zip(values, values[1:]))
        # power-law tail
        assert values[-1] > 0.1


class TestPattern:
    """Test paraxial patterns."""

    def test_free_limit_matches_real_fresnel_form(self):
        """Test F = 0 patterns against the real Fresnel integral closed form."""
        free = QuasiTimeMap(E=2.0, F=0.0, m_i=1.0)
        x = np.linspace(-3.0, 3.0, 31)
        for aperture in (SINGLE, DOUBLE):
            np.testing.assert_allclose(
                slit_amplitude(x, -0.4, aperture, free),
                free_fresnel_pattern(x, -0.4, aperture, E=2.0),
                atol=1e-12,
            )

    def test_coincident_slits_match_single_slit(self):
        """Test the four-term sum at a = 0 is sqrt(2) times the single slit."""
        x = np.linspace(-2.0, 2.0, 41)
        for s in (0.05, 0.2, 0.3 - 0.1j):
            np.testing.assert_allclose(
                double_slit_terms(x, s, 1.0, 0.0),
                math.sqrt(2.0) * fresnel_amplitude(x, s, SINGLE),
                atol=1e-13,
            )

    def test_norm_is_conserved(self):
        """Test the transverse norm stays one below the plate."""
        x = np.linspace(-12.0, 12.0, 24001)
        psi = slit_amplitude(x, -0.1, SINGLE, QMAP)
        norm = integrate.simpson(np.abs(psi) ** 2, x=x)
        assert norm == pytest.approx(1.0, abs=2e-2)

    def test_symmetric_in_x(self):
        """Test single- and double-slit patterns are even in x."""
        x = np.linspace(0.0, 2.5, 11)
        for aperture in (SINGLE, DOUBLE):
            np.testing.assert_allclose(
                slit_amplitude(x, -0.3, aperture, QMAP),
                slit_amplitude(-x, -0.3, aperture, QMAP),
                atol=1e-13,
            )

    def test_on_axis_closed_form(self):
        """Test the on-axis closed form against the general pattern."""
        for z in (-0.05, -0.1162, -0.5):
            assert on_axis_amplitude(z, 1.0, QMAP) == pytest.approx(slit_amplitude(0.0, z, SINGLE, QMAP))
        assert on_axis_amplitude(0.0, 1.0, QMAP) == pytest.approx(1.0)

    def test_grid_rejects_upstream_without_incident(self):
        """Test grids reaching above the plate need the incident-wave fill."""
        grid = Grid(x_min=-1.0, x_max=1.0, nx=5, z_min=-0.2, z_max=0.2, nz=5)
        with pytest.raises(DomainError):
            pattern_grid(SINGLE, QMAP, grid)
        field = pattern_grid(SINGLE, QMAP, grid, include_incident=True)
        upstream = field.amplitudes[-1]
        np.testing.assert_allclose(upstream, upstream[0])
        assert upstream[0] == pytest.approx(complex(incident_wave(0.2, QMAP)))

    def test_real_branch_only(self):
        """Test grids crossing the turning point can be rejected."""
        grid = Grid(x_min=2.0, x_max=3.0, nx=3, z_min=0.0, z_max=1.0, nz=5)
        with pytest.raises(DomainError):
            pattern_grid(DOUBLE, QMAP, grid, direction=Direction.UPWARD, real_branch_only=True)
        field = pattern_grid(DOUBLE, QMAP, grid, direction=Direction.UPWARD)
        assert np.all(np.isfinite(field.amplitudes))

    def test_incident_wave_intensity(self):
        """Test the incident intensity follows k(0)/k(z) and vanishes past z_t."""
        assert abs(incident_wave(0.0, QMAP)) == pytest.approx(1.0)
        assert abs(incident_wave(0.3, QMAP)) ** 2 == pytest.approx(2.0 / math.sqrt(2.0 * 0.5))
        assert incident_wave(0.5, QMAP) == 0

    def test_thread_count_does_not_change_result(self):
        """Test row evaluation is independent of the thread count."""
        grid = Grid(x_min=-2.0, x_max=2.0, nx=21, z_min=-0.4, z_max=0.0, nz=9)
        one = pattern_grid(DOUBLE, QMAP, grid, threads=1).amplitudes
        four = pattern_grid(DOUBLE, QMAP, grid, threads=4).amplitudes
        assert np.array_equal(one, four)


class TestFocusConstant:
    """Test the focusing root and constant."""

    def test_computed_value(self):
        """Test c* = 1/(8 Z*^2) against its known value."""
        assert focus_root() == pytest.approx(1.51573, abs=1e-4)
        assert focus_constant() == pytest.approx(0.05441, abs=5e-5)

    def test_independent_maximization(self):
        """Test the root agrees with direct maximization of |F(Z)|^2."""
        assert focus_root_by_maximization() == pytest.approx(focus_root(), abs=1e-6)

    def test_sources(self):
        """Test the published constant and unknown sources."""
        assert focus_constant("paper") == PAPER_FOCUS_CONSTANT
        with pytest.raises(ValueError):
            focus_constant("guess")

    def test_estimate(self):
        """Test the Cornu-spiral estimate 1/(6 pi) lies within 3 percent of c*."""
        assert focus_constant_estimate("cornu") == pytest.approx(1.0 / (6.0 * math.pi))
        assert focus_constant_estimate() == pytest.approx(focus_constant(), rel=0.03)

    def test_published_estimates(self):
        """Test both estimates against their published roundings."""
        for method, published in PUBLISHED_FOCUS_ESTIMATES.items():
            assert focus_constant_estimate(method) == pytest.approx(published, rel=0.03)
        asymptotic = focus_constant_estimate("asymptotic")
        assert asymptotic == pytest.approx(0.05361, abs=2e-4)
        assert round(asymptotic, 3) == PUBLISHED_FOCUS_ESTIMATES["asymptotic"]
        with pytest.raises(ValueError):
            focus_constant_estimate("series")


class TestFocusHeight:
    """Test the focusing height."""

    def test_model_units_single_slit(self):
        """Test the focus of the E = 2, F = 5, L = 1 single slit."""
        report = focus_height(UNIT_PARTICLE, FieldStrength(5.0), BeamConfig(total_energy=2.0), 1.0)
        assert report.z_star == pytest.approx(-0.11622, abs=2e-4)
        assert report.z_dimless == pytest.approx(-0.0581, abs=2e-4)
        assert report.tau_star == pytest.approx(report.c_star)

    def test_focus_is_on_axis_maximum(self):
        """Test the on-axis intensity peaks at the focusing height."""
        report = focus_height(UNIT_PARTICLE, FieldStrength(5.0), BeamConfig(total_energy=2.0), 1.0)
        z = np.linspace(-0.3, -0.02, 2801)
        intensity = np.array([abs(on_axis_amplitude(zi, 1.0, QMAP)) ** 2 for zi in z])
        assert z[np.argmax(intensity)] == pytest.approx(report.z_star, abs=2e-4)

    def test_gravity_moves_focus_deeper_than_free(self):
        """Test the focus lies below the free focus -c* for F > 0."""
        report = focus_height(UNIT_PARTICLE, FieldStrength(5.0), BeamConfig(total_energy=2.0), 1.0)
        assert report.z_dimless < -report.c_star

    def test_energy_independent_quantum_term(self):
        """Test z_quantum = -F tau*^2 / 2m."""
        report = focus_height(UNIT_PARTICLE, FieldStrength(5.0), BeamConfig(total_energy=2.0), 1.0)
        assert report.z_quantum == pytest.approx(-2.5 * report.tau_star ** 2)

    def test_si_neutron(self):
        """Test a UCN focus in SI units is negative and finite."""
        beam = BeamConfig(kinetic_energy=3.0e-7 * 1.602176634e-19)
        report = focus_height(get_species("neutron"), FieldStrength(), beam, 1e-3, units=UnitsMode.SI,
                              c_star=PAPER_FOCUS_CONSTANT)
        assert report.z_star == pytest.approx(-10.34, rel=0.03)

    def test_invalid_inputs(self):
        """Test F <= 0 and L <= 0 are rejected."""
        beam = BeamConfig(total_energy=2.0)
        with pytest.raises(DomainError):
            focus_height(UNIT_PARTICLE, FieldStrength(0.0), beam, 1.0)
        with pytest.raises(DomainError):
            focus_height(UNIT_PARTICLE, FieldStrength(5.0), beam, 0.0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
