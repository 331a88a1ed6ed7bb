"""Integration tests for the complete diffraction pipeline."""

import pytest
import sys
from pathlib import Path

import numpy as np
import pandas as pd

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from gravidiff.config import Config
from gravidiff.export import FIELD_COLUMNS, field_to_frame, table_to_frame, write_csv, write_json
from gravidiff.metrology import table1_generate
from gravidiff.models import BeamConfig, DomainError, FieldStrength, Grid, UNIT_PARTICLE
from gravidiff.paraxial import focus_constant, focus_height, pattern_grid
from gravidiff.presets import FIGURE_PRESETS, get_figure_preset, get_nearzone_preset
from gravidiff.quasitime import QuasiTimeMap
from gravidiff.sampling import ComplexAmplitudeField, evaluate_rows


class TestIntegration:
    """Integration tests for complete pipeline."""

    def test_end_to_end_focus_pipeline(self):
        """Test preset -> grid -> pattern -> frame, with the focus on the intensity ridge."""
        config = Config()
        preset = get_figure_preset("fig2")
        qmap = QuasiTimeMap(E=preset.E, F=preset.F, m_i=preset.m)

        field = pattern_grid(preset.aperture, qmap, preset.grid(), threads=config.threads)
        assert field.amplitudes.shape == (preset.nz, preset.nx)

        # Step 2: focus from the closed form
        report = focus_height(UNIT_PARTICLE, FieldStrength(preset.F), BeamConfig(total_energy=preset.E),
                              preset.aperture.L, c_star=focus_constant(config.focus_constant_source))

        # Step 3: the on-axis column peaks there
        axis = field.column(0.0)
        z_peak = preset.grid().zs()[int(np.argmax(np.abs(axis) ** 2))]
        dz = preset.grid().zs()[1] - preset.grid().zs()[0]
        assert abs(z_peak - report.z_star) <= dz

        # Step 4: export in the caption's dimensionless variables
        df = field_to_frame(field, x_unit=preset.aperture.L, z_unit=preset.z_unit())
        assert list(df.columns) == FIELD_COLUMNS
        assert len(df) == preset.nx * preset.nz
        peak_row = df.loc[df["intensity"][df["x_dimless"].abs() < 1e-12].idxmax()]
        assert peak_row["z_dimless"] == pytest.approx(report.z_dimless, abs=2e-3)

    def test_gravity_deepens_the_focus(self):
        """Test the field-free preset focuses closer to the plate."""
        with_field = get_figure_preset("fig2")
        free = get_figure_preset("fig2-free")
        peaks = []
        for preset in (with_field, free):
            qmap = QuasiTimeMap(E=preset.E, F=preset.F, m_i=preset.m)
            field = pattern_grid(preset.aperture, qmap, preset.grid())
            peaks.append(preset.grid().zs()[int(np.argmax(field.intensity[:, preset.nx // 2]))])
        assert peaks[0] < peaks[1]
        assert peaks[1] / with_field.z_unit() == pytest.approx(-focus_constant(), abs=2e-3)

    def test_presets_are_consistent(self):
        """Test every figure preset builds a valid grid and scale."""
        for name, preset in FIGURE_PRESETS.items():
            assert preset.name == name
            assert preset.z_unit() > 0
            grid = preset.grid()
            assert grid.nx == preset.nx
        assert get_figure_preset("fig3").z_unit() == pytest.approx(2.0)
        assert get_nearzone_preset("fig4").grid().z_max == 0.0
        with pytest.raises(DomainError):
            get_nearzone_preset("fig5")


class TestExport:
    """Test CSV and JSON writers."""

    def test_field_frame_order(self):
        """Test z-major ordering and intensity column."""
        grid = Grid(x_min=0.0, x_max=1.0, nx=2, z_min=-1.0, z_max=0.0, nz=2)
        field = ComplexAmplitudeField(grid, np.array([[1 + 1j, 2], [3j, 0]]))
        df = field_to_frame(field)
        assert list(df["x_dimless"]) == [0.0, 1.0, 0.0, 1.0]
        assert list(df["z_dimless"]) == [-1.0, -1.0, 0.0, 0.0]
        np.testing.assert_allclose(df["intensity"], [2.0, 4.0, 9.0, 0.0])

    def test_csv_full_precision(self, tmp_path):
        """Test floats survive the CSV round trip exactly."""
        df = pd.DataFrame({"x_dimless": [0.1], "z_dimless": [1 / 3], "re": [np.pi], "im": [-1e-300],
                           "intensity": [2.0 ** 0.5]})
        out = tmp_path / "values.csv"
        write_csv(df, str(out))
        back = pd.read_csv(out, float_precision="round_trip")
        assert back.equals(df)

    def test_table_flags_joined(self):
        """Test flags are serialized as a semicolon list."""
        rows = [r.as_dict() for r in table1_generate(c_star=0.055)]
        df = table_to_frame(rows)
        cs = df[df["label"] == "Cs"].iloc[0]
        assert cs["flags"] == "printed_energy_not_thermal"
        assert df[df["label"] == "NH3 300 K"].iloc[0]["flags"] == ""

    def test_json(self, tmp_path):
        """Test JSON output to a file."""
        out = tmp_path / "report.json"
        write_json({"c_star": 0.055, "rows": [1, 2]}, str(out))
        assert out.read_text().endswith("\n")
        assert '"c_star": 0.055' in out.read_text()


class TestSampling:
    """Test the grid container and row evaluation."""

    def test_shape_and_finiteness(self):
        """Test mismatched or non-finite arrays are rejected."""
        grid = Grid(x_min=0.0, x_max=1.0, nx=2, z_min=-1.0, z_max=0.0, nz=2)
        with pytest.raises(ValueError):
            ComplexAmplitudeField(grid, np.zeros((2, 3), dtype=complex))
        with pytest.raises(ValueError):
            ComplexAmplitudeField(grid, np.array([[np.nan, 0], [0, 0]], dtype=complex))

    def test_rows_in_order(self):
        """Test rows come back in z order for any thread count."""
        grid = Grid(x_min=0.0, x_max=1.0, nx=3, z_min=-2.0, z_max=0.0, nz=9)
        for threads in (1, 4):
            values = evaluate_rows(lambda z, xs: z + 1j * xs, grid, threads)
            np.testing.assert_array_equal(values.real[:, 0], grid.zs())


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
