"""Command-line interface for gravidiff."""

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path
from typing import Optional

from .config import Config, ConfigLoader, load_config, setup_logging
from .export import field_to_frame, table_to_frame, write_csv, write_json
from .metrology import (
    WepVariation,
    energy_spread_width,
    sensitivity_report,
    table1_generate,
)
from .models import (
    EV,
    Aperture,
    BeamConfig,
    Direction,
    DomainError,
    FieldStrength,
    SPECIES_PRESETS,
    Species,
    UNIT_PARTICLE,
    UnitsMode,
    convert_beam,
    get_species,
    kinetic_energy_from_temperature,
    species_from_mapping,
)
from .nonparaxial import NonparaxialParams, nearzone_grid
from .paraxial import focus_constant, focus_height, pattern_grid
from .presets import FigurePreset, get_figure_preset, get_nearzone_preset, NearZonePreset
from .quasitime import QuasiTimeMap
from .reference import (
    InterferometerConfig,
    LevelBasis,
    bohr_frequency,
    bouncer_levels,
    interferometer_phase,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_SELFTEST = 3

CONFIG_KEYS = ("log_level", "units", "g", "threads", "focus_constant_source",
               "kappa_strategy", "energy_source")


class UsageArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config_from_args(args: argparse.Namespace) -> Config:
    overrides = {key: getattr(args, key, None) for key in CONFIG_KEYS}
    config = load_config(args.config, overrides)
    setup_logging(config.log_level)
    return config


def _fail(command: str, error: Exception) -> int:
    logger.error(f"Error during {command}: {error}", exc_info=logger.isEnabledFor(logging.DEBUG))
    print(f"Error: {error}", file=sys.stderr)
    return EXIT_DOMAIN if isinstance(error, DomainError) else EXIT_USAGE


def resolve_species(value: Optional[str], units: UnitsMode) -> Species:
    """
    Species from a preset name or a key=value file (name, m_inertial, m_grav).

    Without a value the unit particle is used in model units and the neutron in SI.
    """
    if not value:
        return UNIT_PARTICLE if units is UnitsMode.MODEL else SPECIES_PRESETS["neutron"]
    if Path(value).is_file():
        return species_from_mapping(ConfigLoader(value).load_values())
    return get_species(value)


def _energy(value: Optional[float], units: UnitsMode) -> Optional[float]:
    # SI energies are given on the command line in eV
    if value is None:
        return None
    return value * EV if units is UnitsMode.SI else value


def _beam_from_args(args: argparse.Namespace, units: UnitsMode) -> BeamConfig:
    given = [v is not None for v in (args.energy, args.kinetic_energy, args.speed, args.temperature)]
    if sum(given) != 1:
        raise ValueError("Give exactly one of --energy, --kinetic-energy, --speed, --temperature")
    if args.temperature is not None:
        return BeamConfig(kinetic_energy=kinetic_energy_from_temperature(args.temperature, units), z0=args.z0)
    return BeamConfig(
        total_energy=_energy(args.energy, units),
        kinetic_energy=_energy(args.kinetic_energy, units),
        speed=args.speed,
        z0=args.z0,
    )


def _require_model_units(config: Config, command: str) -> None:
    """Figure grids are laid out in model units (hbar = 1)."""
    if config.units_mode is not UnitsMode.MODEL:
        raise ValueError(f"{command} works in model units; --units {config.units} is not supported")


def _figure_from_args(args: argparse.Namespace) -> FigurePreset:
    if args.preset:
        preset = get_figure_preset(args.preset)
    else:
        if args.E is None or args.F is None:
            raise ValueError("Without --preset, --E and --F are required")
        kind = args.kind or "single"
        L = args.L if args.L is not None else 1.0
        aperture = Aperture.double(L, args.a if args.a is not None else L) if kind == "double" else Aperture.single(L)
        preset = FigurePreset("custom", aperture, E=args.E, F=args.F)

    changes = {}
    if args.kind or args.L is not None or args.a is not None:
        kind = args.kind or preset.aperture.kind.value
        L = args.L if args.L is not None else preset.aperture.L
        a = args.a if args.a is not None else (preset.aperture.a or L)
        changes["aperture"] = Aperture.double(L, a) if kind == "double" else Aperture.single(L)
    for name in ("E", "F", "nx", "nz", "axis"):
        if getattr(args, name) is not None:
            changes[name] = getattr(args, name)
    if args.mass is not None:
        changes["m"] = args.mass
    if args.direction is not None:
        changes["direction"] = Direction(args.direction)
    if args.x_range is not None:
        changes["x_range"] = tuple(args.x_range)
    if args.z_range is not None:
        changes["z_range"] = tuple(args.z_range)
    return dataclasses.replace(preset, **changes) if changes else preset


def cmd_pattern(args: argparse.Namespace) -> int:
    """
    Paraxial slit pattern on a grid, written as CSV in the figure's dimensionless axes.

    Args:
        args: Parsed command-line arguments

    Returns:
        Exit code
    """
    config = _config_from_args(args)
    try:
        _require_model_units(config, "pattern")
        figure = _figure_from_args(args)
        logger.info(f"Computing pattern '{figure.name}'")
        qmap = QuasiTimeMap(E=figure.E, F=figure.F, m_i=figure.m)
        grid = figure.grid()
        field = pattern_grid(
            figure.aperture, qmap, grid,
            direction=figure.direction,
            include_incident=args.incident,
            threads=config.threads,
        )
        df = field_to_frame(field, x_unit=figure.aperture.L, z_unit=figure.z_unit())
        write_csv(df, args.out)
        return EXIT_OK
    except Exception as e:
        return _fail("pattern", e)


def cmd_nearzone(args: argparse.Namespace) -> int:
    """Near-zone single-slit wave (Airy kernel) below the plate, as CSV."""
    config = _config_from_args(args)
    try:
        _require_model_units(config, "nearzone")
        preset = get_nearzone_preset(args.preset) if args.preset else NearZonePreset("custom")
        changes = {name: getattr(args, name) for name in ("L", "E", "F", "nx", "nz")
                   if getattr(args, name) is not None}
        if args.mass is not None:
            changes["m"] = args.mass
        if args.x_range is not None:
            changes["x_range"] = tuple(args.x_range)
        if args.z_range is not None:
            changes["z_range"] = tuple(args.z_range)
        preset = dataclasses.replace(preset, **changes)

        params = NonparaxialParams(E=preset.E, F=preset.F, m_i=preset.m,
                                   kappa_strategy=config.kappa_strategy)
        field = nearzone_grid(preset.L, params, preset.grid(), threads=config.threads)
        df = field_to_frame(field, x_unit=preset.L, z_unit=1.0)
        write_csv(df, args.out)
        return EXIT_OK
    except Exception as e:
        return _fail("nearzone", e)


def cmd_focus(args: argparse.Namespace) -> int:
    """Focusing constant and focusing height of a single slit, as JSON."""
    config = _config_from_args(args)
    try:
        units = config.units_mode
        species = resolve_species(args.species, units)
        field = FieldStrength(config.g)
        beam = _beam_from_args(args, units)
        c_star = focus_constant(config.focus_constant_source)
        report = focus_height(species, field, beam, args.L, units=units, c_star=c_star)
        E, v, z0 = convert_beam(beam, species, field)
        payload = {
            "species": species.name,
            "m_inertial": species.m_inertial,
            "m_grav": species.m_grav,
            "units": units.value,
            "L": report.L,
            "g": report.g,
            "E": E,
            "v": v,
            "z0": z0,
            "c_star": report.c_star,
            "focus_constant_source": config.focus_constant_source,
            "tau_star": report.tau_star,
            "z_star": report.z_star,
            "z_quantum": report.z_quantum,
            "z_dimless": None if math.isnan(report.z_dimless) else report.z_dimless,
        }
        write_json(payload, args.out)
        return EXIT_OK
    except Exception as e:
        return _fail("focus", e)


def cmd_sensitivity(args: argparse.Namespace) -> int:
    """Equivalence-principle / gravimetry sensitivity report, as JSON."""
    config = _config_from_args(args)
    try:
        units = config.units_mode
        species = resolve_species(args.species, units)
        beam = _beam_from_args(args, units)
        if beam.kinetic_energy is None:
            raise ValueError("The sensitivity report needs --kinetic-energy or --temperature")
        variation = WepVariation(args.delta_g, args.delta_mg)
        c_star = focus_constant(config.focus_constant_source)
        report = sensitivity_report(species, FieldStrength(config.g), beam.kinetic_energy, args.L,
                                    variation, c_star=c_star, units=units)
        payload = {
            "species": species.name,
            "units": units.value,
            "L": report.L,
            "g": report.g,
            "E_kin": report.E_kin,
            "c_star": report.c_star,
            "epsilon": report.epsilon,
            "z_focus_0": report.z_focus_0,
            "z_focus_prime_0": report.z_focus_prime_0,
            "z_focus_shifted": report.z_focus_shifted,
            "z_focus_exact_shifted": report.z_focus_exact_shifted,
            "dz_dE": None if math.isinf(report.dz_dE) else report.dz_dE,
        }
        if args.delta_E is not None:
            payload["energy_spread_width"] = energy_spread_width(
                species, report.E_kin, args.L, _energy(args.delta_E, units), c_star, units
            )
        write_json(payload, args.out)
        return EXIT_OK
    except Exception as e:
        return _fail("sensitivity", e)


def cmd_table1(args: argparse.Namespace) -> int:
    """Beam-realization table with printed values and discrepancy flags."""
    config = _config_from_args(args)
    try:
        c_star = focus_constant(config.focus_constant_source)
        results = table1_generate(g=config.g, c_star=c_star, energy_source=config.energy_source)
        rows = [r.as_dict() for r in results]
        if args.format == "json":
            write_json({"c_star": c_star, "focus_constant_source": config.focus_constant_source,
                        "g": config.g, "rows": rows}, args.out)
        else:
            write_csv(table_to_frame(rows), args.out)
        return EXIT_OK
    except Exception as e:
        return _fail("table1", e)


def cmd_bounce(args: argparse.Namespace) -> int:
    """Quantum-bouncer levels and Bohr frequencies in every basis, as JSON."""
    config = _config_from_args(args)
    try:
        units = config.units_mode
        species = resolve_species(args.species, units)
        field = FieldStrength(config.g)
        bases = [LevelBasis(args.basis)] if args.basis else list(LevelBasis)
        payload = {"species": species.name, "units": units.value, "g": config.g, "bases": {}}
        for basis in bases:
            levels = bouncer_levels(args.n_max, species, field, basis, units)
            frequencies = [bohr_frequency(n, 1, species, field, basis, units)
                           for n in range(2, args.n_max + 1)]
            payload["bases"][basis.value] = {"levels": levels.tolist(), "omega_n1": frequencies}
        if args.area is not None:
            payload["interferometer_phase"] = interferometer_phase(
                InterferometerConfig(args.area, species, field), units
            )
        write_json(payload, args.out)
        return EXIT_OK
    except Exception as e:
        return _fail("bounce", e)


def cmd_selftest(args: argparse.Namespace) -> int:
    """Run the bundled test suite; exit 3 on failure."""
    config = _config_from_args(args)
    tests_dir = Path(__file__).resolve().parent.parent / "tests"
    if not tests_dir.is_dir():
        print(f"Error: test directory not found: {tests_dir}", file=sys.stderr)
        return EXIT_SELFTEST
    import pytest

    logger.info(f"Running self-test from {tests_dir} (threads={config.threads})")
    code = pytest.main([str(tests_dir), "-q", "-p", "no:cacheprovider"])
    return EXIT_OK if code == 0 else EXIT_SELFTEST


def _add_beam_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--species", help="Species preset name or key=value file")
    parser.add_argument("--energy", type=float, help="Total energy (eV in SI units)")
    parser.add_argument("--kinetic-energy", type=float, help="Kinetic energy at the source (eV in SI units)")
    parser.add_argument("--speed", type=float, help="Speed at the source")
    parser.add_argument("--temperature", type=float, help="Beam temperature; E_kin = 3 k_B T / 2")
    parser.add_argument("--z0", type=float, default=0.0, help="Source height (default: 0)")
    parser.add_argument("--L", type=float, required=True, help="Slit width")


def build_parser() -> argparse.ArgumentParser:
    parser = UsageArgumentParser(
        prog="gravidiff",
        description="Matter-wave slit diffraction in a uniform gravitational field",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Double-slit pattern of the first figure
  python -m gravidiff pattern --preset fig1 --out fig1.csv

  # Near-zone wave of a particle dropping from rest
  python -m gravidiff nearzone --preset fig4 --out fig4.csv

  # Focusing height of ultracold neutrons behind a 1 mm slit
  python -m gravidiff --units si focus --species neutron --kinetic-energy 3e-7 --L 1e-3

  # Beam-realization table as JSON
  python -m gravidiff table1 --format json
        """
    )

    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Set logging level (default: WARNING)")
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--units", choices=[u.value for u in UnitsMode], help="Unit convention")
    parser.add_argument("--g", type=float, help="Gravitational acceleration (default: 9.80665)")
    parser.add_argument("--threads", type=int, help="Worker threads for grid evaluation")
    parser.add_argument("--focus-constant", dest="focus_constant_source",
                        choices=["computed", "paper"], help="Focusing constant source")
    parser.add_argument("--kappa", dest="kappa_strategy", choices=["consistent", "paper-literal"],
                        help="Airy scale convention")
    parser.add_argument("--energy-source", choices=["printed", "thermal"],
                        help="Kinetic energies used for the table")

    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=UsageArgumentParser)

    pattern_parser = subparsers.add_parser("pattern", help="Paraxial slit pattern as CSV")
    pattern_parser.add_argument("--preset", help="fig1, fig1-free, fig2, fig2-free, fig3, fig3-low")
    pattern_parser.add_argument("--kind", choices=["single", "double"], help="Aperture kind")
    pattern_parser.add_argument("--L", type=float, help="Slit width")
    pattern_parser.add_argument("--a", type=float, help="Half separation of a double slit")
    pattern_parser.add_argument("--E", type=float, help="Energy")
    pattern_parser.add_argument("--F", type=float, help="Force")
    pattern_parser.add_argument("--mass", type=float, help="Inertial mass")
    pattern_parser.add_argument("--direction", choices=[d.value for d in Direction], help="Beam direction")
    pattern_parser.add_argument("--axis", choices=["energy", "field"], help="Dimensionless z axis")
    pattern_parser.add_argument("--x-range", type=float, nargs=2, help="x range in units of L")
    pattern_parser.add_argument("--z-range", type=float, nargs=2, help="z range in dimensionless units")
    pattern_parser.add_argument("--nx", type=int, help="Number of x nodes")
    pattern_parser.add_argument("--nz", type=int, help="Number of z nodes")
    pattern_parser.add_argument("--incident", action="store_true", help="Fill the upstream side with the incident wave")
    pattern_parser.add_argument("--out", "-o", help="Output CSV (default: stdout)")
    pattern_parser.set_defaults(func=cmd_pattern)

    nearzone_parser = subparsers.add_parser("nearzone", help="Near-zone single-slit wave as CSV")
    nearzone_parser.add_argument("--preset", help="fig4")
    nearzone_parser.add_argument("--L", type=float, help="Slit width")
    nearzone_parser.add_argument("--E", type=float, help="Energy")
    nearzone_parser.add_argument("--F", type=float, help="Force")
    nearzone_parser.add_argument("--mass", type=float, help="Inertial mass")
    nearzone_parser.add_argument("--x-range", type=float, nargs=2, help="x range in units of L")
    nearzone_parser.add_argument("--z-range", type=float, nargs=2, help="z range")
    nearzone_parser.add_argument("--nx", type=int, help="Number of x nodes")
    nearzone_parser.add_argument("--nz", type=int, help="Number of z nodes")
    nearzone_parser.add_argument("--out", "-o", help="Output CSV (default: stdout)")
    nearzone_parser.set_defaults(func=cmd_nearzone)

    focus_parser = subparsers.add_parser("focus", help="Focusing height of a single slit as JSON")
    _add_beam_arguments(focus_parser)
    focus_parser.add_argument("--out", "-o", help="Output JSON (default: stdout)")
    focus_parser.set_defaults(func=cmd_focus)

    sensitivity_parser = subparsers.add_parser("sensitivity", help="Sensitivity report as JSON")
    _add_beam_arguments(sensitivity_parser)
    sensitivity_parser.add_argument("--delta-g", type=float, default=0.0, help="Fractional change of g")
    sensitivity_parser.add_argument("--delta-mg", type=float, default=0.0,
                                    help="Fractional deviation of m_g from m_i")
    sensitivity_parser.add_argument("--delta-E", type=float, help="Energy spread (eV in SI units)")
    sensitivity_parser.add_argument("--out", "-o", help="Output JSON (default: stdout)")
    sensitivity_parser.set_defaults(func=cmd_sensitivity)

    table_parser = subparsers.add_parser("table1", help="Beam-realization table")
    table_parser.add_argument("--format", choices=["csv", "json"], default="csv", help="Output format")
    table_parser.add_argument("--out", "-o", help="Output file (default: stdout)")
    table_parser.set_defaults(func=cmd_table1)

    bounce_parser = subparsers.add_parser("bounce", help="Quantum-bouncer levels as JSON")
    bounce_parser.add_argument("--n-max", type=int, default=5, help="Number of levels (default: 5)")
    bounce_parser.add_argument("--basis", choices=[b.value for b in LevelBasis], help="Only this basis")
    bounce_parser.add_argument("--species", help="Species preset name or key=value file")
    bounce_parser.add_argument("--area", type=float, help="Interferometer area for the gravitational phase")
    bounce_parser.add_argument("--out", "-o", help="Output JSON (default: stdout)")
    bounce_parser.set_defaults(func=cmd_bounce)

    selftest_parser = subparsers.add_parser("selftest", help="Run the bundled test suite")
    selftest_parser.set_defaults(func=cmd_selftest)

    return parser


def main(argv: list = None) -> int:
    """
    Main entry point for CLI.

    Args:
        argv: Command-line arguments (defaults to sys.argv)

    Returns:
        Exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except ValueError as e:
        # configuration problems surface before logging is set up
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
