"""Figure presets and the beam-realization table rows."""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional

from .models import (
    Aperture,
    Direction,
    DomainError,
    Grid,
    get_species,
    Species,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FigurePreset:
    """
    Model-units parameters of a diffraction figure.

    axis: "energy" scales z by hbar/sqrt(2 m E) (Figs. 1-2), "field" by 2 hbar/(F m L^4).
    Grid ranges are given in those dimensionless variables; x in units of L.
    """

    name: str
    aperture: Aperture
    E: float
    F: float
    m: float = 1.0
    direction: Direction = Direction.DOWNWARD
    axis: str = "energy"
    x_range: tuple = (-3.0, 3.0)
    z_range: tuple = (-1.0, 0.0)
    nx: int = 121
    nz: int = 101

    def z_unit(self, hbar: float = 1.0) -> float:
        """Length corresponding to one unit of the dimensionless z axis."""
        if self.axis == "field":
            if self.F <= 0:
                raise DomainError("The field-scaled axis needs F > 0")
            return self.F * self.m * self.aperture.L ** 4 / (2.0 * hbar)
        return math.sqrt(2.0 * self.m * self.E) / hbar

    def grid(self, hbar: float = 1.0) -> Grid:
        zu = self.z_unit(hbar)
        L = self.aperture.L
        return Grid(
            x_min=self.x_range[0] * L, x_max=self.x_range[1] * L, nx=self.nx,
            z_min=self.z_range[0] * zu, z_max=self.z_range[1] * zu, nz=self.nz,
        )


_DOUBLE = Aperture.double(L=1.0, a=1.0)
_SINGLE = Aperture.single(L=1.0)

FIGURE_PRESETS: Dict[str, FigurePreset] = {
    "fig1": FigurePreset("fig1", _DOUBLE, E=2.0, F=5.0),
    "fig1-free": FigurePreset("fig1-free", _DOUBLE, E=2.0, F=0.0),
    "fig2": FigurePreset("fig2", _SINGLE, E=2.0, F=5.0, x_range=(-1.5, 1.5),
                         z_range=(-0.2, 0.0), nx=61, nz=201),
    "fig2-free": FigurePreset("fig2-free", _SINGLE, E=2.0, F=0.0, x_range=(-1.5, 1.5),
                              z_range=(-0.2, 0.0), nx=61, nz=201),
    "fig3": FigurePreset("fig3", _DOUBLE, E=3.0, F=4.0, direction=Direction.UPWARD,
                         axis="field", z_range=(0.0, 0.75), nz=151),
    "fig3-low": FigurePreset("fig3-low", _DOUBLE, E=2.0, F=4.0, direction=Direction.UPWARD,
                             axis="field", z_range=(0.0, 0.75), nz=151),
}


@dataclass(frozen=True)
class NearZonePreset:
    """Particle dropping from rest just below a single slit (model units)."""

    name: str
    L: float = 1.0
    E: float = 0.0
    F: float = 1.0
    m: float = 1.0
    x_range: tuple = (-1.0, 1.0)
    z_range: tuple = (-0.04, 0.0)
    nx: int = 81
    nz: int = 17

    def grid(self) -> Grid:
        return Grid(
            x_min=self.x_range[0] * self.L, x_max=self.x_range[1] * self.L, nx=self.nx,
            z_min=self.z_range[0], z_max=self.z_range[1], nz=self.nz,
        )


NEARZONE_PRESETS: Dict[str, NearZonePreset] = {
    "fig4": NearZonePreset("fig4"),
}


def get_figure_preset(name: str) -> FigurePreset:
    try:
        return FIGURE_PRESETS[name]
    except KeyError:
        raise DomainError(f"Unknown figure preset '{name}'. Known: {sorted(FIGURE_PRESETS)}")


def get_nearzone_preset(name: str) -> NearZonePreset:
    try:
        return NEARZONE_PRESETS[name]
    except KeyError:
        raise DomainError(f"Unknown near-zone preset '{name}'. Known: {sorted(NEARZONE_PRESETS)}")


@dataclass(frozen=True)
class TableRow:
    """One beam realization with its printed reference values (SI, energies in eV)."""

    label: str
    species_name: str
    beam_type: str
    T: Optional[float]
    L: float
    E_kin_eV: float
    z_focus_printed: float
    z_prime_printed: float

    @property
    def species(self) -> Species:
        return get_species(self.species_name)

    @property
    def is_bec(self) -> bool:
        return self.beam_type == "BEC"


# Time of flight quoted for the BEC rows
BEC_TIME_OF_FLIGHT = 10e-3

TABLE1_ROWS: List[TableRow] = [
    TableRow("n UCN", "neutron", "Nuclear", None, 1e-3, 3.00e-7, -10.34, 3.73),
    TableRow("n 20 K", "neutron", "Nuclear", 20.0, 1e-3, 2.58e-3, -6.17e5, 3.73),
    TableRow("n 300 K", "neutron", "Nuclear", 300.0, 1e-3, 3.87e-2, -2.38e3, 3.73),
    TableRow("NH3 77 K", "NH3", "Molecular", 77.0, 1e-5, 9.95e-3, -0.49, 1.07e-5),
    TableRow("NH3 300 K", "NH3", "Molecular", 300.0, 1e-5, 3.87e-2, -0.98, 1.07e-5),
    TableRow("NH3 1200 K", "NH3", "Molecular", 1200.0, 1e-5, 1.54e-1, -1.96, 1.07e-5),
    TableRow("Cs", "Cs", "Atomic", 1.0, 1e-4, 8.61e-5, -19.51, 6.59),
    TableRow("Rb BEC", "Rb", "BEC", 1.7e-7, 1e-4, 4.28e-11, -2.72, 2.71),
    TableRow("K BEC", "K", "BEC", 5.0e-7, 1e-4, 4.28e-11, -0.57, 0.56),
]
