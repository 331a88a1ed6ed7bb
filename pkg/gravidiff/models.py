"""Shared domain types, constants and species presets for gravidiff."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)


# SI constants (exact or CODATA 2018)
HBAR_SI = 1.054571817e-34  # J*s
K_B_SI = 1.380649e-23  # J/K
G_DEFAULT = 9.80665  # m/s^2
EV = 1.602176634e-19  # J
ATOMIC_MASS_UNIT = 1.66053907e-27  # kg


class DomainError(ValueError):
    """Raised when inputs leave the physical domain of an operation."""


class AiryPoleError(DomainError):
    """Raised when an Airy denominator vanishes or the quotient overflows."""


class AccuracyWarning(UserWarning):
    """Issued when a quadrature result misses its accuracy target."""


class UnitsMode(str, Enum):
    """Unit convention: raw figure numbers or SI."""

    MODEL = "model"
    SI = "si"

    @property
    def hbar(self) -> float:
        return 1.0 if self is UnitsMode.MODEL else HBAR_SI

    @property
    def k_b(self) -> float:
        return 1.0 if self is UnitsMode.MODEL else K_B_SI


class Direction(str, Enum):
    DOWNWARD = "downward"
    UPWARD = "upward"


class ApertureKind(str, Enum):
    SINGLE = "single"
    DOUBLE = "double"


@dataclass(frozen=True)
class Species:
    """A particle species with separately specified inertial and gravitational mass."""

    name: str
    m_inertial: float
    m_grav: float

    def __post_init__(self):
        if not (self.m_inertial > 0 and self.m_grav > 0):
            raise DomainError(
                f"Species '{self.name}' needs positive masses, got "
                f"m_inertial={self.m_inertial}, m_grav={self.m_grav}"
            )

    @classmethod
    def equivalent(cls, name: str, mass: float) -> "Species":
        """Species obeying the weak equivalence principle (m_g = m_i)."""
        return cls(name=name, m_inertial=mass, m_grav=mass)

    def with_inertial_mass(self, mass: float) -> "Species":
        return Species(self.name, mass, mass * self.m_grav / self.m_inertial)


SPECIES_PRESETS: Dict[str, Species] = {
    "neutron": Species.equivalent("neutron", 1.67492750e-27),
    "NH3": Species.equivalent("NH3", 17.03 * ATOMIC_MASS_UNIT),
    "Cs": Species.equivalent("Cs", 132.905 * ATOMIC_MASS_UNIT),
    "Rb": Species.equivalent("Rb", 86.909 * ATOMIC_MASS_UNIT),
    "K": Species.equivalent("K", 39.0983 * ATOMIC_MASS_UNIT),
}

# Model-units particle of the figure captions (m_i = m_g = 1)
UNIT_PARTICLE = Species.equivalent("unit", 1.0)


def get_species(name: str) -> Species:
    """
    Look up a species preset by name (case-insensitive).

    Args:
        name: Preset name such as 'neutron', 'Cs' or 'unit'

    Returns:
        The matching Species

    Raises:
        DomainError: If no preset has that name
    """
    if name.lower() == "unit":
        return UNIT_PARTICLE
    for key, species in SPECIES_PRESETS.items():
        if key.lower() == name.lower():
            return species
    raise DomainError(f"Unknown species '{name}'. Known: {sorted(SPECIES_PRESETS)} and 'unit'")


def species_from_mapping(values: Dict[str, str]) -> Species:
    """
    Build a species from parsed key=value pairs.

    m_grav defaults to m_inertial; a preset name alone is resolved from the registry.
    """
    name = str(values.get("name", "custom")).strip()
    if "m_inertial" not in values:
        return get_species(name)
    try:
        m_i = float(values["m_inertial"])
        m_g = float(values.get("m_grav", m_i))
    except (TypeError, ValueError) as e:
        raise DomainError(f"Species masses must be numeric: {e}")
    return Species(name=name, m_inertial=m_i, m_grav=m_g)


@dataclass(frozen=True)
class FieldStrength:
    """Uniform field: acceleration g acting on the gravitational mass."""

    g: float = G_DEFAULT

    def force(self, species: Species) -> float:
        # F = m_g * g
        return species.m_grav * self.g

    def require_positive(self, species: Species) -> float:
        force = self.force(species)
        if force <= 0:
            raise DomainError(f"The linear-potential branch needs F > 0, got F={force}")
        return force


@dataclass(frozen=True)
class BeamConfig:
    """
    Monochromatic beam, given by exactly one of total energy, kinetic energy or speed.

    z0 is the source height; the kinetic energy quoted with it is the one at the source.
    """

    total_energy: Optional[float] = None
    kinetic_energy: Optional[float] = None
    speed: Optional[float] = None
    z0: float = 0.0
    direction: Direction = Direction.DOWNWARD

    def __post_init__(self):
        given = [v is not None for v in (self.total_energy, self.kinetic_energy, self.speed)]
        if sum(given) != 1:
            raise DomainError("BeamConfig needs exactly one of total_energy, kinetic_energy, speed")
        if self.kinetic_energy is not None and self.kinetic_energy < 0:
            raise DomainError(f"Kinetic energy must be non-negative, got {self.kinetic_energy}")
        if self.speed is not None and self.speed < 0:
            raise DomainError(f"Speed must be non-negative, got {self.speed}")


@dataclass(frozen=True)
class Aperture:
    """Single slit of width L, or two slits of width L centred at +-a."""

    kind: ApertureKind
    L: float
    a: float = 0.0

    def __post_init__(self):
        if self.L <= 0:
            raise DomainError(f"Slit width must be positive, got L={self.L}")
        if self.kind is ApertureKind.DOUBLE and not self.a > self.L / 2:
            raise DomainError(f"Double slit needs a > L/2, got a={self.a}, L={self.L}")

    @classmethod
    def single(cls, L: float) -> "Aperture":
        return cls(ApertureKind.SINGLE, L)

    @classmethod
    def double(cls, L: float, a: float) -> "Aperture":
        return cls(ApertureKind.DOUBLE, L, a)


@dataclass(frozen=True)
class Grid:
    """Rectangular (x, z) sampling grid."""

    x_min: float
    x_max: float
    nx: int
    z_min: float
    z_max: float
    nz: int

    def __post_init__(self):
        if self.nx < 1 or self.nz < 1:
            raise DomainError(f"Grid counts must be >= 1, got nx={self.nx}, nz={self.nz}")
        if self.nx > 1 and not self.x_max > self.x_min:
            raise DomainError(f"Degenerate x range [{self.x_min}, {self.x_max}]")
        if self.nz > 1 and not self.z_max > self.z_min:
            raise DomainError(f"Degenerate z range [{self.z_min}, {self.z_max}]")

    def xs(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    def zs(self):
        return np.linspace(self.z_min, self.z_max, self.nz)


def convert_beam(beam: BeamConfig, species: Species, field: FieldStrength) -> Tuple[float, float, float]:
    """
    Resolve a beam specification into the canonical triple (E, v, z0).

    Uses E = m_i v^2 / 2 + F z0 with F = m_g g.

    Args:
        beam: Beam specification
        species: Particle species
        field: Field strength

    Returns:
        Tuple (E, v, z0) with v >= 0

    Raises:
        DomainError: If (E, z0) implies a negative kinetic energy
    """
    F = field.force(species)
    m = species.m_inertial
    z0 = beam.z0

    if beam.total_energy is not None:
        E = beam.total_energy
        e_kin = E - F * z0
        if e_kin < 0:
            raise DomainError(
                f"Total energy E={E} below the potential F*z0={F * z0}: negative kinetic energy"
            )
        v = math.sqrt(2.0 * e_kin / m)
    elif beam.kinetic_energy is not None:
        v = math.sqrt(2.0 * beam.kinetic_energy / m)
        E = beam.kinetic_energy + F * z0
    else:
        v = beam.speed
        E = 0.5 * m * v * v + F * z0

    logger.debug(f"Beam resolved: E={E!r}, v={v!r}, z0={z0!r} for {species.name}")
    return E, v, z0


def kinetic_energy_from_temperature(T: float, units: UnitsMode = UnitsMode.SI) -> float:
    """
    Mean thermal kinetic energy 3 k_B T / 2.

    Args:
        T: Temperature (K in SI mode)
        units: Unit convention supplying k_B

    Returns:
        Kinetic energy in J (SI) or model units
    """
    if T < 0:
        raise DomainError(f"Temperature must be non-negative, got T={T}")
    return 1.5 * units.k_b * T


def free_fall_energy(species: Species, g: float, t: float) -> float:
    """Kinetic energy m_i (g t)^2 / 2 gained after falling from rest for a time t."""
    return 0.5 * species.m_inertial * (g * t) ** 2
