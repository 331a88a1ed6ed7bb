"""
Cross-check oracles: quantum bouncer, falling Gaussian packets, interferometer phase
and free-space diffraction closed forms.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import integrate, special

from .models import Aperture, ApertureKind, DomainError, FieldStrength, Species, UnitsMode
from .specfun import airy_Ai, airy_zeros, fresnel_CS

logger = logging.getLogger(__name__)


class LevelBasis(str, Enum):
    """Bouncer spectrum variants."""

    WKB_PAPER = "wkb_paper"
    WKB_TEXTBOOK = "wkb_textbook"
    EXACT_AIRY = "exact_airy"


def _bouncer_scale(species: Species, field: FieldStrength, hbar: float) -> float:
    # (hbar^2 F^2 / 2 m_i)^(1/3)
    F = field.require_positive(species)
    return (hbar ** 2 * F ** 2 / (2.0 * species.m_inertial)) ** (1.0 / 3.0)


def bouncer_kappa(species: Species, field: FieldStrength, units: UnitsMode = UnitsMode.MODEL) -> float:
    """Inverse length (2 m_i F / hbar^2)^(1/3) of the bouncer eigenfunctions."""
    F = field.require_positive(species)
    return (2.0 * species.m_inertial * F / units.hbar ** 2) ** (1.0 / 3.0)


def bouncer_levels(n_max: int, species: Species, field: FieldStrength,
                   basis: LevelBasis = LevelBasis.EXACT_AIRY,
                   units: UnitsMode = UnitsMode.MODEL) -> np.ndarray:
    """
    First n_max energy levels of a particle bouncing on a hard floor in V = F z.

    exact_airy uses the Airy zeros; wkb_textbook the Bohr-Sommerfeld estimate
    [3 pi/2 (n - 1/4)]^(2/3); wkb_paper the bracket [3 pi/8 (n - 1/4)]^(2/3) with
    prefactor hbar (m/hbar)^(1/3) (F/m)^(2/3), which lies about a factor 2 lower.

    Args:
        n_max: Number of levels (>= 1)
        species: Particle species
        field: Field strength (F > 0)
        basis: Spectrum variant
        units: Unit convention supplying hbar

    Returns:
        Array of n_max increasing energies
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    basis = LevelBasis(basis)
    hbar = units.hbar
    n = np.arange(1, n_max + 1, dtype=float)

    if basis is LevelBasis.EXACT_AIRY:
        return -airy_zeros(n_max) * _bouncer_scale(species, field, hbar)
    if basis is LevelBasis.WKB_TEXTBOOK:
        return (1.5 * math.pi * (n - 0.25)) ** (2.0 / 3.0) * _bouncer_scale(species, field, hbar)

    F = field.require_positive(species)
    m = species.m_inertial
    prefactor = hbar * (m / hbar) ** (1.0 / 3.0) * (F / m) ** (2.0 / 3.0)
    return prefactor * (0.375 * math.pi * (n - 0.25)) ** (2.0 / 3.0)


def bohr_frequency(n: int, n_prime: int, species: Species, field: FieldStrength,
                   basis: LevelBasis = LevelBasis.EXACT_AIRY,
                   units: UnitsMode = UnitsMode.MODEL) -> float:
    """Angular frequency (E_n - E_n') / hbar; zero for n = n'."""
    if n < 1 or n_prime < 1:
        raise DomainError(f"Level indices must be >= 1, got {n}, {n_prime}")
    if n == n_prime:
        return 0.0
    levels = bouncer_levels(max(n, n_prime), species, field, basis, units)
    return float((levels[n - 1] - levels[n_prime - 1]) / units.hbar)


def bouncer_eigenfunction(n: int, z, species: Species, field: FieldStrength,
                          units: UnitsMode = UnitsMode.MODEL) -> np.ndarray:
    """
    Normalized eigenfunction sqrt(kappa) Ai(kappa z + a_n) / |Ai'(a_n)| on z >= 0, zero below.
    """
    z = np.asarray(z, dtype=float)
    kappa = bouncer_kappa(species, field, units)
    a_n = airy_zeros(n)[-1]
    _, slope = airy_Ai(a_n)
    ai, _ = airy_Ai(kappa * z + a_n)
    return np.where(z >= 0, math.sqrt(kappa) * ai / abs(slope), 0.0)


@dataclass
class BouncerState:
    """Superposition sum_n C_n psi_n of bouncer eigenstates."""

    coefficients: np.ndarray
    levels: np.ndarray
    basis: LevelBasis
    species: Species
    field: FieldStrength
    units: UnitsMode = UnitsMode.MODEL

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if len(self.coefficients) != len(self.levels):
            raise ValueError("One coefficient per level is required")
        norm = float(np.sum(np.abs(self.coefficients) ** 2))
        if not math.isclose(norm, 1.0, rel_tol=1e-12):
            raise DomainError(f"Bouncer state is not normalized: sum |C_n|^2 = {norm}")
        if np.any(np.diff(self.levels) <= 0):
            raise DomainError("Bouncer levels must be strictly increasing")


def bouncer_state(coefficients: Sequence[complex], species: Species, field: FieldStrength,
                  basis: LevelBasis = LevelBasis.EXACT_AIRY,
                  units: UnitsMode = UnitsMode.MODEL) -> BouncerState:
    """Build a normalized state from (possibly unnormalized) coefficients."""
    c = np.asarray(coefficients, dtype=complex)
    norm = math.sqrt(float(np.sum(np.abs(c) ** 2)))
    if norm == 0:
        raise DomainError("At least one coefficient must be nonzero")
    levels = bouncer_levels(len(c), species, field, basis, units)
    return BouncerState(c / norm, levels, LevelBasis(basis), species, field, units)


def bouncer_density(state: BouncerState, z, t: float) -> np.ndarray:
    """
    Probability density |sum_n C_n psi_n(z) e^{-i E_n t/hbar}|^2.

    Cross terms oscillate with the Bohr frequencies of the state's basis.
    """
    z = np.asarray(z, dtype=float)
    hbar = state.units.hbar
    amplitude = np.zeros(z.shape, dtype=complex)
    for n, (c, energy) in enumerate(zip(state.coefficients, state.levels), start=1):
        if c == 0:
            continue
        psi = bouncer_eigenfunction(n, z, state.species, state.field, state.units)
        amplitude += c * psi * np.exp(-1j * energy * t / hbar)
    return np.abs(amplitude) ** 2


def bouncer_support(state: BouncerState, margin: float = 12.0) -> float:
    """Height beyond which every component has decayed: (|a_N| + margin) / kappa."""
    kappa = bouncer_kappa(state.species, state.field, state.units)
    return (abs(airy_zeros(len(state.levels))[-1]) + margin) / kappa


def bouncer_norm(state: BouncerState, t: float, points: int = 4001) -> float:
    """Integral of the density over the support, by Simpson's rule."""
    z = np.linspace(0.0, bouncer_support(state), points)
    return float(integrate.simpson(bouncer_density(state, z, t), x=z))


@dataclass(frozen=True)
class GaussianPacket:
    """Minimum-uncertainty packet with centre z0, momentum p0 and width sigma."""

    z0: float = 0.0
    p0: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise DomainError(f"Packet width must be positive, got sigma={self.sigma}")


def gaussian_packet(packet: GaussianPacket, z, t: float, m_i: float, F: float = 0.0,
                    hbar: float = 1.0) -> np.ndarray:
    """
    Exact packet in V = F z (F = 0: free).

    The width evolves as in free space; the centre follows q = z0 + p0 t/m - F t^2/2m with
    p = p0 - F t, and the phase is the classical action int (p^2/2m - F q) dt.
    """
    z = np.asarray(z, dtype=float)
    s2 = packet.sigma ** 2
    spread = 1.0 + 1j * hbar * t / (2.0 * m_i * s2)
    q = packet.z0 + packet.p0 * t / m_i - F * t * t / (2.0 * m_i)
    p = packet.p0 - F * t
    action = (packet.p0 ** 2 * t / (2.0 * m_i) - packet.p0 * F * t * t / m_i
              + F * F * t ** 3 / (3.0 * m_i) - F * packet.z0 * t)
    d = z - q
    exponent = -d * d / (4.0 * s2 * spread) + 1j * (p * d + action) / hbar
    return (2.0 * math.pi * s2) ** -0.25 / np.sqrt(spread) * np.exp(exponent)


@dataclass
class PacketCheck:
    """Deviations of the falling packet from the translated free packet."""

    density_deviation: float
    phase_deviation: float
    centroid: float
    expected_centroid: float
    z: np.ndarray = field(repr=False, default=None)


def falling_packet(packet: GaussianPacket, t: float, species: Species, field_strength: FieldStrength,
                   units: UnitsMode = UnitsMode.MODEL, points: int = 4001) -> PacketCheck:
    """
    Compare the packet in the field with the free packet shifted by F t^2 / 2m.

    |psi_F(z, t)|^2 = |psi_0(z + F t^2/2m, t)|^2 and the phase difference is
    -(F t / hbar) [z + F t^2 / 6m], the coordinate being measured along the fall.

    Returns:
        PacketCheck with maximal deviations over the packet's support
    """
    m = species.m_inertial
    F = field_strength.force(species)
    hbar = units.hbar
    shift = F * t * t / (2.0 * m)

    width = packet.sigma * abs(1.0 + 1j * hbar * t / (2.0 * m * packet.sigma ** 2))
    centre = packet.z0 + packet.p0 * t / m - shift
    z = np.linspace(centre - 12.0 * width, centre + 12.0 * width, points)

    psi_field = gaussian_packet(packet, z, t, m, F, hbar)
    psi_free = gaussian_packet(packet, z + shift, t, m, 0.0, hbar)

    density_field = np.abs(psi_field) ** 2
    density_deviation = float(np.max(np.abs(density_field - np.abs(psi_free) ** 2)))

    expected_phase = -(F * t / hbar) * (z + F * t * t / (6.0 * m))
    significant = density_field > 1e-12 * density_field.max()
    ratio = psi_field * np.conj(psi_free) * np.exp(-1j * expected_phase)
    phase_deviation = float(np.max(np.abs(np.angle(ratio[significant])))) if t != 0 else 0.0

    centroid = float(integrate.simpson(z * density_field, x=z) / integrate.simpson(density_field, x=z))
    logger.debug(f"Falling packet t={t}: density dev {density_deviation:.2e}, phase dev {phase_deviation:.2e}")
    return PacketCheck(
        density_deviation=density_deviation,
        phase_deviation=phase_deviation,
        centroid=centroid,
        expected_centroid=centre,
        z=z,
    )


@dataclass(frozen=True)
class InterferometerConfig:
    area: float
    species: Species
    field: FieldStrength

    def __post_init__(self):
        if self.area < 0:
            raise DomainError(f"Enclosed area must be non-negative, got {self.area}")


def interferometer_phase(config: InterferometerConfig, units: UnitsMode = UnitsMode.MODEL) -> float:
    """Gravitational phase (m_i/hbar)^2 (F/m_i) A = m_i F A / hbar^2."""
    F = config.field.force(config.species)
    return config.species.m_inertial * F * config.area / units.hbar ** 2


def free_fresnel_pattern(x, z: float, aperture: Aperture, E: float, m_i: float = 1.0,
                         hbar: float = 1.0):
    """
    Free (F = 0) paraxial slit pattern from the real Fresnel integrals.

    Quasi-time is t = m |z| / (hbar k0); each slit edge contributes C(u) + i S(u).
    """
    x = np.asarray(x, dtype=float)
    if z > 0:
        raise DomainError(f"Free pattern is evaluated below the plate, got z={z}")
    k0 = math.sqrt(2.0 * m_i * E) / hbar
    t = m_i * abs(z) / (hbar * k0)
    beta = math.sqrt(m_i / (2.0 * hbar * t))
    half = aperture.L / 2.0

    def edge(u):
        c, s = fresnel_CS(u)
        return c + 1j * s

    if aperture.kind is ApertureKind.DOUBLE:
        total = sum(edge(beta * (half + p * aperture.a + q * x)) for p in (1, -1) for q in (1, -1))
        norm = 2.0 * aperture.L
    else:
        total = edge(beta * (half + x)) + edge(beta * (half - x))
        norm = aperture.L
    return np.exp(-0.25j * math.pi) * total / math.sqrt(norm * math.pi)


def free_halfspace_kernel(dx, z: float, k0: float):
    """
    Stationary free-space kernel below a plate: (i k0 |z| / 2r) H1(k0 r), r = sqrt(dx^2 + z^2).
    """
    dx = np.asarray(dx, dtype=float)
    r = np.hypot(dx, z)
    return 1j * k0 * abs(z) / (2.0 * r) * special.hankel1(1, k0 * r)
