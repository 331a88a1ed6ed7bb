"""
Focus-based gravimetry and equivalence-principle sensitivity.

With alpha0 = 1/g and beta0 = m_i/hbar the focus of a single slit fed from z0 = 0 is
    z_focus(0) = -z'_focus(0) - c L^2 sqrt(2 m_i E_kin) / hbar,
    z'_focus(0) = c^2 L^4 beta0^2 / (2 alpha0),
and a fractional change alpha = alpha0 (1 + eps) moves it by eps z'_focus(0).
"""

import logging
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from typing import List, Optional

from .models import (
    EV,
    DomainError,
    FieldStrength,
    Species,
    UnitsMode,
    free_fall_energy,
    kinetic_energy_from_temperature,
)
from .paraxial import focus_constant
from .presets import BEC_TIME_OF_FLIGHT, TABLE1_ROWS, TableRow

logger = logging.getLogger(__name__)

# Relative agreement required against the printed table
TABLE_TOLERANCE = 0.03
# Printed kinetic energies farther than this from 3 k_B T / 2 are flagged
THERMAL_TOLERANCE = 0.02


@dataclass(frozen=True)
class WepVariation:
    """Fractional changes of g and of the gravitational mass."""

    delta_g_over_g: float = 0.0
    delta_mg_over_mi: float = 0.0

    @property
    def epsilon(self) -> float:
        # alpha = m_i / (m_g g) = alpha0 (1 + epsilon) to first order
        return -self.delta_g_over_g - self.delta_mg_over_mi


@dataclass(frozen=True)
class SensitivityReport:
    z_focus_0: float
    z_focus_prime_0: float
    epsilon: float
    z_focus_shifted: float
    z_focus_exact_shifted: float
    dz_dE: float
    c_star: float
    species: Species
    E_kin: float
    L: float
    g: float


def sensitivity_factor(species: Species, g: float, L: float, c_star: float,
                       units: UnitsMode = UnitsMode.SI) -> float:
    """z'_focus(0) = c^2 L^4 m_i^2 g / (2 hbar^2); independent of the beam energy."""
    if L <= 0:
        raise DomainError(f"Slit width must be positive, got L={L}")
    if g <= 0:
        raise DomainError(f"Sensitivity needs g > 0, got g={g}")
    beta0 = species.m_inertial / units.hbar
    alpha0 = 1.0 / g
    return c_star ** 2 * L ** 4 * beta0 ** 2 / (2.0 * alpha0)


def classical_offset(species: Species, E_kin: float, L: float, c_star: float,
                     units: UnitsMode = UnitsMode.SI) -> float:
    """c L^2 sqrt(2 m_i E_kin) / hbar, the energy-dependent part of the focus depth."""
    if E_kin < 0:
        raise DomainError(f"Kinetic energy must be non-negative, got {E_kin}")
    return c_star * L * L * math.sqrt(2.0 * species.m_inertial * E_kin) / units.hbar


def z_focus_stable(species: Species, g: float, E_kin: float, L: float, c_star: float,
                   units: UnitsMode = UnitsMode.SI, alpha_scale: float = 1.0) -> float:
    """
    Focus height for a beam entering at z0 = 0, cancellation-free.

    alpha_scale multiplies alpha0 = 1/g (exact, non-linearised variation).
    """
    z_prime = sensitivity_factor(species, g, L, c_star, units)
    return -z_prime / alpha_scale - classical_offset(species, E_kin, L, c_star, units)


def z_focus_naive(species: Species, g: float, E_kin: float, L: float, c_star: float,
                  units: UnitsMode = UnitsMode.SI) -> float:
    """
    Expanded form alpha0 E/m - (L^4 beta0^2 / 2 alpha0) [c + alpha0 sqrt(2E/m) / (beta0 L^2)]^2
    in double precision; its first term cancels against the square.
    """
    m = species.m_inertial
    alpha0 = 1.0 / g
    beta0 = m / units.hbar
    bracket = c_star + alpha0 * math.sqrt(2.0 * E_kin / m) / (beta0 * L * L)
    return alpha0 * E_kin / m - L ** 4 * beta0 ** 2 / (2.0 * alpha0) * bracket ** 2


def z_focus_direct(species: Species, g: float, E_kin: float, L: float, c_star: float,
                   units: UnitsMode = UnitsMode.SI, digits: int = 50) -> float:
    """Expanded form evaluated in decimal arithmetic with the given number of digits."""
    with localcontext() as ctx:
        ctx.prec = digits
        m = Decimal(species.m_inertial)
        e = Decimal(E_kin)
        alpha0 = 1 / Decimal(g)
        beta0 = m / Decimal(units.hbar)
        length = Decimal(L)
        c = Decimal(c_star)
        bracket = c + alpha0 * (2 * e / m).sqrt() / (beta0 * length ** 2)
        value = alpha0 * e / m - length ** 4 * beta0 ** 2 / (2 * alpha0) * bracket ** 2
        return float(value)


def cancellation_digits(species: Species, g: float, E_kin: float, L: float, c_star: float,
                        units: UnitsMode = UnitsMode.SI) -> float:
    """Decimal digits lost by the expanded form: log10(largest term / |result|)."""
    m = species.m_inertial
    alpha0 = 1.0 / g
    beta0 = m / units.hbar
    first = alpha0 * E_kin / m
    bracket = c_star + alpha0 * math.sqrt(2.0 * E_kin / m) / (beta0 * L * L)
    second = L ** 4 * beta0 ** 2 / (2.0 * alpha0) * bracket ** 2
    result = abs(z_focus_stable(species, g, E_kin, L, c_star, units))
    return math.log10(max(first, second) / result)


def energy_spread_width(species: Species, E_kin: float, L: float, delta_E: float,
                        c_star: Optional[float] = None, units: UnitsMode = UnitsMode.SI) -> float:
    """
    Focus smearing |dz/dE| delta_E with |dz/dE| = c L^2 beta0 / sqrt(2 m_i E_kin).

    Raises:
        DomainError: For E_kin <= 0, where the derivative diverges
    """
    if E_kin <= 0:
        raise DomainError(f"Energy-spread width diverges for E_kin={E_kin}")
    if delta_E < 0:
        raise DomainError(f"Energy spread must be non-negative, got {delta_E}")
    c = focus_constant() if c_star is None else c_star
    beta0 = species.m_inertial / units.hbar
    return c * L * L * beta0 / math.sqrt(2.0 * species.m_inertial * E_kin) * delta_E


def sensitivity_report(species: Species, field_strength: FieldStrength, E_kin: float, L: float,
                       variation: WepVariation = WepVariation(),
                       c_star: Optional[float] = None,
                       units: UnitsMode = UnitsMode.SI) -> SensitivityReport:
    """
    First-order focus shift under a change of g or of the gravitational mass.

    Args:
        species: Particle species (its inertial mass sets beta0)
        field_strength: Reference field (alpha0 = 1/g)
        E_kin: Kinetic energy at the plate
        L: Slit width
        variation: Fractional changes defining epsilon
        c_star: Focusing constant (default: computed)
        units: Unit convention

    Returns:
        SensitivityReport
    """
    g = field_strength.g
    c = focus_constant() if c_star is None else c_star
    z_prime = sensitivity_factor(species, g, L, c, units)
    z0 = z_focus_stable(species, g, E_kin, L, c, units)
    eps = variation.epsilon
    exact = z_focus_stable(species, g, E_kin, L, c, units, alpha_scale=1.0 + eps)
    beta0 = species.m_inertial / units.hbar
    dz_dE = c * L * L * beta0 / math.sqrt(2.0 * species.m_inertial * E_kin) if E_kin > 0 else math.inf

    logger.info(f"Sensitivity for {species.name}: z_focus(0)={z0:.6g}, z'={z_prime:.6g}, eps={eps:.3g}")
    return SensitivityReport(
        z_focus_0=z0,
        z_focus_prime_0=z_prime,
        epsilon=eps,
        z_focus_shifted=z0 + eps * z_prime,
        z_focus_exact_shifted=exact,
        dz_dE=dz_dE,
        c_star=c,
        species=species,
        E_kin=E_kin,
        L=L,
        g=g,
    )


@dataclass
class TableResult:
    """Computed values of one beam realization next to the printed ones."""

    label: str
    species: str
    beam_type: str
    T_K: Optional[float]
    L_m: float
    E_kin_eV: float
    z_focus0_m: float
    z_focus_prime0_m: float
    printed_z_focus0_m: float
    printed_z_focus_prime0_m: float
    E_free_fall_eV: Optional[float] = None
    flags: List[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "species": self.species,
            "T_K": self.T_K,
            "L_m": self.L_m,
            "E_kin_eV": self.E_kin_eV,
            "z_focus0_m": self.z_focus0_m,
            "z_focus_prime0_m": self.z_focus_prime0_m,
            "flags": list(self.flags),
            "label": self.label,
            "type": self.beam_type,
            "printed_z_focus0_m": self.printed_z_focus0_m,
            "printed_z_focus_prime0_m": self.printed_z_focus_prime0_m,
            "E_free_fall_eV": self.E_free_fall_eV,
        }


def compare_printed(computed: float, printed: float, tol: float = TABLE_TOLERANCE) -> Optional[str]:
    """
    Classify the agreement of a computed value with a printed one.

    Returns:
        None when within tol, "exponent_mismatch" when only the power of ten differs,
        otherwise "outside_tolerance"
    """
    ratio = computed / printed
    if abs(ratio - 1.0) <= tol:
        return None
    if ratio > 0:
        power = round(math.log10(ratio))
        if power != 0 and abs(ratio / 10.0 ** power - 1.0) <= tol:
            return "exponent_mismatch"
    return "outside_tolerance"


def table_row_result(row: TableRow, g: float, c_star: float, energy_source: str = "printed",
                     tol: float = TABLE_TOLERANCE) -> TableResult:
    """Evaluate one beam realization; energy_source "thermal" uses 3 k_B T / 2 where T applies."""
    species = row.species
    flags: List[str] = []

    thermal_eV = None
    if row.T is not None and not row.is_bec:
        thermal_eV = kinetic_energy_from_temperature(row.T, UnitsMode.SI) / EV
        if abs(row.E_kin_eV / thermal_eV - 1.0) > THERMAL_TOLERANCE:
            flags.append("printed_energy_not_thermal")

    e_kin_eV = row.E_kin_eV
    if energy_source == "thermal" and thermal_eV is not None:
        e_kin_eV = thermal_eV
    elif energy_source not in ("printed", "thermal"):
        raise ValueError(f"Unknown energy source '{energy_source}'")

    free_fall_eV = None
    if row.is_bec:
        free_fall_eV = free_fall_energy(species, g, BEC_TIME_OF_FLIGHT) / EV
        flags.append("bec_free_fall_energy")

    e_kin = e_kin_eV * EV
    z0 = z_focus_stable(species, g, e_kin, row.L, c_star)
    z_prime = sensitivity_factor(species, g, row.L, c_star)

    for computed, printed in ((z0, row.z_focus_printed), (z_prime, row.z_prime_printed)):
        flag = compare_printed(computed, printed, tol)
        if flag and flag not in flags:
            flags.append(flag)
    if flags:
        logger.debug(f"Row {row.label}: flags {flags}")

    return TableResult(
        label=row.label,
        species=species.name,
        beam_type=row.beam_type,
        T_K=row.T,
        L_m=row.L,
        E_kin_eV=e_kin_eV,
        z_focus0_m=z0,
        z_focus_prime0_m=z_prime,
        printed_z_focus0_m=row.z_focus_printed,
        printed_z_focus_prime0_m=row.z_prime_printed,
        E_free_fall_eV=free_fall_eV,
        flags=flags,
    )


def table1_generate(rows: Optional[List[TableRow]] = None, g: float = 9.80665,
                    c_star: Optional[float] = None, energy_source: str = "printed") -> List[TableResult]:
    """
    Compute every beam realization of the table.

    Args:
        rows: Table rows (default: all built-in rows)
        g: Reference acceleration
        c_star: Focusing constant (default: computed)
        energy_source: "printed" kinetic energies or "thermal" 3 k_B T / 2

    Returns:
        One TableResult per row, in input order
    """
    c = focus_constant() if c_star is None else c_star
    results = [table_row_result(row, g, c, energy_source) for row in (rows or TABLE1_ROWS)]
    flagged = [r.label for r in results if "outside_tolerance" in r.flags]
    if flagged:
        logger.warning(f"Rows outside the {TABLE_TOLERANCE:.0%} tolerance: {flagged}")
    logger.info(f"Generated {len(results)} table rows with c*={c:.6f}")
    return results
