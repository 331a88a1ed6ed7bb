"""
Paraxial slit diffraction in quasi-time.

Under the quasi-time map the stationary problem becomes free Schroedinger
evolution in x, so slit patterns are free Fresnel patterns evaluated at tau(z).
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import optimize

from .models import (
    Aperture,
    ApertureKind,
    BeamConfig,
    Direction,
    DomainError,
    FieldStrength,
    Grid,
    Species,
    UnitsMode,
    convert_beam,
)
from .quasitime import QuasiTimeMap, tau_value, z_of_tau
from .sampling import ComplexAmplitudeField, evaluate_rows
from .specfun import fresnel_CS, fresnel_F

logger = logging.getLogger(__name__)

# Published rounding of the focusing constant
PAPER_FOCUS_CONSTANT = 0.055
# Published roundings of the Cornu-spiral and asymptotic estimates
PUBLISHED_FOCUS_ESTIMATES = {"cornu": 0.052, "asymptotic": 0.054}

_PHASE = np.exp(-0.25j * np.pi)


@dataclass(frozen=True)
class ApertureWave:
    """Normalized aperture function: 1/sqrt(L) on one slit, 1/sqrt(2L) on each of two."""

    aperture: Aperture

    @property
    def height(self) -> float:
        if self.aperture.kind is ApertureKind.DOUBLE:
            return 1.0 / math.sqrt(2.0 * self.aperture.L)
        return 1.0 / math.sqrt(self.aperture.L)

    def centres(self):
        if self.aperture.kind is ApertureKind.DOUBLE:
            return (-self.aperture.a, self.aperture.a)
        return (0.0,)

    def __call__(self, x):
        """Indicator values; exactly on an edge the mean of both sides is returned."""
        x = np.asarray(x, dtype=float)
        half = self.aperture.L / 2.0
        value = np.zeros_like(x)
        for c in self.centres():
            d = np.abs(x - c)
            value = value + np.where(d < half, 1.0, np.where(d == half, 0.5, 0.0))
        return self.height * value

    def norm(self) -> float:
        """Closed-form L2 norm of the aperture function."""
        return self.height * math.sqrt(len(self.centres()) * self.aperture.L)


def aperture_wave(aperture: Aperture) -> ApertureWave:
    return ApertureWave(aperture)


def propagation_time(z, qmap: QuasiTimeMap, direction: Direction = Direction.DOWNWARD):
    """
    Quasi-time elapsed along the beam, used in the Fresnel arguments.

    Downstream of the plate this is |tau| on the classical branch; beyond the turning
    point of an upward beam it continues as -tau, whose negative imaginary part
    damps the Fresnel kernel.

    Raises:
        DomainError: For heights upstream of the plate
    """
    z_arr = np.asarray(z, dtype=float)
    upstream = z_arr > 0 if direction is Direction.DOWNWARD else z_arr < 0
    if np.any(upstream):
        raise DomainError(f"z={z} lies upstream of the plate for a {direction.value} beam")
    tau = np.asarray(tau_value(z_arr, qmap), dtype=complex)
    s = tau if direction is Direction.DOWNWARD else -tau
    return s if s.ndim else complex(s)


def fresnel_amplitude(x, s, aperture: Aperture, m_i: float = 1.0, hbar: float = 1.0):
    """
    Free Fresnel pattern of the aperture after quasi-time s.

    Single slit: (1/sqrt(L pi)) e^{-i pi/4} sum_q F(x_q);
    double slit: (1/sqrt(2 L pi)) e^{-i pi/4} sum_{p,q} F(x_{pq}),
    with x_{pq} = sqrt(m/(2 hbar s)) (L/2 + p a + q x). s = 0 returns the aperture itself.
    """
    x = np.asarray(x, dtype=float)
    s = complex(s)
    if s == 0:
        return aperture_wave(aperture)(x).astype(complex)

    if aperture.kind is ApertureKind.DOUBLE:
        return double_slit_terms(x, s, aperture.L, aperture.a, m_i, hbar)
    beta = np.sqrt(m_i / (2.0 * hbar * s))
    half = aperture.L / 2.0
    total = fresnel_F(beta * (half + x)) + fresnel_F(beta * (half - x))
    return _PHASE * total / math.sqrt(aperture.L * math.pi)


def double_slit_terms(x, s, L: float, a: float, m_i: float = 1.0, hbar: float = 1.0):
    """
    Four-term double-slit sum at quasi-time s != 0.

    Takes any offset a >= 0; at a = 0 both slits coincide and the sum is
    sqrt(2) times the single-slit pattern.
    """
    x = np.asarray(x, dtype=float)
    beta = np.sqrt(m_i / (2.0 * hbar * complex(s)))
    half = L / 2.0
    total = sum(
        fresnel_F(beta * (half + p * a + q * x))
        for p in (1.0, -1.0)
        for q in (1.0, -1.0)
    )
    return _PHASE * total / math.sqrt(2.0 * L * math.pi)


def slit_amplitude(x, z: float, aperture: Aperture, qmap: QuasiTimeMap,
                   direction: Direction = Direction.DOWNWARD):
    """
    Paraxial amplitude at (x, z) below (or, for upward beams, above) the plate.

    Args:
        x: Transverse position (scalar or array)
        z: Height
        aperture: Slit geometry
        qmap: Quasi-time parameters
        direction: Beam direction

    Returns:
        Complex amplitude(s)
    """
    s = propagation_time(z, qmap, direction)
    value = fresnel_amplitude(x, s, aperture, qmap.m_i, qmap.hbar)
    return value if np.ndim(value) else complex(value)


def on_axis_amplitude(z: float, L: float, qmap: QuasiTimeMap) -> complex:
    """Closed form 2 sqrt(1/(i pi L)) F(Z) with Z = sqrt(m/(2 hbar tau)) L/2, single slit."""
    s = propagation_time(z, qmap)
    if s == 0:
        return complex(1.0 / math.sqrt(L))
    Z = np.sqrt(qmap.m_i / (2.0 * qmap.hbar * s)) * L / 2.0
    return complex(2.0 * np.sqrt(1.0 / (1j * math.pi * L)) * fresnel_F(Z))


def _focus_equation(Z: float) -> float:
    # Half the derivative of |F(Z)|^2
    c, s = fresnel_CS(Z)
    return c * math.cos(Z * Z) + s * math.sin(Z * Z)


@lru_cache(maxsize=None)
def focus_root(Z_start: float = 0.1, step: float = 0.05) -> float:
    """
    Smallest positive root Z* of C(Z) cos Z^2 + S(Z) sin Z^2 = 0.

    Scans upward from Z_start until the sign changes, then refines with brentq.
    The smallest Z is the largest quasi-time, i.e. the on-axis maximum nearest to the far zone.
    """
    lo = Z_start
    f_lo = _focus_equation(lo)
    while True:
        hi = lo + step
        f_hi = _focus_equation(hi)
        if f_lo * f_hi < 0:
            break
        lo, f_lo = hi, f_hi
        if lo > 10.0:
            raise RuntimeError("No sign change of the focusing equation below Z = 10")
    root = optimize.brentq(_focus_equation, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    logger.debug(f"Focusing root bracketed in [{lo:.3f}, {hi:.3f}], Z*={root!r}")
    return root


def focus_constant(source: str = "computed") -> float:
    """
    Dimensionless focusing quasi-time c* = hbar tau*/(m L^2) = 1/(8 Z*^2).

    Args:
        source: "computed" solves the focusing equation; "paper" returns 0.055

    Returns:
        c*
    """
    if source == "paper":
        return PAPER_FOCUS_CONSTANT
    if source != "computed":
        raise ValueError(f"Unknown focus constant source '{source}'")
    Z = focus_root()
    return 1.0 / (8.0 * Z * Z)


def focus_root_by_maximization() -> float:
    """Independent location of Z* by bounded maximization of |F(Z)|^2."""
    result = optimize.minimize_scalar(
        lambda Z: -abs(fresnel_F(Z)) ** 2,
        bounds=(1.0, 2.0),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(result.x)


def _asymptotic_focus_equation(Z: float) -> float:
    # Fresnel tails expanded through Z^-7; the Z^-1 and Z^-5 terms drop out of the real part
    return 0.5 * math.sqrt(math.pi) * math.sin(Z * Z + 0.25 * math.pi) - 1.0 / (4.0 * Z ** 3) + 15.0 / (16.0 * Z ** 7)


def focus_constant_estimate(method: str = "cornu") -> float:
    """
    Approximate focusing constant from a simplified focusing equation.

    "cornu": on the Cornu spiral the focus is where the radius vector is normal to the
    tangent, whose direction is Z^2. Taking the radius along the spiral's eye at pi/4
    gives Z^2 = 3 pi/4 and c = 1/(6 pi).
    "asymptotic": the Fresnel integrals are replaced by their limits minus the tail
    series through Z^-7, and the resulting equation is solved near sqrt(3 pi/4).

    Args:
        method: "cornu" or "asymptotic"

    Returns:
        Estimate of c* = 1/(8 Z^2)
    """
    if method == "cornu":
        return 1.0 / (6.0 * math.pi)
    if method != "asymptotic":
        raise ValueError(f"Unknown focus constant estimate '{method}'")
    Z = optimize.brentq(_asymptotic_focus_equation, 1.45, 1.6, xtol=1e-14)
    return 1.0 / (8.0 * Z * Z)


@dataclass(frozen=True)
class FocusReport:
    """Location of the on-axis focus of a single slit."""

    c_star: float
    tau_star: float
    z_star: float
    z_quantum: float
    z_dimless: float
    species: Species
    beam: BeamConfig
    L: float
    g: float


def focus_height(
    species: Species,
    field: FieldStrength,
    beam: BeamConfig,
    L: float,
    units: UnitsMode = UnitsMode.MODEL,
    c_star: Optional[float] = None,
) -> FocusReport:
    """
    Focusing height of a single slit of width L.

    Args:
        species: Particle species
        field: Field strength
        beam: Incident beam; z0 is the source height
        L: Slit width
        units: Unit convention supplying hbar
        c_star: Focusing constant (default: computed)

    Returns:
        FocusReport

    Raises:
        DomainError: If F <= 0 or L <= 0
    """
    if L <= 0:
        raise DomainError(f"Slit width must be positive, got L={L}")
    F = field.require_positive(species)
    m = species.m_inertial
    hbar = units.hbar
    c = focus_constant() if c_star is None else c_star

    # kinetic energy at the plate z = 0 equals the total energy
    e_plate, _, _ = convert_beam(beam, species, field)
    if e_plate < 0:
        raise DomainError(f"The beam does not reach the plate: E={e_plate}")
    tau = c * m * L * L / hbar
    z_star = z_of_tau(tau, QuasiTimeMap(E=e_plate, F=F, m_i=m, hbar=hbar))
    z_quantum = -F * tau * tau / (2.0 * m)

    # caption variable z hbar / sqrt(2 m E)
    z_dimless = z_star * hbar / math.sqrt(2.0 * m * e_plate) if e_plate > 0 else math.nan

    logger.info(f"Focus for {species.name}: c*={c:.6f}, tau*={tau:.6g}, z*={z_star:.6g}")
    return FocusReport(
        c_star=c,
        tau_star=tau,
        z_star=z_star,
        z_quantum=z_quantum,
        z_dimless=z_dimless,
        species=species,
        beam=beam,
        L=L,
        g=field.g,
    )


def incident_wave(z, qmap: QuasiTimeMap):
    """
    WKB incident wave above the plate, amplitude 1 at z = 0.

    Intensity follows k(0)/k(z); the phase is the accumulated WKB phase. Nodes at
    or beyond the turning point are set to zero.
    """
    z = np.asarray(z, dtype=float)
    m, E, F, hbar = qmap.m_i, qmap.E, qmap.F, qmap.hbar
    remaining = E - F * z
    allowed = remaining > 0
    k = np.sqrt(2.0 * m * np.where(allowed, remaining, 1.0)) / hbar
    if F > 0:
        phase = 2.0 * math.sqrt(2.0 * m) / (3.0 * F * hbar) * (
            E ** 1.5 - np.where(allowed, remaining, 0.0) ** 1.5
        )
    else:
        phase = qmap.k0 * z
    amplitude = np.sqrt(qmap.k0 / k) * np.exp(-1j * phase)
    return np.where(allowed, amplitude, 0.0)


def pattern_grid(
    aperture: Aperture,
    qmap: QuasiTimeMap,
    grid: Grid,
    direction: Direction = Direction.DOWNWARD,
    include_incident: bool = False,
    real_branch_only: bool = False,
    threads: int = 1,
) -> ComplexAmplitudeField:
    """
    Evaluate the paraxial amplitude on every grid node.

    Args:
        aperture: Slit geometry
        qmap: Quasi-time parameters
        grid: Sampling grid
        direction: Beam direction
        include_incident: Fill the upstream half with the WKB incident wave
        real_branch_only: Reject grids that cross the turning point
        threads: Worker threads for row evaluation

    Returns:
        ComplexAmplitudeField, rows in z order

    Raises:
        DomainError: For grids crossing the turning point when real_branch_only is set,
            or reaching upstream of the plate without include_incident
    """
    zs = grid.zs()
    downstream_sign = -1.0 if direction is Direction.DOWNWARD else 1.0
    if real_branch_only and np.any(qmap.E - qmap.F * zs < 0):
        raise DomainError(f"Grid reaches beyond the turning point z_t={qmap.z_turn}")
    if not include_incident and np.any(zs * downstream_sign < 0):
        raise DomainError("Grid reaches upstream of the plate; enable the incident-wave fill")

    logger.info(
        f"Paraxial {aperture.kind.value}-slit pattern on {grid.nz}x{grid.nx} nodes "
        f"(E={qmap.E}, F={qmap.F}, {direction.value})"
    )

    def row(z: float, xs: np.ndarray) -> np.ndarray:
        if z * downstream_sign < 0:
            return np.full(xs.shape, incident_wave(z, qmap), dtype=complex)
        return np.asarray(slit_amplitude(xs, z, aperture, qmap, direction), dtype=complex)

    amplitudes = evaluate_rows(row, grid, threads)
    return ComplexAmplitudeField(grid=grid, amplitudes=amplitudes)
