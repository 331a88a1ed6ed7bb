"""WKB wave number and the quasi-time map tau(z) for a linear potential V(z) = F z."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .models import DomainError, FieldStrength, Species, UnitsMode

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuasiTimeMap:
    """
    Parameters of the quasi-time transformation.

    F = 0 is accepted and describes free propagation (turning point at +infinity).
    """

    E: float
    F: float
    m_i: float
    hbar: float = 1.0

    def __post_init__(self):
        if self.m_i <= 0:
            raise DomainError(f"Inertial mass must be positive, got {self.m_i}")
        if self.F < 0:
            raise DomainError(f"Force must be non-negative, got F={self.F}")
        if self.E < 0:
            raise DomainError(f"Quasi-time needs E >= 0 at the plate, got E={self.E}")

    @classmethod
    def from_physics(cls, E: float, species: Species, field: FieldStrength,
                     units: UnitsMode = UnitsMode.MODEL) -> "QuasiTimeMap":
        return cls(E=E, F=field.force(species), m_i=species.m_inertial, hbar=units.hbar)

    @property
    def z_turn(self) -> float:
        """Turning point z_t = E/F (infinite for F = 0)."""
        return self.E / self.F if self.F > 0 else math.inf

    @property
    def k0(self) -> float:
        """Wave number at the plate, sqrt(2 m E)/hbar."""
        return math.sqrt(2.0 * self.m_i * self.E) / self.hbar


@dataclass(frozen=True)
class QuasiTime:
    tau: complex
    classical: bool


def wavenumber(z, qmap: QuasiTimeMap):
    """
    Local WKB wave number k(z) = sqrt(2 m |E - F z|)/hbar.

    Args:
        z: Height (scalar or array)
        qmap: Quasi-time parameters

    Returns:
        k >= 0, zero at the turning point
    """
    return np.sqrt(2.0 * qmap.m_i * np.abs(qmap.E - qmap.F * np.asarray(z, dtype=float))) / qmap.hbar


def tau_value(z, qmap: QuasiTimeMap):
    """
    Quasi-time as a (complex) number or array.

    Below the turning point tau = -sqrt(2m) z / (sqrt(E - F z) + sqrt(E)), which equals
    (sqrt(2m)/F)(sqrt(E - F z) - sqrt(E)) without the cancellation near z = 0 and stays
    valid for F = 0. Above it tau = (sqrt(2m)/F)(i sqrt(F z - E) - sqrt(E)).
    """
    z = np.asarray(z, dtype=float)
    m, E, F = qmap.m_i, qmap.E, qmap.F
    root2m = math.sqrt(2.0 * m)
    sqrt_e = math.sqrt(E)

    remaining = E - F * z
    classical = remaining >= 0
    tau = np.empty(z.shape, dtype=complex)

    denom = np.sqrt(np.where(classical, remaining, 0.0)) + sqrt_e
    with np.errstate(divide="ignore", invalid="ignore"):
        real_branch = np.where(denom > 0, -root2m * z / np.where(denom > 0, denom, 1.0), 0.0)
    tau[classical] = real_branch[classical]

    if np.any(~classical):
        excess = np.sqrt(-remaining[~classical])
        tau[~classical] = (root2m / F) * (1j * excess - sqrt_e)

    return tau if tau.ndim else complex(tau)


def tau_of_z(z: float, qmap: QuasiTimeMap) -> QuasiTime:
    """
    Quasi-time tau(z) with its branch flag.

    Args:
        z: Height (negative below the plate)
        qmap: Quasi-time parameters

    Returns:
        QuasiTime; classical is True exactly when tau is real
    """
    tau = tau_value(float(z), qmap)
    classical = qmap.E - qmap.F * z >= 0
    return QuasiTime(tau=tau, classical=classical)


def tau_min(qmap: QuasiTimeMap) -> float:
    """Smallest admissible real quasi-time, -sqrt(2 m E)/F, reached at the turning point."""
    if qmap.F == 0:
        return -math.inf
    return -math.sqrt(2.0 * qmap.m_i * qmap.E) / qmap.F


def z_of_tau(tau: float, qmap: QuasiTimeMap) -> float:
    """
    Inverse of tau_of_z on the classical branch.

    z = -tau sqrt(2E/m) - F tau^2/(2m)

    Args:
        tau: Real quasi-time
        qmap: Quasi-time parameters

    Returns:
        Height z

    Raises:
        DomainError: If tau lies beyond the turning point
    """
    tau = float(tau)
    if tau < tau_min(qmap) * (1.0 + 1e-15):
        raise DomainError(
            f"tau={tau} is outside the classical branch (tau >= {tau_min(qmap)})"
        )
    m, E, F = qmap.m_i, qmap.E, qmap.F
    return -tau * math.sqrt(2.0 * E / m) - F * tau * tau / (2.0 * m)


def wkb_validity(z: float, qmap: QuasiTimeMap) -> float:
    """
    Semiclassical smallness parameter delta = m F / (hbar^2 k^3).

    Returns +inf at the turning point.
    """
    k = float(wavenumber(z, qmap))
    if k == 0.0:
        return math.inf
    delta = qmap.m_i * qmap.F / (qmap.hbar ** 2 * k ** 3)
    if delta > 0.1:
        logger.debug(f"WKB parameter {delta:.3g} at z={z} is not small")
    return delta


def tau_quadrature(z: float, qmap: QuasiTimeMap) -> float:
    """
    Quasi-time from the defining integral -int_0^z m / (hbar k(eta)) d eta.

    Only for z on the classical side; the integrable endpoint singularity at the
    turning point is handled by quad's algebraic weight.
    """
    if qmap.E - qmap.F * z < 0:
        raise DomainError(f"Quadrature oracle needs z <= z_t, got z={z}")
    m, hbar = qmap.m_i, qmap.hbar

    def integrand(eta):
        return m / (hbar * float(wavenumber(eta, qmap)))

    if qmap.F > 0 and math.isclose(z, qmap.z_turn, rel_tol=1e-12):
        # 1/k ~ (z_t - eta)^(-1/2)
        scale = m / (hbar * math.sqrt(2.0 * m * qmap.F) / hbar)
        value, _ = integrate.quad(lambda eta: scale, 0.0, z, weight="alg", wvar=(0.0, -0.5))
        return -value
    value, _ = integrate.quad(integrand, 0.0, z, epsabs=1e-14, epsrel=1e-12, limit=200)
    return -value
