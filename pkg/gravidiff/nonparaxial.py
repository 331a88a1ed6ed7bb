"""
Non-paraxial diffraction through the Airy kernel.

Each transverse wave number k propagates along z with the longitudinal Airy wave
of energy eps(k) = E - hbar^2 k^2 / 2m. The kernel and the near-zone single-slit
wave are k-integrals of the Airy quotient q(k, z) = T(kappa z - gamma eps)/T(-gamma eps),
with T(xi) = Ai(xi e^{2 pi i/3}) the outgoing combination (proportional to Ai - i Bi).
"""

import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy import special

from .models import (
    AccuracyWarning,
    AiryPoleError,
    DomainError,
    FieldStrength,
    Grid,
    Species,
    UnitsMode,
)
from .sampling import ComplexAmplitudeField, evaluate_rows
from .specfun import airy_log_derivative_complex, log_airy_complex

logger = logging.getLogger(__name__)

_OMEGA = np.exp(2j * np.pi / 3.0)
_LOG_2_SQRT_PI = math.log(2.0 * math.sqrt(math.pi))

QUOTIENT_MODES = ("exact", "asymptotic", "linear")


@dataclass(frozen=True)
class NonparaxialParams:
    """
    Energy, force and mass of the non-paraxial problem.

    The consistent scale kappa = (2 m F / hbar^2)^(1/3) makes Ai(kappa z - gamma eps)
    solve the longitudinal equation; "paper-literal" uses (hbar^2 F^5)^(1/3) / 2m,
    which is only meaningful in model units.
    """

    E: float
    F: float
    m_i: float
    hbar: float = 1.0
    kappa_strategy: str = "consistent"

    def __post_init__(self):
        if self.F <= 0:
            raise DomainError(f"The Airy kernel needs F > 0, got F={self.F}")
        if self.m_i <= 0:
            raise DomainError(f"Inertial mass must be positive, got {self.m_i}")
        if self.kappa_strategy not in ("consistent", "paper-literal"):
            raise ValueError(f"Unknown kappa strategy '{self.kappa_strategy}'")

    @classmethod
    def from_physics(cls, E: float, species: Species, field: FieldStrength,
                     units: UnitsMode = UnitsMode.MODEL,
                     kappa_strategy: str = "consistent") -> "NonparaxialParams":
        return cls(E=E, F=field.force(species), m_i=species.m_inertial,
                   hbar=units.hbar, kappa_strategy=kappa_strategy)

    @property
    def kappa(self) -> float:
        if self.kappa_strategy == "paper-literal":
            return (self.hbar ** 2 * self.F ** 5) ** (1.0 / 3.0) / (2.0 * self.m_i)
        return (2.0 * self.m_i * self.F / self.hbar ** 2) ** (1.0 / 3.0)

    @property
    def gamma(self) -> float:
        return self.kappa / self.F

    @property
    def k_turn(self) -> float:
        """Transverse wave number where eps(k) = 0."""
        return math.sqrt(2.0 * self.m_i * max(self.E, 0.0)) / self.hbar

    def epsilon(self, k):
        return self.E - (self.hbar * np.asarray(k, dtype=float)) ** 2 / (2.0 * self.m_i)


def _log_traveling(xi: np.ndarray, asymptotic: bool = False) -> np.ndarray:
    w = xi * _OMEGA
    if not asymptotic:
        return log_airy_complex(w)
    zeta = (2.0 / 3.0) * w * np.sqrt(w)
    return -zeta - _LOG_2_SQRT_PI - 0.25 * np.log(w)


def airy_quotient(z: float, k, params: NonparaxialParams, mode: str = "exact"):
    """
    Longitudinal propagation factor q(k, z).

    Args:
        z: Height below the plate (z <= 0)
        k: Transverse wave number(s)
        params: Non-paraxial parameters
        mode: "exact" (Airy functions), "asymptotic" (leading WKB form) or
            "linear" (amplitude factor 1 + kappa z / (4 gamma eps))

    Returns:
        Complex quotient(s); exactly 1 at z = 0

    Raises:
        AiryPoleError: If the denominator vanishes or the quotient is not finite
        DomainError: For linear mode at eps = 0
    """
    if mode not in QUOTIENT_MODES:
        raise ValueError(f"Unknown quotient mode '{mode}'")
    k_arr = np.atleast_1d(np.asarray(k, dtype=float))
    scalar = np.ndim(k) == 0
    if z == 0:
        q = np.ones(k_arr.shape, dtype=complex)
        return complex(q[0]) if scalar else q

    kappa, gamma = params.kappa, params.gamma
    eps = params.epsilon(k_arr)

    if mode == "linear":
        if np.any(eps == 0):
            raise DomainError("Linear quotient is singular at eps = 0")
        q = (1.0 + kappa * z / (4.0 * gamma * eps)).astype(complex)
    else:
        xi0 = -gamma * eps
        xiz = xi0 + kappa * z
        asymptotic = mode == "asymptotic"
        if asymptotic and np.any(xi0 == 0):
            raise AiryPoleError("Asymptotic quotient undefined at eps = 0")
        log_den = _log_traveling(xi0, asymptotic)
        if np.any(~np.isfinite(log_den)) or np.any(log_den.real < -700.0):
            raise AiryPoleError(f"Airy denominator vanishes at z={z}")
        with np.errstate(over="ignore", invalid="ignore"):
            q = np.exp(_log_traveling(xiz, asymptotic) - log_den)
        if not np.all(np.isfinite(q)):
            raise AiryPoleError(f"Airy quotient is not finite at z={z}")
    return complex(q[0]) if scalar else q


def quotient_z_derivative(k, params: NonparaxialParams) -> np.ndarray:
    """dq/dz at z = 0: kappa e^{2 pi i/3} Ai'(w0)/Ai(w0) with w0 = -gamma eps e^{2 pi i/3}."""
    k_arr = np.atleast_1d(np.asarray(k, dtype=float))
    w0 = -params.gamma * params.epsilon(k_arr) * _OMEGA
    return params.kappa * _OMEGA * airy_log_derivative_complex(w0)


@dataclass(frozen=True)
class QuadratureSpec:
    """
    k-integration controls.

    k_max None chooses the cutoff automatically: the evanescent factor must have
    decayed to e^-decay_cutoff and the Airy argument must reach decay_cutoff.
    """

    k_max: Optional[float] = None
    nodes_per_panel: int = 10
    decay_cutoff: float = 40.0
    tail_tol: float = 1e-8
    slope_k_max: float = 1.0e4
    max_nodes: int = 2_000_000


@dataclass
class QuadratureResult:
    value: complex
    k_max: float
    nodes: int
    diagnostics: List[str] = field(default_factory=list)


@lru_cache(maxsize=16)
def _legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    return special.roots_legendre(n)


def _auto_k_max(z: float, params: NonparaxialParams, spec: QuadratureSpec) -> float:
    if spec.k_max is not None:
        return float(spec.k_max)
    if z == 0:
        raise DomainError("The kernel at z = 0 is a delta distribution; set QuadratureSpec.k_max")
    k_decay = params.k_turn + spec.decay_cutoff / abs(z)
    # gamma |eps(k)| >= decay_cutoff
    k_airy = math.sqrt(2.0 * params.m_i * (spec.decay_cutoff / params.gamma + params.E)) / params.hbar
    return max(k_decay, k_airy)


def _nodes(k_max: float, oscillation: float, z: float, params: NonparaxialParams,
           spec: QuadratureSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite Gauss-Legendre nodes on [0, k_max].

    Panels are at most half an oscillation of sin(k * oscillation) wide and are
    graded geometrically toward the turning wave number.
    """
    width = k_max / 32.0
    if oscillation > 0:
        width = min(width, math.pi / oscillation)
    if z != 0:
        width = min(width, 2.0 / abs(z))
    k_turn = params.k_turn
    if k_turn > 0:
        width = min(width, k_turn / 8.0)

    n_panels = int(math.ceil(k_max / width))
    n_nodes = n_panels * spec.nodes_per_panel
    if n_nodes > spec.max_nodes:
        raise DomainError(
            f"Quadrature needs {n_nodes} nodes (limit {spec.max_nodes}); "
            f"reduce k_max or the transverse extent"
        )
    edges = np.linspace(0.0, k_max, n_panels + 1)
    if 0 < k_turn < k_max:
        offsets = k_turn * 0.5 ** np.arange(1, 13)
        graded = np.concatenate([k_turn - offsets, [k_turn], k_turn + offsets])
        edges = np.unique(np.concatenate([edges, graded[(graded > 0) & (graded < k_max)]]))

    t, w = _legendre(spec.nodes_per_panel)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _tail_estimate(values: np.ndarray, weights: np.ndarray) -> float:
    n = len(weights)
    start = n - max(1, n // 10)
    return float(np.max(np.abs(values[..., start:] @ weights[start:])))


def _report(diagnostics: List[str], message: str, warn: bool = True) -> None:
    diagnostics.append(message)
    if warn:
        logger.warning(message)
        warnings.warn(message, AccuracyWarning, stacklevel=3)


def kernel_K(dx, z: float, params: NonparaxialParams,
             quadrature: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    """
    Diffraction kernel K(dx, z) = (1/pi) int_0^k_max q(k, z) cos(k dx) dk.

    For z < 0 the free evanescent part e^{-k|z|} is integrated in closed form
    (|z| / (pi (dx^2 + z^2))) and only the remainder is integrated numerically.

    Args:
        dx: Transverse separation(s)
        z: Height below the plate (z <= 0)
        params: Non-paraxial parameters
        quadrature: Integration controls

    Returns:
        QuadratureResult with value (complex or array, even in dx)
    """
    if z > 0:
        raise DomainError(f"The kernel propagates downward only, got z={z}")
    dx_arr = np.abs(np.atleast_1d(np.asarray(dx, dtype=float)))
    k_max = _auto_k_max(z, params, quadrature)
    nodes, weights = _nodes(k_max, float(dx_arr.max()), z, params, quadrature)

    q = airy_quotient(z, nodes, params)
    if z < 0:
        residual = q - np.exp(-nodes * abs(z))
        base = abs(z) / (math.pi * (dx_arr ** 2 + z * z))
    else:
        residual = q
        base = np.zeros(dx_arr.shape)

    integrand = residual[None, :] * np.cos(np.outer(dx_arr, nodes))
    value = base + (integrand @ weights) / math.pi

    diagnostics: List[str] = []
    tail = _tail_estimate(integrand, weights) / math.pi
    if z < 0 and tail > quadrature.tail_tol:
        _report(diagnostics, f"Kernel tail {tail:.2e} exceeds {quadrature.tail_tol:.0e} at z={z}")
    logger.debug(f"Kernel at z={z}: k_max={k_max:.4g}, {len(nodes)} nodes")

    result = complex(value[0]) if np.ndim(dx) == 0 else value
    return QuadratureResult(value=result, k_max=k_max, nodes=len(nodes), diagnostics=diagnostics)


def _slit_factor(k: np.ndarray, a: np.ndarray) -> np.ndarray:
    # sin(k a) / k, finite at k = 0
    return a[:, None] * np.sinc(np.outer(a, k) / np.pi)


def single_slit_initial(x, L: float):
    """Aperture function 1/sqrt(L) on |x| < L/2, half of it on the edges."""
    x = np.asarray(x, dtype=float)
    d = np.abs(x)
    half = L / 2.0
    return np.where(d < half, 1.0, np.where(d == half, 0.5, 0.0)) / math.sqrt(L)


def nearzone_single_slit(x, z: float, L: float, params: NonparaxialParams,
                         quadrature: QuadratureSpec = QuadratureSpec(),
                         chunk: int = 16, warn: bool = True) -> QuadratureResult:
    """
    Near-zone wave below a single slit.

    psi = (1/(pi sqrt L)) int_0^k_max q(k, z) (sin k a1 - sin k a2)/k dk, a1,2 = x +- L/2,
    with the free evanescent part done in closed form as arctan(a1/|z|) - arctan(a2/|z|).

    Args:
        x: Transverse position(s)
        z: Height below the plate (z <= 0)
        L: Slit width
        params: Non-paraxial parameters
        quadrature: Integration controls
        chunk: Number of x values processed per matrix block
        warn: Log and warn about accuracy problems (diagnostics are always recorded)

    Returns:
        QuadratureResult; value is exact aperture function at z = 0
    """
    if L <= 0:
        raise DomainError(f"Slit width must be positive, got L={L}")
    if z > 0:
        raise DomainError(f"The near-zone wave is defined below the plate, got z={z}")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    scalar = np.ndim(x) == 0
    if z == 0:
        value = single_slit_initial(x_arr, L).astype(complex)
        return QuadratureResult(value=complex(value[0]) if scalar else value, k_max=0.0, nodes=0)

    a1 = x_arr + L / 2.0
    a2 = x_arr - L / 2.0
    k_max = _auto_k_max(z, params, quadrature)
    reach = float(max(np.abs(a1).max(), np.abs(a2).max()))
    nodes, weights = _nodes(k_max, reach, z, params, quadrature)

    residual = airy_quotient(z, nodes, params) - np.exp(-nodes * abs(z))
    closed = np.arctan(a1 / abs(z)) - np.arctan(a2 / abs(z))

    integral = np.empty(x_arr.shape, dtype=complex)
    tail = 0.0
    for start in range(0, len(x_arr), chunk):
        sl = slice(start, start + chunk)
        block = residual[None, :] * (_slit_factor(nodes, a1[sl]) - _slit_factor(nodes, a2[sl]))
        integral[sl] = block @ weights
        tail = max(tail, _tail_estimate(block, weights))

    value = (closed + integral) / (math.pi * math.sqrt(L))

    diagnostics: List[str] = []
    tail /= math.pi * math.sqrt(L)
    if tail > quadrature.tail_tol:
        _report(diagnostics, f"Near-zone tail {tail:.2e} exceeds {quadrature.tail_tol:.0e} at z={z}", warn)
    if params.k_turn * abs(z) > 1.0:
        _report(diagnostics, f"z={z} is outside the near zone (k|z| = {params.k_turn * abs(z):.2f})", warn)

    return QuadratureResult(
        value=complex(value[0]) if scalar else value,
        k_max=k_max,
        nodes=len(nodes),
        diagnostics=diagnostics,
    )


def nearzone_slope(x, L: float, params: NonparaxialParams,
                   quadrature: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    """
    d psi / dz at the plate, for x off the slit edges.

    The free evanescent term gives (1/a1 - 1/a2)/(pi sqrt L); the gravity remainder
    int (q_z - k)(sin k a1 - sin k a2)/k dk decays like 1/k^3 and is truncated at slope_k_max.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    a1 = x_arr + L / 2.0
    a2 = x_arr - L / 2.0
    if np.any(a1 == 0) or np.any(a2 == 0):
        raise DomainError("The plate-level slope is singular on the slit edges")
    k_max = quadrature.k_max if quadrature.k_max is not None else quadrature.slope_k_max
    reach = float(max(np.abs(a1).max(), np.abs(a2).max()))
    nodes, weights = _nodes(k_max, reach, 0.0, params, quadrature)

    residual = quotient_z_derivative(nodes, params) - nodes
    block = residual[None, :] * (_slit_factor(nodes, a1) - _slit_factor(nodes, a2))
    value = ((1.0 / a1 - 1.0 / a2) + block @ weights) / (math.pi * math.sqrt(L))
    scalar = np.ndim(x) == 0
    return QuadratureResult(value=complex(value[0]) if scalar else value, k_max=k_max, nodes=len(nodes))


def nearzone_smallz(x, z: float, L: float, params: NonparaxialParams):
    """
    Closed-form small-z wave for a particle dropping from rest.

    phi(x) + (kappa z / (8 sqrt L)) [(x - L/2)^2 - (x + L/2)^2] = phi(x) - kappa z x sqrt(L) / 4.
    The free evanescent term of the slope is not part of this expression.
    """
    x = np.asarray(x, dtype=float)
    value = single_slit_initial(x, L) - params.kappa * z * x * math.sqrt(L) / 4.0
    return value if value.ndim else float(value)


def nearzone_grid(L: float, params: NonparaxialParams, grid: Grid,
                  quadrature: QuadratureSpec = QuadratureSpec(),
                  threads: int = 1) -> ComplexAmplitudeField:
    """
    Evaluate the near-zone single-slit wave on a grid below the plate.

    Raises:
        DomainError: If the grid reaches above the plate
    """
    if grid.z_max > 0:
        raise DomainError(f"Near-zone grids must lie at z <= 0, got z_max={grid.z_max}")
    logger.info(f"Near-zone pattern on {grid.nz}x{grid.nx} nodes (E={params.E}, F={params.F})")

    diagnostics: List[str] = []

    def row(z: float, xs: np.ndarray) -> np.ndarray:
        result = nearzone_single_slit(xs, z, L, params, quadrature, warn=False)
        diagnostics.extend(result.diagnostics)
        return result.value

    amplitudes = evaluate_rows(row, grid, threads)
    diagnostics = sorted(set(diagnostics))
    for message in diagnostics:
        logger.warning(message)
    return ComplexAmplitudeField(grid=grid, amplitudes=amplitudes, diagnostics=diagnostics)
