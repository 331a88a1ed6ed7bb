"""Special functions: Fresnel integrals, Airy function and Airy zeros."""

import logging
from typing import Tuple

import numpy as np
from scipy import special

logger = logging.getLogger(__name__)

_SQRT_PI_OVER_2 = np.sqrt(np.pi) / 2.0
_EIGHTH_TURN = np.exp(0.25j * np.pi)

# |w| beyond which Ai is taken from its asymptotic series
AIRY_ASYMPTOTIC_RADIUS = 100.0


def fresnel_F(Z):
    """
    Exponential Fresnel integral F(Z) = int_0^Z exp(i x^2) dx.

    Evaluated through the error function of complex argument,
    F(Z) = (sqrt(pi)/2) e^{i pi/4} erf(e^{-i pi/4} Z), which is valid for complex Z.

    Args:
        Z: Real or complex scalar or array

    Returns:
        Complex scalar or array
    """
    Z = np.asarray(Z, dtype=complex)
    value = _SQRT_PI_OVER_2 * _EIGHTH_TURN * special.erf(Z / _EIGHTH_TURN)
    return value if value.ndim else complex(value)


def fresnel_CS(x) -> Tuple:
    """
    Real Fresnel integrals (int_0^x cos t^2 dt, int_0^x sin t^2 dt).

    scipy normalises its integrals to sin(pi t^2 / 2); the argument is rescaled here.
    """
    scale = np.sqrt(2.0 / np.pi)
    s, c = special.fresnel(np.asarray(x, dtype=float) * scale)
    c = c / scale
    s = s / scale
    if np.ndim(c) == 0:
        return float(c), float(s)
    return c, s


def airy_Ai(x) -> Tuple:
    """Ai(x) and Ai'(x) for real x."""
    ai, aip, _, _ = special.airy(np.asarray(x, dtype=float))
    if np.ndim(ai) == 0:
        return float(ai), float(aip)
    return ai, aip


def airy_zero(n: int) -> float:
    """
    n-th negative zero a_n of Ai (n >= 1).

    Starts from the asymptotic estimate -[3 pi (4n - 1) / 8]^{2/3} and polishes with Newton,
    using Ai'' = x Ai.
    """
    if n < 1:
        raise ValueError(f"Airy zero index must be >= 1, got {n}")
    x = -(3.0 * np.pi * (4 * n - 1) / 8.0) ** (2.0 / 3.0)
    for _ in range(50):
        ai, aip = airy_Ai(x)
        step = ai / aip
        x -= step
        if abs(step) < 1e-15 * max(1.0, abs(x)):
            break
    return float(x)


def airy_zeros(n_max: int) -> np.ndarray:
    """First n_max zeros of Ai, strictly decreasing."""
    return np.array([airy_zero(n) for n in range(1, n_max + 1)])


def log_airy_complex(w) -> np.ndarray:
    """
    Logarithm of Ai(w) for complex w away from the negative real axis.

    Moderate |w| uses the exponentially scaled Airy function; larger |w| the
    asymptotic series Ai(w) ~ e^{-zeta} / (2 sqrt(pi) w^{1/4}) (1 - 5/(72 zeta) + 385/(10368 zeta^2)).
    Only exp() of differences of these values is meaningful.
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    out = np.empty_like(w)
    w32 = w * np.sqrt(w)

    near = np.abs(w) <= AIRY_ASYMPTOTIC_RADIUS
    if np.any(near):
        eai, _, _, _ = special.airye(w[near])
        out[near] = np.log(eai) - (2.0 / 3.0) * w32[near]

    far = ~near
    if np.any(far):
        zeta = (2.0 / 3.0) * w32[far]
        series = 1.0 - 5.0 / (72.0 * zeta) + 385.0 / (10368.0 * zeta ** 2)
        out[far] = (-zeta - np.log(2.0 * np.sqrt(np.pi)) - 0.25 * np.log(w[far])
                    + np.log(series))
    return out


def airy_log_derivative_complex(w) -> np.ndarray:
    """Ai'(w) / Ai(w) for complex w, same branch split as log_airy_complex."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    out = np.empty_like(w)

    near = np.abs(w) <= AIRY_ASYMPTOTIC_RADIUS
    if np.any(near):
        eai, eaip, _, _ = special.airye(w[near])
        out[near] = eaip / eai

    far = ~near
    if np.any(far):
        wf = w[far]
        root = np.sqrt(wf)
        out[far] = -root - 0.25 / wf + 5.0 / (32.0 * wf ** 2 * root)
    return out
