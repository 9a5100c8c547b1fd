"""Closed-form constants of the length-versus-diameter argument."""

from __future__ import annotations

import logging
import math
from typing import Optional

from ..core.config import get_settings
from ..core.errors import DomainError
from ..core.models import ConstantsBundle

logger = logging.getLogger(__name__)

LAMBDA0_MARGIN = 1e-12


def _power(base: float, exponent: float) -> float:
    try:
        return math.pow(base, exponent)
    except OverflowError:
        return math.inf


def _check_theta(theta: float) -> None:
    if not 0 < theta < 1:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")


def _check_alpha(alpha: float) -> None:
    if not 0.5 < alpha < 1:
        raise DomainError(f"alpha must lie in (1/2, 1), got {alpha}")


def rho(theta: float, m: int) -> float:
    """Weighting factor 3 m (m + 1) / theta."""
    _check_theta(theta)
    return 3.0 * m * (m + 1) / theta


def proof_constants(theta: float, m: int) -> tuple[float, float, float, float]:
    """
    (rho, C1, lambda1, C) for the iteration with m-point index sets.

    C1 = (rho**(m-1) - 1)/(rho - 1), lambda1 = 1/(2 m C1) and
    C = 12 (m(m-1)/2 rho**(m-2) + m). Overflowing values become inf.
    """
    if m < 2:
        raise DomainError(f"Index sets need at least two points, got m={m}")
    r = rho(theta, m)
    c1 = (_power(r, m - 1) - 1.0) / (r - 1.0)
    lambda1 = 1.0 / (2.0 * m * c1)
    big_c = 12.0 * (m * (m - 1) / 2.0 * _power(r, m - 2) + m)
    return r, c1, lambda1, big_c


def m_star(alpha: float) -> float:
    """Bounded turning constant (1 + alpha)/(1 - alpha/2)."""
    return (1.0 + alpha) / (1.0 - alpha / 2.0)


def decay_premise(theta: float, big_m: float) -> float:
    """(1 - 1/M)(1 + theta)/(1 - theta); the decay-index bound needs alpha above it."""
    return (1.0 - 1.0 / big_m) * (1.0 + theta) / (1.0 - theta)


def p_bound(theta: float, big_m: float, alpha: float) -> int:
    """
    Size p past which a bounded turning medial set must have a decay index.

    p is the first integer strictly above
    2 + (-log(1 - premise/alpha)) / log(2/(1 - theta)).

    Raises:
        DomainError: If alpha does not exceed the premise value
    """
    _check_theta(theta)
    if big_m < 1:
        raise DomainError(f"Bounded turning constant must be at least 1, got {big_m}")
    premise = decay_premise(theta, big_m)
    if not alpha > premise:
        raise DomainError(
            f"alpha={alpha} must exceed (1 - 1/M)(1 + theta)/(1 - theta) = {premise:.6g}"
        )
    bound = 2.0 + -math.log(1.0 - premise / alpha) / math.log(2.0 / (1.0 - theta))
    return math.floor(bound) + 1


def theta_from_alpha(alpha: float) -> float:
    """
    Midpoint of the admissible theta interval for alpha.

    With r = alpha / (1 - 1/M*), any theta below (r - 1)/(r + 1) satisfies the
    decay premise strictly; half that value is returned.
    """
    _check_alpha(alpha)
    r = alpha / (1.0 - 1.0 / m_star(alpha))
    return 0.5 * (r - 1.0) / (r + 1.0)


def ramsey_upper_bound(p: int, k: int, c: Optional[float] = None) -> float:
    """
    Upper bound exp(c K**(p-2) log K) on the 3-uniform Ramsey number R3(p, K).

    Informational only; inf when it exceeds double precision.
    """
    c = get_settings().witness.ramsey_c if c is None else c
    if p < 3 or k < 3:
        raise DomainError(f"Ramsey bound needs p, K >= 3, got p={p}, K={k}")
    if c <= 0:
        raise DomainError(f"Ramsey constant must be positive, got {c}")
    exponent = c * _power(float(k), p - 2) * math.log(k)
    return _power(math.e, exponent)


def constants(
    theta: float,
    m: int,
    alpha: Optional[float] = None,
    k: Optional[int] = None,
    ramsey_c: Optional[float] = None,
) -> ConstantsBundle:
    """
    Every constant of the extraction pipeline in one bundle.

    Without alpha only rho, C1, lambda1 and C are filled in. With alpha the
    bundle adds M*, p and lambda0 = min((2 alpha - 1)/3 - 1e-12, lambda1); with
    K (at least 3) it adds the Ramsey bound.

    Raises:
        DomainError: If theta, m or alpha is out of range or alpha fails the decay premise
    """
    _check_theta(theta)
    if m < 3:
        raise DomainError(f"m must be at least 3, got {m}")
    r, c1, lambda1, big_c = proof_constants(theta, m)
    bundle = ConstantsBundle(theta=theta, m=m, rho=r, c1=c1, lambda1=lambda1, big_c=big_c)
    if alpha is None:
        return bundle

    _check_alpha(alpha)
    star = m_star(alpha)
    p = p_bound(theta, star, alpha)
    bundle.alpha = alpha
    bundle.m_star = star
    bundle.p = p
    bundle.lambda0 = min((2.0 * alpha - 1.0) / 3.0 - LAMBDA0_MARGIN, lambda1)
    if k is not None:
        bundle.k = k
        if k >= 3:
            bundle.ramsey_bound = ramsey_upper_bound(p, k, ramsey_c)

    logger.debug(f"constants(theta={theta}, m={m}, alpha={alpha}) = {bundle}")
    return bundle
