"""Tail-probability upper bounds of sub-gamma form A exp(-B eps^2 / (C + D eps)).

Every named bound maps to a :class:`BoundParams` and is evaluated by
:func:`generic_tail`. Outputs are capped at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PreconditionError


@dataclass(frozen=True)
class BoundParams:
    """Pr(X >= eps) <= A exp(-B eps^2 / (C + D eps)); D = 0 is the Hoeffding form."""

    a_const: float
    b_const: float
    c_const: float
    d_const: float = 0.0

    def __post_init__(self):
        if not (self.a_const > 0 and self.b_const > 0):
            raise PreconditionError("BoundParams needs A > 0 and B > 0")
        if self.c_const < 0 or self.d_const < 0:
            raise PreconditionError("BoundParams needs C >= 0 and D >= 0")


@dataclass(frozen=True)
class ArconesParams:
    varsigma_sq: float
    m: int

    def __post_init__(self):
        if self.varsigma_sq < 0:
            raise PreconditionError("conditional variance must be >= 0")
        if self.m < 1:
            raise PreconditionError("kernel order must be >= 1")


def block_count(n: int, k: int, floor_free: bool = False) -> float:
    """floor(n / k), or its lower bound (n - k + 1) / k when ``floor_free``."""
    if k < 1 or n < k:
        raise PreconditionError(f"need 1 <= k <= n, got n = {n}, k = {k}")
    if floor_free:
        return (n - k + 1) / k
    return n // k


def c_constant(lo: float, hi: float) -> float:
    return 2.0 * max(abs(lo), abs(hi))


def generic_tail(bp: BoundParams, eps: float) -> float:
    """min(1, A exp(-B eps^2 / (C + D eps))).

    With C = D = 0 the limit for eps > 0 is 0 (a point mass does not deviate).
    """
    if eps <= 0:
        raise PreconditionError(f"eps must be > 0, got {eps}")
    denom = bp.c_const + bp.d_const * eps
    if denom == 0.0:
        return 0.0
    return min(1.0, bp.a_const * math.exp(-bp.b_const * eps * eps / denom))


def _positive(name, value):
    if not value > 0:
        raise PreconditionError(f"{name} must be > 0, got {value}")


# -- parameter maps -----------------------------------------------------------

def hoeffding_ustat_params(n, m, range_width, two_sided=False, floor_free=False) -> BoundParams:
    _positive("range_width", range_width)
    k = block_count(n, m, floor_free)
    return BoundParams(2.0 if two_sided else 1.0, 2.0 * k, range_width ** 2, 0.0)


def bernstein_ustat_params(n, m, sigma_sq, c, two_sided=False, floor_free=False) -> BoundParams:
    if sigma_sq < 0 or c < 0:
        raise PreconditionError("sigma_sq and c must be >= 0")
    k = block_count(n, m, floor_free)
    return BoundParams(2.0 if two_sided else 1.0, k, 2.0 * sigma_sq, 2.0 * c / 3.0)


def arcones_linear_coefficient(m: int) -> float:
    return 2.0 ** (m + 3) * m ** (m - 1) + (2.0 / 3.0) / m ** 2


def arcones_params(n, ap: ArconesParams, floor_free=False) -> BoundParams:
    k = block_count(n, ap.m, floor_free)
    return BoundParams(4.0, k, 2.0 * ap.m * ap.varsigma_sq, arcones_linear_coefficient(ap.m))


def bennett_mean_params(n, big_sigma_sq, c, two_sided=False, as_printed=False) -> BoundParams:
    """Classic Bernstein bounds for the sample mean.

    The printed two-sided form drops the factor n from the exponent; it is only
    reproduced with ``as_printed=True``.
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if big_sigma_sq < 0 or c < 0:
        raise PreconditionError("variance and c must be >= 0")
    rate = 1.0 if (two_sided and as_printed) else float(n)
    return BoundParams(2.0 if two_sided else 1.0, rate, big_sigma_sq / 2.0, 2.0 * c / 3.0)


def improved_hoeffding_params(n, range_width, var) -> BoundParams:
    _positive("range_width", range_width)
    if var < 0:
        raise PreconditionError("var must be >= 0")
    return BoundParams(1.0, 3.0 * n, range_width ** 2 + 2.0 * var, 0.0)


def hoeffding_mean_params(n, range_width, two_sided=False) -> BoundParams:
    _positive("range_width", range_width)
    if n < 1:
        raise PreconditionError("n must be >= 1")
    return BoundParams(2.0 if two_sided else 1.0, 2.0 * n, range_width ** 2, 0.0)


# -- named bounds -------------------------------------------------------------

def hoeffding_ustat_tail(n, m, eps, range_width, two_sided=False, floor_free=False) -> float:
    """Hoeffding bound for U_n - theta with floor(n/m) blocks."""
    return generic_tail(hoeffding_ustat_params(n, m, range_width, two_sided, floor_free), eps)


def bernstein_ustat_tail(n, m, eps, sigma_sq, c, two_sided=False, floor_free=False) -> float:
    return generic_tail(bernstein_ustat_params(n, m, sigma_sq, c, two_sided, floor_free), eps)


def arcones_tail(n, m, eps, ap: ArconesParams, floor_free=False) -> float:
    """Two-sided Arcones bound for kernels in [0, 1]; conditional variance is user supplied."""
    if ap.m != m:
        raise PreconditionError(f"ArconesParams is for order {ap.m}, not {m}")
    return generic_tail(arcones_params(n, ap, floor_free), eps)


def bennett_mean_tail(n, eps, big_sigma_sq, c, two_sided=False, as_printed=False) -> float:
    return generic_tail(bennett_mean_params(n, big_sigma_sq, c, two_sided, as_printed), eps)


def improved_hoeffding_mean_tail(n, eps, range_width, var) -> float:
    """exp(-3 n eps^2 / ((b - a)^2 + 2 var)); holds for either direction."""
    return generic_tail(improved_hoeffding_params(n, range_width, var), eps)


def hoeffding_mean_tail(n, eps, range_width, two_sided=False) -> float:
    return generic_tail(hoeffding_mean_params(n, range_width, two_sided), eps)
