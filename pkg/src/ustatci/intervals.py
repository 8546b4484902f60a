"""Confidence intervals built by reversing tail bounds and composing them by union bounds.

Half-widths are reported as a decomposition into named terms:

``base``      sqrt(C0 L / B), a variance-free part split off by the square-root inequality
``variance``  the term carrying the plug-in variance statistic
``cross``     the price of estimating the variance (nuisance radius folded in)
``linear``    the D L / B part and other terms linear in L

The terms always add up to ``half_width``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .errors import BudgetError, PreconditionError, VacuousBoundError
from .tails import BoundParams, block_count, hoeffding_ustat_params

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
# sqrt(S^2) <= sqrt(V) + SD_LOWER_CONST * sqrt(log(1/delta) / k)
SD_LOWER_CONST = SQRT2 / 2 + math.sqrt(6.0) / 6
# sqrt(V) <= sqrt(S^2) + SD_UPPER_CONST * sqrt(log(1/delta) / k)
SD_UPPER_CONST = SQRT2 / 2 + math.sqrt(42.0) / 6
# linear + cross coefficient of the two-sided U-statistic bound when 2m | n
TWO_SIDED_USTAT_CONST = (4 + SQRT2 * (3 + math.sqrt(21.0))) / 3

TERM_NAMES = ("base", "variance", "cross", "linear")

SIDES = ("upper", "lower", "two")

METHODS = (
    "var_hoeffding",
    "sd_bernstein_upper",
    "sd_bernstein_lower",
    "ustat_empirical_hoeffding",
    "ustat_empirical_bernstein",
    "ustat_empirical_bernstein_2sided",
    "mean_improved_hoeffding_1",
    "mean_improved_hoeffding_2",
    "mean_improved_2sided_1",
    "mean_improved_2sided_2",
    "mean_audibert",
    "mean_maurer",
    "sd_maurer_upper",
    "sd_maurer_lower",
)


@dataclass(frozen=True)
class CiResult:
    """A one- or two-sided interval for ``target`` at level 1 - delta.

    ``side="upper"`` means (-inf, center + half_width], ``"lower"`` means
    [center - half_width, inf). Reported endpoints are clipped to ``bounds``,
    the range the target can take; ``covers`` uses the raw endpoints.
    """

    method: str
    side: str
    level: float
    center: float
    half_width: float
    terms: dict = field(default_factory=dict)
    target: str = "theta"
    n: int = 0
    m: int = 1
    floor_free: bool = False
    bounds: tuple = (0.0, 1.0)

    @property
    def delta(self) -> float:
        return 1.0 - self.level

    @property
    def raw_lower(self) -> float:
        return -math.inf if self.side == "upper" else self.center - self.half_width

    @property
    def raw_upper(self) -> float:
        return math.inf if self.side == "lower" else self.center + self.half_width

    @property
    def lower(self) -> float:
        return max(self.raw_lower, self.bounds[0])

    @property
    def upper(self) -> float:
        return min(self.raw_upper, self.bounds[1])

    def covers(self, value: float) -> bool:
        return self.raw_lower <= value <= self.raw_upper

    def to_dict(self) -> dict:
        return {
            "method": self.method, "side": self.side, "level": self.level,
            "target": self.target, "n": self.n, "m": self.m,
            "center": self.center, "lower": self.lower, "upper": self.upper,
            "half_width": self.half_width, "terms": dict(self.terms),
            "floor_free": self.floor_free,
        }


def _check_delta(delta: float):
    if not 0.0 < delta < 1.0:
        raise PreconditionError(f"delta must lie in (0, 1), got {delta}")


def _check_side(side: str, allowed=SIDES):
    if side not in allowed:
        raise PreconditionError(f"side must be one of {allowed}, got {side!r}")


def _terms(**kw) -> dict:
    return {name: float(kw.get(name, 0.0)) for name in TERM_NAMES}


def _result(method, side, delta, center, terms, **kw) -> CiResult:
    return CiResult(method=method, side=side, level=1.0 - delta, center=center,
                    half_width=math.fsum(terms.values()), terms=terms, **kw)


def unscale(ci: CiResult, lo: float, hi: float) -> CiResult:
    """Map an interval computed for (h - lo) / (hi - lo) back to the scale of h."""
    w = hi - lo
    b0, b1 = ci.bounds
    return replace(
        ci, center=lo + w * ci.center, half_width=w * ci.half_width,
        terms={k: w * v for k, v in ci.terms.items()}, bounds=(lo + w * b0, lo + w * b1),
    )


# -- inversion and union-bound machinery ----------------------------------------------------

def _log_ratio(a: float, delta: float) -> float:
    if not delta > 0:
        raise PreconditionError(f"delta must be > 0, got {delta}")
    if delta >= a:
        raise VacuousBoundError(f"delta = {delta} >= A = {a}: log(A/delta) <= 0")
    return math.log(a / delta)


def invert_bound(bp: BoundParams, delta: float) -> float:
    """Deviation sqrt((C/B) L) + (D/B) L with L = log(A / delta).

    Holds with probability at least 1 - delta; conservative relative to
    :func:`invert_bound_exact` by the square-root inequality.
    """
    L = _log_ratio(bp.a_const, delta)
    return math.sqrt(bp.c_const / bp.b_const * L) + bp.d_const / bp.b_const * L


def invert_bound_exact(bp: BoundParams, delta: float) -> float:
    """The root of A exp(-B eps^2 / (C + D eps)) = delta."""
    L = _log_ratio(bp.a_const, delta)
    D, B, C = bp.d_const, bp.b_const, bp.c_const
    return (D * L + math.sqrt(D * D * L * L + 4 * B * C * L)) / (2 * B)


@dataclass(frozen=True)
class MainBound:
    """Tail bound A exp(-B eps^2 / (c0 + c1 var + D eps)) whose variance is unknown."""

    b_const: float
    c0: float
    c1: float
    d_const: float = 0.0
    a_const: float = 1.0

    def params(self, var: float) -> BoundParams:
        return BoundParams(self.a_const, self.b_const, self.c0 + self.c1 * var, self.d_const)


@dataclass(frozen=True)
class Nuisance:
    """A 1 - budget statement on the unknown variance.

    ``kind="variance"``: var <= statistic + radius(budget).
    ``kind="sd"``: sqrt(var) <= sqrt(statistic) + radius(budget).
    """

    kind: str
    statistic: float
    radius: Callable[[float], float]

    def __post_init__(self):
        if self.kind not in ("variance", "sd"):
            raise ValueError(f"unknown nuisance kind {self.kind!r}")
        if self.statistic < 0:
            raise PreconditionError("variance statistic must be >= 0")


def compose_union(main: MainBound, budgets: Sequence[float], delta: float,
                  nuisance: Nuisance | None = None, variance: float | None = None) -> dict:
    """Compose a deviation bound with a nuisance variance bound by the union bound.

    ``budgets`` lists the failure probability of each event: one entry per
    direction of the main deviation (all equal, since one half-width serves
    every direction) followed by the nuisance budget when ``nuisance`` is
    given. They must add up to ``delta``. Without a nuisance the variance must
    be known and the result is plain inversion.

    Returns the term decomposition of the composed half-width.
    """
    budgets = [float(b) for b in budgets]
    if not budgets or any(b <= 0 for b in budgets):
        raise BudgetError("budgets must be positive")
    if abs(math.fsum(budgets) - delta) > 1e-12 * delta:
        raise BudgetError(f"budgets {budgets} do not add up to delta = {delta}")
    main_budgets = budgets[:-1] if nuisance is not None else budgets
    if not main_budgets:
        raise BudgetError("need at least one budget for the main deviation")
    if max(main_budgets) - min(main_budgets) > 1e-15:
        raise BudgetError("main deviation budgets must be equal")
    B = main.b_const
    L = _log_ratio(main.a_const, main_budgets[0])
    linear = main.d_const / B * L
    if nuisance is None:
        if variance is None:
            raise PreconditionError("a single-event bound needs the variance")
        return _terms(variance=math.sqrt((main.c0 + main.c1 * variance) / B * L), linear=linear)
    r = nuisance.radius(budgets[-1])
    s = nuisance.statistic
    if nuisance.kind == "variance":
        return _terms(
            variance=math.sqrt((main.c0 + main.c1 * s) / B * L),
            cross=math.sqrt(main.c1 * r / B * L),
            linear=linear,
        )
    return _terms(
        base=math.sqrt(main.c0 / B * L),
        variance=math.sqrt(main.c1 * s / B * L),
        cross=r * math.sqrt(main.c1 / B * L),
        linear=linear,
    )


# -- nuisance radii -----------------------------------------------------------

def variance_radius(n: int, m: int, budget: float, floor_free: bool = False) -> float:
    """Hoeffding radius for W_n - sigma^2 (eta in [0, 1/2], floor(n/(2m)) blocks)."""
    return invert_bound(hoeffding_ustat_params(n, 2 * m, 0.5, floor_free=floor_free), budget)


def sd_radius(n: int, m: int, budget: float, upper: bool = True, floor_free: bool = False) -> float:
    """Bernstein radius on the standard-deviation scale.

    ``upper=True`` bounds sqrt(sigma^2) - sqrt(W_n); otherwise sqrt(W_n) - sqrt(sigma^2).
    """
    k = block_count(n, 2 * m, floor_free)
    const = SD_UPPER_CONST if upper else SD_LOWER_CONST
    return const * math.sqrt(_log_ratio(1.0, budget) / k)


# -- variance and standard deviation ------------------------------------------

_SD_DIRECTIONS = {"upper": "upper", "upper_on_V": "upper", "lower": "lower", "upper_on_Sn": "lower"}


def ci_wstat(kind: str, w: float, n: int, m: int, delta: float, side: str = "lower",
             floor_free: bool = False) -> CiResult:
    """Intervals for sigma^2 = Var h (hoeffding) or its square root (bernstein) from W_n.

    With m = 1 and the identity kernel W_n = S_n^2 and these are the sample
    variance intervals.
    """
    _check_delta(delta)
    if n < 2 * m:
        raise PreconditionError(f"need n >= 2m = {2 * m}, got n = {n}")
    if w < 0:
        raise PreconditionError("W_n must be >= 0")
    k = block_count(n, 2 * m, floor_free)
    info = dict(n=n, m=m, floor_free=floor_free)
    if kind == "hoeffding":
        _check_side(side)
        L = math.log((2.0 if side == "two" else 1.0) / delta)
        hw = math.sqrt(L / (8 * k))
        return _result("var_hoeffding", side, delta, w, _terms(variance=hw),
                       target="variance", bounds=(0.0, 0.5), **info)
    if kind == "bernstein":
        if side not in _SD_DIRECTIONS:
            raise PreconditionError("standard deviation intervals are one-sided: upper or lower")
        side = _SD_DIRECTIONS[side]
        r = math.sqrt(math.log(1.0 / delta) / k)
        tail = math.sqrt(42.0) / 6 if side == "upper" else math.sqrt(6.0) / 6
        return _result(f"sd_bernstein_{side}", side, delta, math.sqrt(w),
                       _terms(variance=SQRT2 / 2 * r, linear=tail * r),
                       target="sd", bounds=(0.0, math.sqrt(0.5)), **info)
    raise PreconditionError(f"kind must be 'hoeffding' or 'bernstein', got {kind!r}")


def ci_variance_hoeffding(s2: float, n: int, delta: float, side: str = "lower",
                          floor_free: bool = False) -> CiResult:
    """S_n^2 - Var X <= sqrt(log(1/delta) / (8 floor(n/2))), either direction."""
    # n / (4(n - 1)) is the largest S_n^2 attainable by n points in [0, 1]
    if n > 1 and not 0.0 <= s2 <= n / (4.0 * (n - 1)) + 1e-12:
        log.warning("S_n^2 = %r is impossible for %d points in [0, 1]", s2, n)
    return ci_wstat("hoeffding", s2, n, 1, delta, side, floor_free)


def ci_sd_bernstein(s2: float, n: int, delta: float, direction: str = "upper",
                    floor_free: bool = False) -> CiResult:
    """One-sided intervals for sqrt(Var X) from sqrt(S_n^2).

    ``direction="upper"`` bounds sqrt(Var X) from above with constant
    sqrt(2)/2 + sqrt(42)/6; ``"lower"`` from below with sqrt(2)/2 + sqrt(6)/6.
    """
    return ci_wstat("bernstein", s2, n, 1, delta, direction, floor_free)


def ci_sd_maurer(s2: float, n: int, delta: float, direction: str = "upper") -> CiResult:
    """Baseline intervals for sqrt(Var X), half-width sqrt(2 log(1/delta) / (n - 1))."""
    _check_delta(delta)
    if n < 2:
        raise PreconditionError(f"need n >= 2, got n = {n}")
    if s2 < 0:
        raise PreconditionError("S_n^2 must be >= 0")
    side = _SD_DIRECTIONS.get(direction)
    if side is None:
        raise PreconditionError("direction must be 'upper' or 'lower'")
    hw = math.sqrt(2.0 * math.log(1.0 / delta) / (n - 1))
    return _result(f"sd_maurer_{side}", side, delta, math.sqrt(s2), _terms(variance=hw),
                   target="sd", n=n, m=1, bounds=(0.0, math.sqrt(0.5)))


# -- U-statistics -------------------------------------------------------------

def _side_budgets(side: str, delta: float, with_nuisance: bool = True) -> list:
    parts = (3 if side == "two" else 2) if with_nuisance else (2 if side == "two" else 1)
    return [delta / parts] * parts


def ci_ustat_empirical(kind: str, u: float, w: float, n: int, m: int, delta: float,
                       side: str = "lower", floor_free: bool = False, c: float = 2.0) -> CiResult:
    """Empirical interval for theta = E h, h in [0, 1], with the variance estimated by W_n.

    One-sided intervals split delta in halves between the deviation of U_n and
    the variance event; the two-sided interval splits it in thirds.
    ``kind="hoeffding"`` plugs in the Hoeffding variance bound,
    ``kind="bernstein"`` the Bernstein standard-deviation bound.
    """
    _check_delta(delta)
    _check_side(side)
    if n < 2 * m:
        raise PreconditionError(f"need n >= 2m = {2 * m}, got n = {n}")
    if w < 0:
        raise PreconditionError("W_n must be >= 0")
    if not 0.0 <= u <= 1.0:
        raise PreconditionError(f"U_n = {u} is outside [0, 1]")
    main = MainBound(b_const=block_count(n, m, floor_free), c0=0.0, c1=2.0, d_const=2.0 * c / 3.0)
    if kind == "hoeffding":
        nuis = Nuisance("variance", w, lambda b: variance_radius(n, m, b, floor_free))
        method = "ustat_empirical_hoeffding"
    elif kind == "bernstein":
        nuis = Nuisance("sd", w, lambda b: sd_radius(n, m, b, True, floor_free))
        method = "ustat_empirical_bernstein_2sided" if side == "two" else "ustat_empirical_bernstein"
    else:
        raise PreconditionError(f"kind must be 'hoeffding' or 'bernstein', got {kind!r}")
    terms = compose_union(main, _side_budgets(side, delta), delta, nuis)
    return _result(method, side, delta, u, terms, target="theta", n=n, m=m, floor_free=floor_free)


def classical_two_sided_halfwidth(w: float, n: int, m: int, delta: float) -> float:
    """Earlier two-sided empirical Bernstein half-width for U-statistics (needs 2m | n)."""
    _check_delta(delta)
    L = math.log(4.0 / delta)
    return math.sqrt(2.0 * m * w / n * L) + 5.0 * m / n * L


# -- the mean -----------------------------------------------------------------

def ci_mean_improved(kind: int, xbar: float, s2: float, n: int, delta: float,
                     side: str = "lower", floor_free: bool = False,
                     as_printed: bool = False) -> CiResult:
    """Empirical intervals for E X, X in [0, 1], from the improved Hoeffding bound.

    kind 1 plugs in the Hoeffding variance bound, kind 2 the Bernstein
    standard-deviation bound. Two-sided intervals use log(3/delta) throughout;
    ``as_printed`` reproduces the published kind-1 display with log(4/delta)
    in its first term.
    """
    _check_delta(delta)
    _check_side(side)
    if n < 2:
        raise PreconditionError(f"need n >= 2, got n = {n}")
    if s2 < 0:
        raise PreconditionError("S_n^2 must be >= 0")
    if not 0.0 <= xbar <= 1.0:
        raise PreconditionError(f"sample mean {xbar} is outside [0, 1]")
    main = MainBound(b_const=3.0 * n, c0=1.0, c1=2.0)
    if kind == 1:
        nuis = Nuisance("variance", s2, lambda b: variance_radius(n, 1, b, floor_free))
    elif kind == 2:
        nuis = Nuisance("sd", s2, lambda b: sd_radius(n, 1, b, True, floor_free))
    else:
        raise PreconditionError(f"kind must be 1 or 2, got {kind!r}")
    terms = compose_union(main, _side_budgets(side, delta), delta, nuis)
    if side == "two":
        method = f"mean_improved_2sided_{kind}"
        if as_printed and kind == 1:
            terms["variance"] = math.sqrt((1.0 + 2.0 * s2) / (3.0 * n) * math.log(4.0 / delta))
    else:
        method = f"mean_improved_hoeffding_{kind}"
    return _result(method, side, delta, xbar, terms, target="mean", n=n, m=1,
                   floor_free=floor_free)


def ci_mean_baselines(which: str, xbar: float, s2: float, n: int, delta: float,
                      side: str = "lower") -> CiResult:
    """The two baseline empirical Bernstein intervals for the mean (tags mean_audibert, mean_maurer)."""
    _check_delta(delta)
    _check_side(side, ("upper", "lower"))
    if n < 2:
        raise PreconditionError(f"need n >= 2, got n = {n}")
    if s2 < 0:
        raise PreconditionError("S_n^2 must be >= 0")
    L = math.log(2.0 / delta)
    if which == "audibert":
        terms = _terms(variance=math.sqrt(2.0 * (n - 1) * s2 / n ** 2 * L), linear=3.0 * L / n)
    elif which == "maurer":
        terms = _terms(variance=math.sqrt(2.0 * s2 / n * L), linear=7.0 * L / (3.0 * (n - 1)))
    else:
        raise PreconditionError(f"which must be 'audibert' or 'maurer', got {which!r}")
    return _result(f"mean_{which}", side, delta, xbar, terms, target="mean", n=n, m=1)
