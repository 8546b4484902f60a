"""Method-tag dispatch: from summary statistics (or raw data) to a CiResult."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError
from .intervals import (
    METHODS, CiResult, ci_mean_baselines, ci_mean_improved, ci_sd_bernstein, ci_sd_maurer,
    ci_ustat_empirical, ci_variance_hoeffding,
)
from .kernels import KernelSpec, identity_kernel
from .ustat import as_sample, summarize

# family, fixed side (None = caller chooses), default side
_INFO = {
    "var_hoeffding": ("variance", None, "lower"),
    "sd_bernstein_upper": ("variance", "upper", "upper"),
    "sd_bernstein_lower": ("variance", "lower", "lower"),
    "sd_maurer_upper": ("variance", "upper", "upper"),
    "sd_maurer_lower": ("variance", "lower", "lower"),
    "ustat_empirical_hoeffding": ("ustat", None, "lower"),
    "ustat_empirical_bernstein": ("ustat", None, "lower"),
    "ustat_empirical_bernstein_2sided": ("ustat", "two", "two"),
    "mean_improved_hoeffding_1": ("mean", None, "lower"),
    "mean_improved_hoeffding_2": ("mean", None, "lower"),
    "mean_improved_2sided_1": ("mean", "two", "two"),
    "mean_improved_2sided_2": ("mean", "two", "two"),
    "mean_audibert": ("mean", None, "lower"),
    "mean_maurer": ("mean", None, "lower"),
}
assert set(_INFO) == set(METHODS)


def family(method: str) -> str:
    return _info(method)[0]


def default_side(method: str) -> str:
    return _info(method)[2]


def _info(method: str):
    try:
        return _INFO[method]
    except KeyError:
        raise PreconditionError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


@dataclass(frozen=True)
class Stats:
    """Plug-in statistics for one sample.

    ``u``/``w`` are U_n and W_n of the kernel of order ``m``; ``xbar``/``s2``
    are the sample mean and unbiased variance of the raw data.
    """

    n: int
    m: int = 1
    u: float | None = None
    w: float | None = None
    xbar: float | None = None
    s2: float | None = None


def _need(value, what, method):
    if value is None:
        raise PreconditionError(f"{method} needs {what}, which is unavailable for this sample")
    return value


def interval(method: str, stats: Stats, delta: float, side: str | None = None,
             floor_free: bool = False, as_printed: bool = False) -> CiResult:
    fam, fixed, default = _info(method)
    if side is None:
        side = default
    if fixed is not None and side != fixed:
        raise PreconditionError(f"{method} is {fixed}-sided, got side={side!r}")
    n = stats.n
    if fam == "variance":
        s2 = _need(stats.s2, "S_n^2", method)
        if method == "var_hoeffding":
            return ci_variance_hoeffding(s2, n, delta, side, floor_free)
        if method.startswith("sd_bernstein"):
            return ci_sd_bernstein(s2, n, delta, side, floor_free)
        return ci_sd_maurer(s2, n, delta, side)
    if fam == "ustat":
        kind = "hoeffding" if method == "ustat_empirical_hoeffding" else "bernstein"
        return ci_ustat_empirical(kind, _need(stats.u, "U_n", method), _need(stats.w, "W_n", method),
                                  n, stats.m, delta, side, floor_free)
    xbar = _need(stats.xbar, "the sample mean", method)
    s2 = _need(stats.s2, "S_n^2", method)
    if method in ("mean_audibert", "mean_maurer"):
        return ci_mean_baselines(method[5:], xbar, s2, n, delta, side)
    kind = int(method[-1])
    return ci_mean_improved(kind, xbar, s2, n, delta, side, floor_free, as_printed)


def interval_for_sample(values, method: str, delta: float, kernel: KernelSpec | None = None,
                        side: str | None = None, floor_free: bool = False,
                        as_printed: bool = False, symmetrized: bool = True) -> CiResult:
    """Compute the statistics ``method`` needs from raw data and build the interval.

    Data must lie in [0, 1]; U-statistic methods also need the kernel range
    inside [0, 1] (rescale other kernels with ``kernels.rescale_kernel``).
    Variance and mean methods always work with S_n^2 and the sample mean.
    """
    x = as_sample(values)
    if x.ndim == 1 and (x.min() < 0.0 or x.max() > 1.0):
        raise PreconditionError("data must lie in [0, 1]")
    kernel = kernel or identity_kernel()
    fam = family(method)
    if fam == "ustat" and not kernel.within_unit_interval():
        raise PreconditionError(
            f"kernel range [{kernel.lo}, {kernel.hi}] is not inside [0, 1]; rescale it first")
    if fam == "mean" and kernel.kind != "identity":
        raise PreconditionError(f"{method} is an interval for the mean; use the mean kernel")
    n = x.shape[0]
    if fam == "ustat":
        summary = summarize(x, kernel, symmetrized)
        stats = Stats(n=n, m=kernel.order, u=summary.u_n, w=summary.w_n, s2=summary.s2)
    else:
        s = summarize(x, identity_kernel(), symmetrized)
        stats = Stats(n=n, m=1, xbar=s.u_n, s2=s.s2)
    return interval(method, stats, delta, side, floor_free, as_printed)
