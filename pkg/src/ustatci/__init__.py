"""Concentration bounds and empirical confidence intervals for U-statistics,
their variances and the sample mean."""

from .errors import (
    ArityError, BudgetError, EnumerationCapError, KernelRangeError, PreconditionError,
    VacuousBoundError,
)
from .intervals import (
    METHODS, CiResult, ci_mean_baselines, ci_mean_improved, ci_sd_bernstein, ci_sd_maurer,
    ci_ustat_empirical, ci_variance_hoeffding, ci_wstat, compose_union, invert_bound,
)
from .kernels import (
    KernelSpec, VarianceKernel, closure_kernel, identity_kernel, rescale_kernel, variance_kernel,
)
from .methods import Stats, interval, interval_for_sample
from .tails import ArconesParams, BoundParams, generic_tail
from .ustat import UStatSummary, compute_sample_variance, compute_ustat, compute_w, summarize

__version__ = "0.1.0"
