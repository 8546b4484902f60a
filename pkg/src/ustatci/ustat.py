"""Exact U-statistics: U_n, W_n / W~_n and the unbiased sample variance."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import EnumerationCapError, PreconditionError
from .kernels import KernelSpec, VarianceKernel, eval_batch, eval_kernel

log = logging.getLogger(__name__)

DEFAULT_CAP = 2_000_000


def as_sample(values) -> np.ndarray:
    """Validate and convert a sample to a float array (first axis = observations)."""
    x = np.asarray(values, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.shape[0] < 1:
        raise PreconditionError("sample is empty")
    if not np.all(np.isfinite(x)):
        raise PreconditionError("sample contains non-finite values")
    return x


def _clamp_nonneg(value: float, what: str) -> float:
    if value < 0.0:
        log.debug("clamping %s = %r to 0", what, value)
        return 0.0
    return value


def _check_cap(n: int, k: int, cap: int):
    count = math.comb(n, k)
    if count > cap:
        raise EnumerationCapError(
            f"C({n}, {k}) = {count} combinations exceeds the enumeration cap {cap}"
        )


def enumerate_ustat(sample, kernel, order: int, cap: int = DEFAULT_CAP) -> float:
    """Average ``kernel`` over all index-ascending ``order``-subsets of ``sample``.

    Subsets are visited in lexicographic order and summed with math.fsum, so the
    result is correctly rounded and independent of visiting order anyway.
    """
    x = as_sample(sample)
    n = x.shape[0]
    if n < order:
        raise PreconditionError(f"need n >= {order}, got n = {n}")
    _check_cap(n, order, cap)
    total = math.fsum(kernel(*(x[i] for i in c)) for c in combinations(range(n), order))
    return total / math.comb(n, order)


def compute_sample_variance(sample) -> float:
    """Unbiased S_n^2 by the two-pass formula."""
    x = as_sample(sample)
    n = x.shape[0]
    if x.ndim != 1:
        raise PreconditionError("sample variance needs a scalar sample")
    if n < 2:
        raise PreconditionError(f"sample variance needs n >= 2, got n = {n}")
    mean = math.fsum(x) / n
    s2 = math.fsum((x - mean) ** 2) / (n - 1)
    return _clamp_nonneg(s2, "S_n^2")


def compute_ustat(sample, k: KernelSpec, cap: int = DEFAULT_CAP, method: str = "auto") -> float:
    """U_n for kernel ``k``.

    ``method="auto"`` uses the closed forms of the built-in kernels (mean and
    S_n^2); ``method="enumerate"`` always sums over all C(n, m) subsets.
    """
    x = as_sample(sample)
    n = x.shape[0]
    if n < k.order:
        raise PreconditionError(f"kernel of order {k.order} needs n >= {k.order}, got n = {n}")
    if method == "auto" and x.ndim == 1 and k.kind in ("identity", "variance"):
        if k.kind == "identity":
            eval_batch(k, x[[x.argmin(), x.argmax()], None])
            return math.fsum(x) / n
        eval_batch(k, np.array([[x.min(), x.max()]]))
        return compute_sample_variance(x)
    if method not in ("auto", "enumerate"):
        raise ValueError(f"unknown method {method!r}")
    return enumerate_ustat(x, lambda *p: eval_kernel(k, p), k.order, cap)


def _pair_matrix(x: np.ndarray, k: KernelSpec) -> np.ndarray:
    n = x.shape[0]
    i, j = np.triu_indices(n, 1)
    if x.ndim == 1:
        vals = eval_batch(k, np.column_stack([x[i], x[j]]))
    else:
        vals = np.array([eval_kernel(k, (x[a], x[b])) for a, b in zip(i, j)])
    H = np.zeros((n, n))
    H[i, j] = vals
    H[j, i] = vals
    return H


def _w_tilde_order2(x: np.ndarray, k: KernelSpec) -> float:
    """W~_n for an order-2 base kernel in O(n^2).

    eta~ on a 4-subset is the mean of (h_P - h_Q)^2 / 2 over its 3 splits into
    two disjoint pairs, and every disjoint pair of pairs lies in exactly one
    4-subset. So W~_n is the mean of (h_P - h_Q)^2 / 2 over all unordered
    disjoint pairs {P, Q}: the sum over all pairs of pairs minus those sharing
    one index.
    """
    n = x.shape[0]
    H = _pair_matrix(x, k)
    h = H[np.triu_indices(n, 1)]
    npairs = h.size
    s1 = math.fsum(h)
    s2 = math.fsum(h * h)
    all_ordered = 2.0 * (npairs * s2 - s1 * s1)
    row = H.sum(axis=1)
    row_sq = (H * H).sum(axis=1)
    overlapping = math.fsum(2.0 * (n - 1) * row_sq - 2.0 * row * row)
    disjoint = all_ordered - overlapping
    return disjoint / (12.0 * math.comb(n, 4))


def compute_w(sample, vk: VarianceKernel, cap: int = DEFAULT_CAP, method: str = "auto") -> float:
    """W_n (plain eta) or W~_n (symmetrized) over all C(n, 2m) subsets.

    With ``method="auto"`` the symmetrized statistic for m <= 2 uses exact
    closed forms instead of enumeration; for m = 1 eta is already symmetric so
    W_n = W~_n = sample variance of h(X_i).
    """
    x = as_sample(sample)
    n = x.shape[0]
    m = vk.base.order
    if n < 2 * m:
        raise PreconditionError(f"W_n for a kernel of order {m} needs n >= {2 * m}, got n = {n}")
    if method not in ("auto", "enumerate"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and m == 1:
        g = eval_batch(vk.base, x.reshape(n, -1)) if x.ndim == 1 else np.array(
            [eval_kernel(vk.base, (xi,)) for xi in x])
        return compute_sample_variance(g)
    if method == "auto" and m == 2 and vk.symmetrized:
        return _clamp_nonneg(_w_tilde_order2(x, vk.base), "W~_n")
    w = enumerate_ustat(x, vk, 2 * m, cap)
    return _clamp_nonneg(w, "W_n")


@dataclass(frozen=True)
class UStatSummary:
    u_n: float
    n: int
    m: int
    w_n: float | None = None
    s2: float | None = None
    symmetrized: bool = True


def summarize(sample, k: KernelSpec, symmetrized: bool = True, cap: int = DEFAULT_CAP) -> UStatSummary:
    """U_n, W_n (or W~_n) when n >= 2m, and S_n^2 for scalar samples with n >= 2."""
    x = as_sample(sample)
    n = x.shape[0]
    u = compute_ustat(x, k, cap)
    w = compute_w(x, VarianceKernel(k, symmetrized), cap) if n >= 2 * k.order else None
    s2 = compute_sample_variance(x) if x.ndim == 1 and n >= 2 else None
    return UStatSummary(u_n=u, n=n, m=k.order, w_n=w, s2=s2, symmetrized=symmetrized)
