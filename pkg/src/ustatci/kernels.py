"""Symmetric kernels, the order-2m variance kernel and its symmetrization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Sequence

import numpy as np

from .errors import ArityError, KernelRangeError, PreconditionError

# Absolute slack on range checks, relative to the range width. Only absorbs
# last-bit rounding in user closures; anything larger is a misdeclared kernel.
RANGE_SLACK = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """A kernel h of order m with declared range [lo, hi].

    ``func`` takes m positional points. ``batch``, when given, maps an array of
    shape (N, m) to the N kernel values and is used by the vectorized paths.
    ``kind`` tags the built-in kernels so closed forms can be used for them.
    """

    order: int
    lo: float
    hi: float
    func: Callable[..., float] = field(repr=False)
    symmetric: bool = True
    name: str = "custom"
    kind: str = "custom"
    batch: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise PreconditionError(f"kernel order must be a positive integer, got {self.order}")
        if not self.lo < self.hi:
            raise PreconditionError(f"kernel range needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def c(self) -> float:
        """Linear-term constant 2 * max(|a|, |b|) used by the Bernstein bounds."""
        return 2.0 * max(abs(self.lo), abs(self.hi))

    def within_unit_interval(self) -> bool:
        return self.lo >= 0.0 and self.hi <= 1.0

    def check_value(self, value: float) -> float:
        slack = RANGE_SLACK * self.width
        if not (self.lo - slack <= value <= self.hi + slack):
            raise KernelRangeError(
                f"kernel {self.name!r} returned {value!r}, outside [{self.lo}, {self.hi}]"
            )
        return value

    def __call__(self, *points: Any) -> float:
        return eval_kernel(self, points)


def eval_kernel(k: KernelSpec, points: Sequence[Any]) -> float:
    if len(points) != k.order:
        raise ArityError(f"kernel {k.name!r} has order {k.order}, got {len(points)} points")
    return k.check_value(float(k.func(*points)))


def eval_batch(k: KernelSpec, tuples: np.ndarray) -> np.ndarray:
    """Evaluate ``k`` on every row of an (N, m) array, with range checking."""
    tuples = np.asarray(tuples, dtype=float)
    if tuples.ndim != 2 or tuples.shape[1] != k.order:
        raise ArityError(f"expected an (N, {k.order}) array, got shape {tuples.shape}")
    if k.batch is not None:
        values = np.asarray(k.batch(tuples), dtype=float)
    else:
        values = np.array([float(k.func(*row)) for row in tuples])
    slack = RANGE_SLACK * k.width
    if values.size and (values.min() < k.lo - slack or values.max() > k.hi + slack):
        bad = values[(values < k.lo - slack) | (values > k.hi + slack)][0]
        raise KernelRangeError(f"kernel {k.name!r} returned {bad!r}, outside [{k.lo}, {k.hi}]")
    return values


def identity_kernel(lo: float = 0.0, hi: float = 1.0) -> KernelSpec:
    """h(x) = x; its U-statistic is the sample mean."""
    return KernelSpec(
        order=1, lo=lo, hi=hi, func=lambda x: x, name="mean", kind="identity",
        batch=lambda X: X[:, 0],
    )


def variance_kernel(lo: float = 0.0, hi: float = 1.0) -> KernelSpec:
    """h(x1, x2) = (x1 - x2)^2 / 2 for data in [lo, hi]; its U-statistic is S_n^2."""
    return KernelSpec(
        order=2, lo=0.0, hi=(hi - lo) ** 2 / 2, func=lambda x, y: (x - y) ** 2 / 2,
        name="variance", kind="variance",
        batch=lambda X: (X[:, 0] - X[:, 1]) ** 2 / 2,
    )


def closure_kernel(func: Callable[..., float], order: int, lo: float, hi: float,
                   name: str = "custom", batch=None) -> KernelSpec:
    """Wrap a user-supplied symmetric function as a kernel."""
    return KernelSpec(order=order, lo=lo, hi=hi, func=func, name=name, batch=batch)


def rescale_kernel(k: KernelSpec) -> KernelSpec:
    """Affine map h' = (h - a) / (b - a) onto [0, 1].

    Intervals computed for h' map back with ``ustatci.intervals.unscale``.
    """
    a, w = k.lo, k.width
    batch = None
    if k.batch is not None:
        batch = lambda X, _b=k.batch: (_b(X) - a) / w  # noqa: E731
    return KernelSpec(
        order=k.order, lo=0.0, hi=1.0, func=lambda *p: (k.func(*p) - a) / w,
        symmetric=k.symmetric, name=f"{k.name}_rescaled", batch=batch,
    )


@dataclass(frozen=True)
class VarianceKernel:
    """eta(x_1..x_2m) = [h(x_1..x_m) - h(x_{m+1}..x_2m)]^2 / 2 and its symmetrization."""

    base: KernelSpec
    symmetrized: bool = True

    @property
    def order(self) -> int:
        return 2 * self.base.order

    @property
    def hi(self) -> float:
        return self.base.width ** 2 / 2

    def __call__(self, *points: Any) -> float:
        if self.symmetrized:
            return eval_eta_symmetrized(self, points)
        return eval_eta(self, points)


def _check_arity(vk: VarianceKernel, points: Sequence[Any]):
    if len(points) != vk.order:
        raise ArityError(f"variance kernel has order {vk.order}, got {len(points)} points")


def eval_eta(vk: VarianceKernel, points: Sequence[Any]) -> float:
    _check_arity(vk, points)
    m = vk.base.order
    d = eval_kernel(vk.base, points[:m]) - eval_kernel(vk.base, points[m:])
    return d * d / 2


def eval_eta_symmetrized(vk: VarianceKernel, points: Sequence[Any]) -> float:
    """Average of eta over all (2m)! orderings of ``points``.

    h is symmetric within each slot and eta is symmetric in its two slots, so
    the average only depends on which m points feed the first slot; averaging
    over the C(2m, m) choices gives the same number.
    """
    _check_arity(vk, points)
    m = vk.base.order
    idx = range(2 * m)
    # h on every m-subset, computed once
    h = {s: eval_kernel(vk.base, [points[i] for i in s]) for s in combinations(idx, m)}
    terms = []
    for first in h:
        second = tuple(i for i in idx if i not in first)
        d = h[first] - h[second]
        terms.append(d * d / 2)
    return math.fsum(terms) / len(terms)
