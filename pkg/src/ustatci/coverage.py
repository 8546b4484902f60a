"""Monte Carlo coverage of the intervals under known data-generating processes."""

from __future__ import annotations

import csv
import itertools
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .kernels import KernelSpec, VarianceKernel, eval_kernel, variance_kernel
from .methods import Stats, default_side, family, interval
from .ustat import compute_w

MIN_REPLICATES = 100

CSV_COLUMNS = ("method", "m", "side", "dgp", "n", "delta", "replicates", "covered",
               "coverage", "mean_half_width", "seed")


@dataclass(frozen=True)
class DgpSpec:
    """A distribution on [0, 1] with known mean and variance."""

    family: str
    params: tuple = ()

    @classmethod
    def bernoulli(cls, p: float) -> "DgpSpec":
        if not 0.0 <= p <= 1.0:
            raise PreconditionError("bernoulli p must lie in [0, 1]")
        return cls("bernoulli", (float(p),))

    @classmethod
    def uniform01(cls) -> "DgpSpec":
        return cls("uniform01")

    @classmethod
    def beta(cls, a: float, b: float) -> "DgpSpec":
        if not (a > 0 and b > 0):
            raise PreconditionError("beta parameters must be > 0")
        return cls("beta", (float(a), float(b)))

    @classmethod
    def discrete(cls, support, probs) -> "DgpSpec":
        support = tuple(float(s) for s in support)
        probs = tuple(float(p) for p in probs)
        if len(support) != len(probs) or not support:
            raise PreconditionError("support and probs must have the same nonzero length")
        if min(support) < 0.0 or max(support) > 1.0:
            raise PreconditionError("discrete support must lie in [0, 1]")
        if min(probs) < 0.0 or abs(math.fsum(probs) - 1.0) > 1e-12:
            raise PreconditionError("probs must be nonnegative and sum to 1")
        return cls("discrete", (support, probs))

    @classmethod
    def parse(cls, text: str) -> "DgpSpec":
        """Parse 'bernoulli(0.5)', 'uniform01', 'beta(2,5)' or 'discrete(0:0.3;1:0.7)'."""
        t = text.replace(" ", "")
        if t in ("uniform01", "uniform"):
            return cls.uniform01()
        m = re.fullmatch(r"(\w+)\((.*)\)", t)
        if not m:
            raise PreconditionError(f"cannot parse DGP {text!r}")
        name, body = m.groups()
        try:
            if name == "bernoulli":
                return cls.bernoulli(float(body))
            if name == "beta":
                a, b = body.split(",")
                return cls.beta(float(a), float(b))
            if name == "discrete":
                pairs = [item.split(":") for item in body.split(";")]
                return cls.discrete([s for s, _ in pairs], [p for _, p in pairs])
        except ValueError as exc:
            raise PreconditionError(f"cannot parse DGP {text!r}: {exc}") from None
        raise PreconditionError(f"unknown DGP family {name!r}")

    @property
    def label(self) -> str:
        if self.family == "uniform01":
            return "uniform01"
        if self.family == "discrete":
            s, p = self.params
            return "discrete(" + ";".join(f"{a!r}:{b!r}" for a, b in zip(s, p)) + ")"
        return f"{self.family}(" + ",".join(f"{v:g}" for v in self.params) + ")"

    @property
    def true_mean(self) -> float:
        if self.family == "bernoulli":
            return self.params[0]
        if self.family == "uniform01":
            return 0.5
        if self.family == "beta":
            a, b = self.params
            return a / (a + b)
        s, p = self.params
        return math.fsum(x * q for x, q in zip(s, p))

    @property
    def true_variance(self) -> float:
        if self.family == "bernoulli":
            p = self.params[0]
            return p * (1 - p)
        if self.family == "uniform01":
            return 1.0 / 12.0
        if self.family == "beta":
            a, b = self.params
            return a * b / ((a + b) ** 2 * (a + b + 1))
        s, p = self.params
        mu = self.true_mean
        return math.fsum(q * (x - mu) ** 2 for x, q in zip(s, p))

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.family == "bernoulli":
            return (rng.random(n) < self.params[0]).astype(float)
        if self.family == "uniform01":
            return rng.random(n)
        if self.family == "beta":
            return rng.beta(self.params[0], self.params[1], n)
        s, p = self.params
        return rng.choice(np.array(s), size=n, p=np.array(p))


def true_theta(dgp: DgpSpec, kernel: KernelSpec) -> float:
    """E h(X_1, ..., X_m) under ``dgp``.

    Closed form for the mean and variance kernels; exact enumeration over
    support^m for discrete DGPs with any kernel.
    """
    if kernel.kind == "identity":
        return dgp.true_mean
    if kernel.kind == "variance":
        return dgp.true_variance
    if dgp.family == "bernoulli":
        p = dgp.params[0]
        dgp = DgpSpec.discrete((0.0, 1.0), (1.0 - p, p))
    if dgp.family != "discrete":
        raise PreconditionError(
            f"no exact oracle for kernel {kernel.name!r} under continuous DGP {dgp.label}")
    support, probs = dgp.params
    terms = []
    for idx in itertools.product(range(len(support)), repeat=kernel.order):
        weight = math.prod(probs[i] for i in idx)
        if weight:
            terms.append(weight * eval_kernel(kernel, [support[i] for i in idx]))
    return math.fsum(terms)


def replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    """Philox (counter-based) stream for one replicate, keyed by (seed, replicate)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(replicate,))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class MethodSpec:
    """A method tag with the side to check and, for U-statistic methods, the kernel order.

    Order 1 uses the mean kernel (target E X); order 2 the variance kernel
    (target Var X).
    """

    method: str
    side: str | None = None
    m: int = 1

    def __post_init__(self):
        if self.side is None:
            object.__setattr__(self, "side", default_side(self.method))
        if family(self.method) != "ustat" and self.m != 1:
            raise PreconditionError(f"{self.method} does not take a kernel order")
        if self.m not in (1, 2):
            raise PreconditionError("coverage runs support kernel orders 1 and 2")

    def target(self, dgp: DgpSpec) -> float:
        fam = family(self.method)
        if fam == "mean":
            return dgp.true_mean
        if fam == "variance":
            v = dgp.true_variance
            return v if self.method == "var_hoeffding" else math.sqrt(v)
        return dgp.true_variance if self.m == 2 else dgp.true_mean


@dataclass(frozen=True)
class CoverageReport:
    method: str
    side: str
    m: int
    dgp: str
    n: int
    delta: float
    replicates: int
    covered: int
    mean_half_width: float
    seed: int

    @property
    def empirical_coverage(self) -> float:
        return self.covered / self.replicates

    @property
    def mc_stderr(self) -> float:
        p = self.empirical_coverage
        return math.sqrt(p * (1 - p) / self.replicates)

    def row(self) -> list:
        return [self.method, self.m, self.side, self.dgp, self.n, repr(self.delta),
                self.replicates, self.covered, repr(self.empirical_coverage),
                repr(self.mean_half_width), self.seed]


def _stats_for(x: np.ndarray, orders) -> dict:
    n = x.shape[0]
    xbar = math.fsum(x) / n
    s2 = max(0.0, math.fsum((x - xbar) ** 2) / (n - 1))
    out = {1: Stats(n=n, m=1, u=xbar, w=s2, xbar=xbar, s2=s2)}
    if 2 in orders and n >= 4:
        w2 = compute_w(x, VarianceKernel(variance_kernel(), symmetrized=True))
        out[2] = Stats(n=n, m=2, u=s2, w=w2, xbar=xbar, s2=s2)
    return out


def _run_chunk(dgp, specs, n, deltas, seed, start, stop, floor_free):
    """Covered counts and per-replicate half-widths for replicates [start, stop)."""
    cells = [(s, d) for s in specs for d in deltas]
    targets = [s.target(dgp) for s, _ in cells]
    covered = [0] * len(cells)
    widths = [[] for _ in cells]
    orders = {s.m for s in specs}
    for rep in range(start, stop):
        x = dgp.draw(replicate_rng(seed, rep), n)
        stats = _stats_for(x, orders)
        for j, (spec, delta) in enumerate(cells):
            ci = interval(spec.method, stats[spec.m], delta, spec.side, floor_free)
            covered[j] += ci.covers(targets[j])
            widths[j].append(ci.half_width)
    return covered, widths


def run_coverage_grid(dgp: DgpSpec, specs, n: int, deltas, replicates: int, seed: int,
                      first_replicate: int = 0, jobs: int = 1,
                      floor_free: bool = False) -> list[CoverageReport]:
    """Coverage for every (spec, delta) pair, sharing the simulated samples.

    Replicate r always uses the stream keyed by (seed, r), and half-widths are
    averaged with math.fsum, so results do not depend on ``jobs``.
    """
    specs = [s if isinstance(s, MethodSpec) else MethodSpec(s) for s in specs]
    deltas = [float(d) for d in deltas]
    if replicates < MIN_REPLICATES:
        raise PreconditionError(f"need at least {MIN_REPLICATES} replicates, got {replicates}")
    if n < 2 or any(n < 2 * s.m for s in specs):
        raise PreconditionError(f"n = {n} is too small for the requested methods")
    stop = first_replicate + replicates
    if jobs <= 1:
        covered, widths = _run_chunk(dgp, specs, n, deltas, seed, first_replicate, stop, floor_free)
    else:
        bounds = np.linspace(first_replicate, stop, jobs + 1).astype(int)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_chunk, *zip(*[
                (dgp, specs, n, deltas, seed, int(a), int(b), floor_free)
                for a, b in zip(bounds[:-1], bounds[1:])])))
        covered = [sum(p[0][j] for p in parts) for j in range(len(parts[0][0]))]
        widths = [[w for p in parts for w in p[1][j]] for j in range(len(parts[0][1]))]
    cells = [(s, d) for s in specs for d in deltas]
    return [
        CoverageReport(method=s.method, side=s.side, m=s.m, dgp=dgp.label, n=n, delta=d,
                       replicates=replicates, covered=int(covered[j]),
                       mean_half_width=math.fsum(widths[j]) / replicates, seed=seed)
        for j, (s, d) in enumerate(cells)
    ]


def run_coverage(dgp: DgpSpec, method: str, n: int, delta: float, replicates: int, seed: int,
                 side: str | None = None, m: int = 1, first_replicate: int = 0) -> CoverageReport:
    return run_coverage_grid(dgp, [MethodSpec(method, side, m)], n, [delta], replicates, seed,
                             first_replicate)[0]


DEFAULT_DGPS = ("bernoulli(0.5)", "bernoulli(0.1)", "uniform01", "beta(2,5)")
DEFAULT_N = (10, 20, 50, 100, 200)
DEFAULT_DELTAS = (0.01, 0.05, 0.1)
DEFAULT_REPLICATES = 2000


def default_specs() -> list[MethodSpec]:
    specs = []
    for side in ("lower", "upper"):
        specs.append(MethodSpec("var_hoeffding", side))
    for tag in ("sd_bernstein_upper", "sd_bernstein_lower", "sd_maurer_upper", "sd_maurer_lower"):
        specs.append(MethodSpec(tag))
    for m in (1, 2):
        for side in ("lower", "upper", "two"):
            specs.append(MethodSpec("ustat_empirical_hoeffding", side, m))
        for side in ("lower", "upper"):
            specs.append(MethodSpec("ustat_empirical_bernstein", side, m))
        specs.append(MethodSpec("ustat_empirical_bernstein_2sided", "two", m))
    for tag in ("mean_improved_hoeffding_1", "mean_improved_hoeffding_2",
                "mean_audibert", "mean_maurer"):
        for side in ("lower", "upper"):
            specs.append(MethodSpec(tag, side))
    specs.append(MethodSpec("mean_improved_2sided_1"))
    specs.append(MethodSpec("mean_improved_2sided_2"))
    return specs


def write_reports(reports, handle):
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow(r.row())
