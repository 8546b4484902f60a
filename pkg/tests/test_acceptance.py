"""The nine acceptance criteria; each test is reported as one PASS/FAIL line."""

import itertools
import math
from decimal import Decimal, getcontext

import numpy as np
import pytest

from conftest import brute_force_eta_tilde
from ustatci import cli
from ustatci.coverage import DgpSpec, MethodSpec, run_coverage_grid
from ustatci.curves import FIGURE_GRID, CurveSpec, compute_curves, figure_panels
from ustatci.intervals import (
    SD_LOWER_CONST, SD_UPPER_CONST, TWO_SIDED_USTAT_CONST, ci_mean_improved, ci_sd_bernstein,
    ci_sd_maurer, ci_ustat_empirical, ci_variance_hoeffding, classical_two_sided_halfwidth,
    sd_radius, variance_radius,
)
from ustatci.kernels import VarianceKernel, closure_kernel, identity_kernel, variance_kernel
from ustatci.tails import bernstein_ustat_tail, hoeffding_ustat_tail, improved_hoeffding_mean_tail
from ustatci.ustat import compute_sample_variance, compute_ustat, compute_w

TOL = 1e-12


# -- 1 ----------------------------------------------------------------------------

def _radical(expr):
    getcontext().prec = 50
    return float(expr(lambda v: Decimal(v).sqrt()))


@pytest.mark.acceptance(1, "constant ceilings 1.116, 1.788, 4.908")
def test_constant_ceilings():
    cases = [
        (SD_LOWER_CONST, lambda r: r(2) / 2 + r(6) / 6, 1.116),
        (SD_UPPER_CONST, lambda r: r(2) / 2 + r(42) / 6, 1.788),
        (TWO_SIDED_USTAT_CONST, lambda r: (4 + r(2) * (3 + r(21))) / 3, 4.908),
    ]
    for const, expr, ceiling in cases:
        exact = _radical(expr)
        assert abs(const - exact) <= TOL
        assert const <= ceiling and exact <= ceiling


# -- 2 ----------------------------------------------------------------------------

def _brute_ustat(x, func, order):
    vals = [func(*(x[i] for i in idx)) for idx in itertools.combinations(range(len(x)), order)]
    return math.fsum(vals) / len(vals)


@pytest.mark.acceptance(2, "U-statistic and W-tilde oracle equivalence")
def test_oracle_equivalence():
    rng = np.random.default_rng(2019)
    vk1 = VarianceKernel(identity_kernel(), symmetrized=True)
    square = closure_kernel(lambda a: a * a, 1, 0.0, 1.0, name="square")
    vk1b = VarianceKernel(square, symmetrized=True)
    vk2 = VarianceKernel(variance_kernel(), symmetrized=True)
    product = closure_kernel(lambda a, b: a * b, 2, 0.0, 1.0, name="product")
    vk2b = VarianceKernel(product, symmetrized=True)
    for trial in range(200):
        n = int(rng.integers(2, 13))
        x = rng.random(n)
        s2 = compute_sample_variance(x)
        for method in ("auto", "enumerate"):
            assert abs(compute_ustat(x, variance_kernel(), method=method) - s2) <= TOL
        for vk in (vk1, vk1b):
            brute = _brute_ustat(x, lambda *p, vk=vk: brute_force_eta_tilde(vk, p), 2)
            assert abs(compute_w(x, vk, method="enumerate") - brute) <= TOL
        # order-2 brute force is (2m)! = 24 permutations per 4-subset; keep n modest
        if 4 <= n <= 9:
            vk = vk2 if trial % 2 else vk2b
            brute = _brute_ustat(x, lambda *p, vk=vk: brute_force_eta_tilde(vk, p), 4)
            assert abs(compute_w(x, vk, method="enumerate") - brute) <= TOL


# -- 3 ----------------------------------------------------------------------------

GRID_N = (4, 10, 50)
GRID_DELTA = (0.01, 0.1)
GRID_STAT = (0.0, 0.05, 0.25)
V_GRID = np.linspace(0.0, 0.25, 2001)


def _sd_tail_sup(n, m, r, upper):
    """Largest Bernstein tail for the W_n event behind an SD radius ``r``, over sigma^2.

    eta lies in [0, 1/2] with mean sigma^2, so Var eta <= sigma^2 / 2 and c = 1.
    ``upper``: sqrt(sigma^2) > sqrt(W_n) + r, i.e. sigma^2 - W_n > 2 sqrt(sigma^2) r - r^2,
    impossible unless sqrt(sigma^2) > r. Otherwise sqrt(W_n) > sqrt(sigma^2) + r.
    """
    worst = 0.0
    for v in V_GRID:
        sv = math.sqrt(v)
        if upper:
            if sv <= r:
                continue
            eps = 2 * sv * r - r * r
        else:
            eps = 2 * sv * r + r * r
        worst = max(worst, bernstein_ustat_tail(n, 2 * m, eps, v / 2, 1.0))
    return worst


@pytest.mark.acceptance(3, "reversal consistency of every (tail bound, interval) pair")
def test_reversal_consistency():
    for n, delta, s in itertools.product(GRID_N, GRID_DELTA, GRID_STAT):
        # sample variance, Hoeffding
        for side in ("lower", "upper", "two"):
            hw = ci_variance_hoeffding(s, n, delta, side).half_width
            assert hoeffding_ustat_tail(n, 2, hw, 0.5, two_sided=side == "two") <= delta + TOL
        # standard deviation, Bernstein
        for side in ("lower", "upper"):
            r = ci_sd_bernstein(s, n, delta, side).half_width
            assert _sd_tail_sup(n, 1, r, side == "upper") <= delta + TOL

        # empirical U-statistic intervals: main deviation at the worst variance the
        # nuisance event allows, plus the nuisance event itself
        for m in (1, 2):
            for kind, side in itertools.product(("hoeffding", "bernstein"), ("lower", "two")):
                parts = 3 if side == "two" else 2
                budget = delta / parts
                hw = ci_ustat_empirical(kind, 0.5, s, n, m, delta, side).half_width
                if kind == "hoeffding":
                    r = variance_radius(n, m, budget)
                    nuisance = hoeffding_ustat_tail(n, 2 * m, r, 0.5)
                    sigma_max = s + r
                else:
                    r = sd_radius(n, m, budget, upper=True)
                    nuisance = _sd_tail_sup(n, m, r, upper=True)
                    sigma_max = (math.sqrt(s) + r) ** 2
                main = bernstein_ustat_tail(n, m, hw, sigma_max, 2.0, two_sided=side == "two")
                assert nuisance <= budget + TOL
                assert main <= (parts - 1) * budget + TOL
                assert main + nuisance <= delta + TOL

        # improved Hoeffding for the mean
        for kind, side in itertools.product((1, 2), ("lower", "two")):
            parts = 3 if side == "two" else 2
            budget = delta / parts
            hw = ci_mean_improved(kind, 0.5, s, n, delta, side).half_width
            if kind == 1:
                r = variance_radius(n, 1, budget)
                nuisance = hoeffding_ustat_tail(n, 2, r, 0.5)
                v_max = s + r
            else:
                r = sd_radius(n, 1, budget, upper=True)
                nuisance = _sd_tail_sup(n, 1, r, upper=True)
                v_max = (math.sqrt(s) + r) ** 2
            main = (parts - 1) * improved_hoeffding_mean_tail(n, hw, 1.0, v_max)
            assert nuisance <= budget + TOL
            assert main + nuisance <= delta + TOL


# -- 4 ----------------------------------------------------------------------------

COVERAGE_SPECS = [
    MethodSpec("var_hoeffding", "lower"), MethodSpec("var_hoeffding", "upper"),
    MethodSpec("sd_bernstein_upper"), MethodSpec("sd_bernstein_lower"),
    *(MethodSpec("ustat_empirical_hoeffding", side, m)
      for m in (1, 2) for side in ("lower", "upper")),
    *(MethodSpec("ustat_empirical_bernstein", side, m)
      for m in (1, 2) for side in ("lower", "upper")),
    *(MethodSpec("ustat_empirical_bernstein_2sided", "two", m) for m in (1, 2)),
    *(MethodSpec(tag, side)
      for tag in ("mean_improved_hoeffding_1", "mean_improved_hoeffding_2",
                  "mean_audibert", "mean_maurer")
      for side in ("lower", "upper")),
]


@pytest.mark.slow
@pytest.mark.acceptance(4, "Monte Carlo coverage >= 0.90 - 3 stderr at delta = 0.1, R = 2000")
def test_coverage_grid():
    threshold = 0.9 - 3 * math.sqrt(0.1 * 0.9 / 2000)
    failures = []
    for dgp in ("bernoulli(0.5)", "bernoulli(0.1)", "uniform01", "beta(2,5)"):
        for n in (20, 50, 100):
            for rep in run_coverage_grid(DgpSpec.parse(dgp), COVERAGE_SPECS, n, [0.1], 2000,
                                         seed=20190210):
                if rep.empirical_coverage < threshold:
                    failures.append((rep.method, rep.side, rep.m, dgp, n, rep.empirical_coverage))
    assert not failures, failures


# -- 5 ----------------------------------------------------------------------------

def _tail_crossover(ns, better):
    """Smallest n after which ``better`` holds to the end of the grid (None if it never does)."""
    if not better[-1]:
        return None
    i = len(better)
    while i > 0 and better[i - 1]:
        i -= 1
    return ns[i]


@pytest.mark.acceptance(5, "figure orderings: uniform, large-n, middle-range and baseline crossovers")
def test_figure_orderings():
    panels = figure_panels()
    assert [(p.s2, p.delta) for p in panels] == list(FIGURE_GRID)
    for spec in panels:
        curves = {c.method: c for c in compute_curves(spec)}
        ns = [n for n, _ in curves["mean_improved_hoeffding_1"].points]
        assert ns == list(range(4, 1001, 2))
        val = {k: [v for _, v in c.points] for k, c in curves.items()}
        ih1, ih2 = val["mean_improved_hoeffding_1"], val["mean_improved_hoeffding_2"]
        aud, mau = val["mean_audibert"], val["mean_maurer"]
        # (a) uniformly tighter
        assert all(a < b for a, b in zip(ih1, ih2))
        # (d) mean_maurer beats mean_audibert for all large n
        assert _tail_crossover(ns, [m < a for m, a in zip(mau, aud)]) is not None
        if spec.s2 == 0.05:
            # (b) both baselines beat Improved Hoeffding 1 for all large n
            assert _tail_crossover(ns, [max(a, m) < i for a, m, i in zip(aud, mau, ih1)]) is not None
        else:
            # (c) Improved Hoeffding 1 beats both over one nonempty contiguous range
            wins = [i < min(a, m) for a, m, i in zip(aud, mau, ih1)]
            idx = [k for k, w in enumerate(wins) if w]
            assert idx and idx == list(range(idx[0], idx[-1] + 1))


# -- 6 ----------------------------------------------------------------------------

@pytest.mark.acceptance(6, "two-sided empirical Bernstein strictly tighter than the classical two-sided bound")
def test_two_sided_dominance():
    for m in (1, 2, 3):
        for n in range(2 * m, 2001, 2 * m):
            for w, delta in itertools.product((0.0, 0.05, 0.25), (0.01, 0.1)):
                ours = ci_ustat_empirical("bernstein", 0.5, w, n, m, delta, "two").half_width
                assert ours < classical_two_sided_halfwidth(w, n, m, delta)


# -- 7 ----------------------------------------------------------------------------

@pytest.mark.acceptance(7, "standard-deviation bounds vs the baseline bound: n = 2, 4 exceptions")
def test_sd_small_n_exceptions():
    for direction in ("lower", "upper"):
        assert (ci_sd_maurer(0.1, 200, 0.1, direction).half_width
                < ci_sd_bernstein(0.1, 200, 0.1, direction).half_width)
    lower_wins = [n for n in range(2, 201)
                  if ci_sd_bernstein(0.1, n, 0.1, "lower").half_width
                  < ci_sd_maurer(0.1, n, 0.1, "lower").half_width]
    assert lower_wins == [2, 4]
    upper_wins = [n for n in range(2, 201)
                  if ci_sd_bernstein(0.1, n, 0.1, "upper").half_width
                  < ci_sd_maurer(0.1, n, 0.1, "upper").half_width]
    assert upper_wins == []


# -- 8 ----------------------------------------------------------------------------

def _floor_pair(method, n, m, delta, s):
    if method == "var_hoeffding":
        f = lambda ff: ci_variance_hoeffding(s, n, delta, "lower", ff)  # noqa: E731
    elif method.startswith("sd_bernstein"):
        f = lambda ff: ci_sd_bernstein(s, n, delta, method[13:], ff)  # noqa: E731
    elif method.startswith("ustat"):
        kind, side = method.split(":")[1:]
        f = lambda ff: ci_ustat_empirical(kind, 0.5, s, n, m, delta, side, ff)  # noqa: E731
    else:
        kind = int(method[-1])
        f = lambda ff: ci_mean_improved(kind, 0.5, s, n, delta, "lower", ff)  # noqa: E731
    return f(False).half_width, f(True).half_width


@pytest.mark.acceptance(8, "floor-free half-widths never below floored ones (1000 random tuples)")
def test_floor_free_dominance():
    rng = np.random.default_rng(7)
    methods = ["var_hoeffding", "sd_bernstein_upper", "sd_bernstein_lower",
               "ustat:hoeffding:lower", "ustat:hoeffding:two", "ustat:bernstein:lower",
               "ustat:bernstein:two", "mean_improved_1", "mean_improved_2"]
    for _ in range(1000):
        method = methods[int(rng.integers(len(methods)))]
        m = int(rng.integers(1, 4)) if method.startswith("ustat") else 1
        n = int(rng.integers(2 * m, 501))
        delta = float(rng.uniform(0.001, 0.5))
        s = float(rng.uniform(0.0, 0.25))
        floored, free = _floor_pair(method, n, m, delta, s)
        assert free >= floored, (method, n, m, delta, s)


# -- 9 ----------------------------------------------------------------------------

def _run(argv):
    assert cli.main(argv) == 0


@pytest.mark.acceptance(9, "byte-identical coverage and curves output for a fixed seed")
def test_determinism(tmp_path):
    cov_args = ["coverage", "--dgp", "bernoulli(0.1)", "--dgp", "beta(2,5)", "--n", "10,20",
                "--delta", "0.05,0.1", "--replicates", "200", "--seed", "99", "--m", "1,2",
                "--methods", "ustat_empirical_bernstein,mean_maurer,sd_bernstein_lower"]
    outs = []
    for i, jobs in enumerate(("1", "1", "2")):
        path = tmp_path / f"cov{i}.csv"
        _run(cov_args + ["--jobs", jobs, "--out", str(path)])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    assert len(outs[0].splitlines()) == 1 + 2 * 2 * 2 * 4

    curve_outs = []
    for i in range(2):
        csv_path, svg_path = tmp_path / f"c{i}.csv", tmp_path / f"c{i}.svg"
        _run(["curves", "--out", str(csv_path), "--svg", str(svg_path)])
        curve_outs.append((csv_path.read_bytes(), svg_path.read_bytes()))
    assert curve_outs[0] == curve_outs[1]
