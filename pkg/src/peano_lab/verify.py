"""Verification harness: net coverage, fiber unboundedness and seeded suites.

Reports are plain dicts meant for ``json.dumps(..., sort_keys=True)``; with
the same arguments and seed the serialized output is byte-identical.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np

from . import algebra_family as alg
from . import entire_orders as eo
from . import linear_family as lf
from . import sequence_maps as sm
from .errors import BudgetExhausted, ResolutionTooCoarse
from .line_tiling import DEFAULT_TILE_BUDGET, TargetSpace, TiledLineMap, TiledMap, fiber_witnesses

SUITES = ("order-laws", "lemma", "family-rank", "adset", "seq-bounds")
DEFAULT_SEED = 20240101


def frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def box_net(bounds: Sequence, eps) -> list:
    """Grid of step ``eps`` over a box, anchored at the lower corner."""
    eps = Fraction(eps)
    axes = []
    for lo, hi in bounds:
        lo, hi = Fraction(lo), Fraction(hi)
        m = math.floor((hi - lo) / eps)
        axes.append([lo + i * eps for i in range(m + 1)])
    return [tuple(p) for p in product(*axes)]


@dataclass
class CoverageReport:
    bounds: list
    eps: Fraction
    depth: int
    hits: list = field(default_factory=list)
    misses: list = field(default_factory=list)
    wall_time: Optional[float] = None

    @property
    def passed(self) -> bool:
        return not self.misses

    def to_json(self) -> dict:
        out = {
            "net": {"box": [[frac_str(lo), frac_str(hi)] for lo, hi in self.bounds], "eps": frac_str(self.eps)},
            "depth": self.depth,
            "net_size": len(self.hits) + len(self.misses),
            "hit_count": len(self.hits),
            "max_residual": max((h["residual"] for h in self.hits), default=0.0),
            "hits": self.hits,
            "misses": self.misses,
            "pass": self.passed,
        }
        if self.wall_time is not None:
            out["wall_time"] = self.wall_time
        return out


def coverage_scan(spec: TiledMap, bounds: Sequence, eps, max_tiles: int = DEFAULT_TILE_BUDGET,
                  beyond=0, timing: bool = False) -> CoverageReport:
    """One witness per net point with residual at most ``eps``."""
    t0 = time.perf_counter()
    eps = Fraction(eps)
    report = CoverageReport([(Fraction(lo), Fraction(hi)) for lo, hi in bounds], eps, spec.depth)
    for a in box_net(bounds, eps):
        point = [frac_str(x) for x in a]
        try:
            t = fiber_witnesses(spec, a, 1, beyond, eps, max_tiles)[0]
        except BudgetExhausted as exc:
            report.misses.append({"a": point, "reason": str(exc)})
            continue
        residual = spec.residual(t, a)
        if residual <= eps:
            report.hits.append({"a": point, "t": frac_str(t), "residual": residual})
        else:
            report.misses.append({"a": point, "t": frac_str(t), "reason": f"residual {residual:.3g}"})
    if timing:
        report.wall_time = time.perf_counter() - t0
    return report


def reverify(spec: TiledMap, report: dict) -> bool:
    """Recompute every hit's residual from the report and compare."""
    eps = Fraction(report["net"]["eps"])
    for h in report["hits"]:
        a = tuple(Fraction(x) for x in h["a"])
        r = spec.residual(Fraction(h["t"]), a)
        if r != h["residual"] or r > eps:
            return False
    return True


@dataclass
class SuiteResult:
    name: str
    seed: Optional[int] = None
    params: dict = field(default_factory=dict)
    cases: list = field(default_factory=list)

    def numeric(self, cid: str, expected: float, observed: float, tol: float, **extra):
        ok = bool(abs(expected - observed) <= tol)
        self.cases.append({"id": cid, "expected": expected, "observed": observed, "tolerance": tol,
                           "pass": ok, **extra})
        return ok

    def exact(self, cid: str, expected, observed, **extra):
        ok = bool(expected == observed)
        self.cases.append({"id": cid, "expected": expected, "observed": observed, "tolerance": None,
                           "pass": ok, **extra})
        return ok

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.cases)

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "seed": self.seed,
            "params": self.params,
            "cases": self.cases,
            "failed": [c["id"] for c in self.cases if not c["pass"]],
            "pass": self.passed,
        }


def unboundedness_scan(spec: TiledMap, points: Sequence, bounds: Sequence, tol=Fraction(1, 100),
                       max_tiles: int = DEFAULT_TILE_BUDGET) -> SuiteResult:
    """For each point and bound ``B``, a witness ``t > B`` within ``tol``."""
    tol = Fraction(tol)
    res = SuiteResult("unboundedness", params={"bounds": [frac_str(Fraction(b)) for b in bounds],
                                               "tol": frac_str(tol), "depth": spec.depth})
    for i, a in enumerate(points):
        for B in bounds:
            cid = f"point{i}-beyond-{B}"
            try:
                t = fiber_witnesses(spec, a, 1, B, tol, max_tiles)[0]
            except (BudgetExhausted, ResolutionTooCoarse) as exc:
                res.cases.append({"id": cid, "expected": f"t > {B}", "observed": type(exc).__name__,
                                  "tolerance": None, "pass": False, "reason": str(exc)})
                continue
            r = spec.residual(t, a)
            ok = t > B and r <= tol
            res.cases.append({"id": cid, "expected": f"t > {B}", "observed": frac_str(t),
                              "residual": r, "tolerance": float(tol), "pass": bool(ok)})
    return res


# ---- seeded suites -------------------------------------------------------

def random_orders(rng: np.random.Generator, m: int, lo: float = 0.0, hi: float = 3.0, gap: float = 0.4):
    """``m`` non-integer orders in ``(lo, hi)`` with pairwise gaps ``>= gap``, shuffled."""
    while True:
        a = np.sort(rng.uniform(lo, hi, m))
        if a[0] > 0 and np.all(np.diff(a) >= gap) and not np.any(a == np.round(a)):
            return [float(x) for x in a[rng.permutation(m)]]


def random_poly(rng: np.random.Generator, m: int, max_terms: int = 4, max_exp: int = 2) -> eo.PolySpec:
    while True:
        mons = {}
        for _ in range(int(rng.integers(1, max_terms + 1))):
            e = tuple(int(x) for x in rng.integers(0, max_exp + 1, m))
            mons[e] = complex(rng.normal(), rng.normal())
        P = eo.PolySpec(mons, m)
        if not P.is_constant():
            return P


def _suite_order_laws(res: SuiteResult, trunc: int, **_):
    for alpha in (0.5, 1.5, 2.5):
        for N in (2, 10, 100, trunc):
            est = eo.order_from_coeffs(eo.prescribed_order_series(alpha, N)).value
            res.numeric(f"f_{alpha}-N{N}", alpha, est, 1e-12 * alpha)
    prev = None
    for N in (250, 500, 1000):
        est = eo.order_from_coeffs(eo.TruncatedSeries(_inv_factorial_logs(N), np.ones(N + 1))).value
        if N == 1000:
            res.exact(f"inv-factorial-N{N}-in-range", True, bool(1.0 <= est <= 1.25), observed_value=est)
        if prev is not None:
            res.exact(f"inv-factorial-N{N}-decreasing", True, bool(est < prev), observed_value=est)
        prev = est
    N = 400
    for alpha in (0.5, 1.5, 2.5):
        f = eo.prescribed_order_series(alpha, N)
        base = eo.order_from_coeffs(f, method="fit").value
        g = eo.series_scale(eo.series_pow(f, 4), 3)
        res.numeric(f"scaled-power-{alpha}", base, eo.order_from_coeffs(g, method="fit").value, 0.1)
    s = eo.series_add(eo.prescribed_order_series(0.5, N), eo.prescribed_order_series(1.5, N))
    res.numeric("sum-0.5-1.5", 1.5, eo.order_from_coeffs(s, method="fit").value, 0.1)
    exp_series = eo.TruncatedSeries(_inv_factorial_logs(200), np.ones(201))
    growth = eo.order_from_growth(exp_series, np.linspace(5, 40, 8)).value
    res.numeric("exp-growth", 1.0, growth, 0.05)


def _inv_factorial_logs(N: int) -> np.ndarray:
    return -np.array([math.lgamma(n + 1) for n in range(N + 1)])


def _suite_lemma(res: SuiteResult, rng: np.random.Generator, trunc: int, cases: int = 20, **_):
    for i in range(cases):
        m = int(rng.integers(2, 4))
        orders = random_orders(rng, m)
        P = random_poly(rng, m)
        expected = max(orders[k - 1] for k in eo.index_set(P))
        h = eo.compose_poly(P, [eo.prescribed_order_series(s, trunc) for s in orders])
        est = eo.order_from_coeffs(h, method="fit").value
        res.numeric(f"case{i}", expected, est, 0.2, poly=str(P), orders=orders)


def _suite_family_rank(res: SuiteResult, depth: int, **_):
    fam = lf.build_family(lf.DEFAULT_SEEDS, 16, depth=depth)
    rep = lf.independence_test(fam)
    res.exact("ten-seeds-rank", len(fam), rep["rank"], ratio=rep["ratio"])
    res.exact("ten-seeds-ratio", True, rep["ratio"] > lf.RANK_THRESHOLD, ratio=rep["ratio"])
    a = lf.FamilyMember({1, 3, 5}, depth=depth, label="odd")
    b = lf.FamilyMember({2, 4, 6}, depth=depth, label="even")
    res.exact("disjoint-pair-rank", 2, lf.independence_test([a, b])["rank"])
    dup = lf.independence_test([fam[0], fam[0]])
    # negative control: the duplicate must be reported as a failure
    res.exact("duplicate-member-detected", False, dup["pass"], negative_control=True, rank=dup["rank"])
    coeffs = [Fraction(k + 1, 3) * (-1) ** k for k in range(len(fam))]
    bad = 0
    checked = 0
    for i, m in enumerate(fam):
        n0 = lf.exclusive_channel(fam, i)
        order = fam[:i] + fam[i + 1:] + [m]
        ts = [lf.PAIRING.encode(k, n0) + Fraction(q, 64) for k in (1, 2, 3) for q in range(0, 64, 7)]
        for diff in lf.block_identity_residual(coeffs, order, n0, ts):
            checked += 1
            bad += any(x != 0 for x in diff)
    res.exact("block-identity-exact", 0, bad, samples=checked)


def _suite_adset(res: SuiteResult, **_):
    s2 = lf.ad_set("sqrt2", 5)
    res.exact("sqrt2-prefix", [2, 14, 28, 48, 86], s2.indices[:5])
    long = lf.ad_set("sqrt2", 40)
    res.exact("strictly-increasing", True, all(x < y for x, y in zip(long.indices, long.indices[1:])))
    res.exact("schedule", True, all(abs(lf.ENUMERATION[n] - long.seed.approx) < Fraction(1, k)
                                    for k, n in enumerate(long.indices, 1)))
    sets = [lf.ad_set(name, 1) for name in lf.DEFAULT_SEEDS]
    worst = 0
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            cert = lf.intersection_certificate(sets[i], sets[j])
            worst = max(worst, cert["stable_after"])
            stable = cert["common"] == sorted(set(sets[i].extend_past(10_000)) & set(sets[j].extend_past(10_000)))
            res.exact(f"{sets[i].seed.name}-{sets[j].seed.name}-stable", True, stable,
                      common=cert["common"], stable_after=cert["stable_after"])
    res.exact("stabilizes-within-1e4", True, worst <= 10_000, stable_after=worst)


def _bisect_inverse(r: float, y: float) -> float:
    lo, hi = -1.0, 1.0
    while sm.phi_r(r, lo) > y:
        lo *= 2
    while sm.phi_r(r, hi) < y:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if sm.phi_r(r, mid) < y:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _suite_seq_bounds(res: SuiteResult, rng: np.random.Generator, **_):
    kept = 0
    for _ in range(1000):
        n = int(rng.integers(0, 12))
        v = rng.uniform(-3, 3, n) * (rng.random(n) < 0.6)
        x = sm.FiniteSeq(tuple(float(a) for a in v))
        y = sm.big_phi(sm.RateVector(tuple(rng.uniform(0.1, 3, n))), x)
        kept += all((a == 0) == (b == 0) for a, b in zip(x.padded(n), y.padded(n))) and x.support == y.support
    res.exact("support-preserved", 1000, kept)
    violations = 0
    for _ in range(10_000):
        r = sm.RateVector(tuple(rng.uniform(0.05, 3, 4)))
        t, s = rng.uniform(-5, 5, 2)
        bound = sm.equicontinuity_bound(r, t, s)
        actual = max(abs(sm.phi_r(r[i], t) - sm.phi_r(r[i], s)) for i in range(4))
        violations += actual > bound
    res.exact("equicontinuity-violations", 0, int(violations))
    worst = 0.0
    for _ in range(1000):
        r, t = rng.uniform(0.1, 3), rng.uniform(-5, 5)
        y = sm.phi_r(r, t)
        worst = max(worst, abs(sm.phi_r_inverse(r, y) - t), abs(_bisect_inverse(r, y) - t))
    res.numeric("inverse-roundtrip", 0.0, worst, 1e-10)
    mono = 0
    for _ in range(10_000):
        r = rng.uniform(1e-3, 3)
        t, s = np.sort(rng.uniform(-5, 5, 2))
        mono += t == s or sm.phi_r(r, t) < sm.phi_r(r, s)
    res.exact("monotone", 10_000, int(mono))
    top = 0.0
    for _ in range(1000):
        x = sm.FiniteSeq(tuple(rng.uniform(-1, 1, 6)))
        y = sm.FiniteSeq(tuple(rng.uniform(-50, 50, 6)))
        top = max(top, sm.product_metric(x, y)[0])
    res.exact("product-metric-below-1", True, top <= 1.0, observed_value=top)
    lam = tuple(range(8))
    gam = (0, 2, 5, 7)
    m = sm.IndexMap(lam, gam, {g: float(rng.uniform(0.2, 1.0)) for g in gam})
    net = box_net([(-2, 2)] * 4, Fraction(1, 2))
    worst = 0.0
    for p in net:
        target = {g: float(v) for g, v in zip(gam, p)}
        f = sm.index_preimage(m, target)
        out = sm.index_surjection(m, f)
        worst = max(worst, max(abs(out[g] - target[g]) for g in gam))
    res.numeric("index-map-net", 0.0, worst, 1e-8, net_size=len(net))


_SUITES = {
    "order-laws": _suite_order_laws,
    "lemma": _suite_lemma,
    "family-rank": _suite_family_rank,
    "adset": _suite_adset,
    "seq-bounds": _suite_seq_bounds,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, trunc: int = 400, depth: int = 16) -> SuiteResult:
    if name not in _SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    res = SuiteResult(name, seed, {"trunc": trunc, "depth": depth})
    _SUITES[name](res, rng=np.random.default_rng(seed), trunc=trunc, depth=depth)
    return res


def phi_coverage(rates: sm.RateVector, eps, beyond=100, depth: int = 16,
                 bounds=((-1, 1), (-1, 1)), max_tiles: int = DEFAULT_TILE_BUDGET) -> CoverageReport:
    """``Phi_r o F`` over c00 against a net of ``bounds x {0}``."""
    comp = sm.PhiComposite(rates, TiledLineMap(TargetSpace.c00(), depth))
    eps = Fraction(eps)
    report = CoverageReport([(Fraction(lo), Fraction(hi)) for lo, hi in bounds], eps, depth)
    for a in box_net(bounds, eps):
        point = [frac_str(x) for x in a]
        try:
            t = comp.witnesses([float(x) for x in a], 1, beyond, eps, max_tiles)[0]
        except (BudgetExhausted, ResolutionTooCoarse) as exc:
            report.misses.append({"a": point, "reason": str(exc)})
            continue
        r = comp.residual(t, [float(x) for x in a])
        entry = {"a": point, "t": frac_str(t), "residual": r}
        (report.hits if r <= eps and t > beyond else report.misses).append(entry)
    return report


def algebra_scan(orders: Sequence[float], poly: str, radius: float, eps: float,
                 trunc: int = alg.DEFAULT_TRUNC, depth: int = 16, timing: bool = False) -> dict:
    e = alg.AlgebraElement.build(orders, poly, trunc, depth)
    return alg.surjectivity_scan(e, radius, eps, timing=timing)


def vanishing_check(e: alg.AlgebraElement, ts: Sequence) -> bool:
    """Exact zero at every given ``t <= 0`` or tile endpoint."""
    return all(alg.element_eval(e, t) == 0 for t in ts)


__all__ = [
    "CoverageReport", "SuiteResult", "SUITES", "box_net", "coverage_scan", "reverify",
    "unboundedness_scan", "run_suite", "phi_coverage", "algebra_scan", "vanishing_check",
    "random_orders", "random_poly",
]
