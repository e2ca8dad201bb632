"""``peano-lab`` command line.

Exit codes: 0 when everything checked passes, 1 when a check fails or a
search comes up empty, 2 on bad input or configuration.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from . import algebra_family as alg
from . import curve_core as cc
from . import entire_orders as eo
from . import linear_family as lf
from . import line_tiling as lt
from . import sequence_maps as sm
from . import verify as vf
from .errors import (
    BudgetExhausted,
    PeanoLabError,
    PrecisionExhausted,
    ResolutionTooCoarse,
    SaturationError,
    TruncationUnreliable,
)

OK, FAIL, CONFIG = 0, 1, 2
_FAILURES = (BudgetExhausted, ResolutionTooCoarse, TruncationUnreliable, PrecisionExhausted, SaturationError)


class ConfigError(Exception):
    pass


def _fs(q) -> str:
    return vf.frac_str(Fraction(q))


def _floats(text: str) -> list:
    return [float(x) for x in text.split(",") if x.strip()]


def _fracs(text: str) -> list:
    return [Fraction(x.strip()) for x in text.split(",") if x.strip()]


def _emit(args, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _target(spec: str) -> lt.TargetSpace:
    spec = spec.lower()
    if spec == "c00":
        return lt.TargetSpace.c00()
    if spec.startswith("r") and spec[1:].isdigit():
        return lt.TargetSpace.euclidean(int(spec[1:]))
    raise ConfigError(f"unknown target {spec!r}; use r2, r3, ... or c00")


# -- curve -------------------------------------------------------------------

def _curve_point(args, t):
    if args.kind == "peano":
        if args.dim != 2:
            raise ConfigError("the Peano curve is two-dimensional")
        return cc.peano_eval(t, args.depth)
    return cc.hilbert_eval(t, args.dim, args.depth)


def cmd_curve_eval(args) -> int:
    t = cc.as_fraction(args.t)
    if not 0 <= t <= 1:
        raise ConfigError("t must lie in [0, 1]")
    pt = _curve_point(args, t)
    cell = cc.cell_of(t, args.dim, args.depth, args.kind) if t < 1 else None
    _emit(args, {
        "kind": args.kind, "dim": args.dim, "depth": args.depth, "t": _fs(t),
        "point": [_fs(c) for c in pt.coords], "point_float": list(pt.as_floats()),
        "cell": list(cell.digits) if cell else None,
    })
    return OK


def cmd_curve_trace(args) -> int:
    if args.samples < 2:
        raise ConfigError("need at least 2 samples")
    rows = []
    for i in range(args.samples):
        t = Fraction(i, args.samples - 1)
        rows.append([float(t)] + list(_curve_point(args, t).as_floats()))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"x{i + 1}" for i in range(args.dim)])
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return OK


# -- surjection ----------------------------------------------------------------

def _tiled(args) -> lt.TiledLineMap:
    return lt.TiledLineMap(_target(args.target), args.depth, args.channel)


def cmd_surj_eval(args) -> int:
    F = _tiled(args)
    t = cc.as_fraction(args.t)
    pt = F.evaluate(t)
    out = {"target": args.target, "depth": args.depth, "channel": args.channel, "t": _fs(t),
           "point": [_fs(x) for x in pt], "point_float": [float(x) for x in pt]}
    if t > 0:
        k, n, u = lt.tile_lookup(t)
        out["tile"] = {"k": k, "n": n, "local": _fs(u)}
    _emit(args, out)
    return OK


def cmd_surj_witnesses(args) -> int:
    F = _tiled(args)
    a = _fracs(args.point)
    tol = Fraction(args.tol)
    ts = F.witnesses(a, args.count, Fraction(args.beyond), tol, args.max_tiles)
    residuals = [F.residual(t, a) for t in ts]
    ok = all(r <= tol for r in residuals) and all(t > Fraction(args.beyond) for t in ts)
    _emit(args, {"point": [_fs(x) for x in a], "beyond": args.beyond, "tol": _fs(tol), "depth": args.depth,
                 "witnesses": [_fs(t) for t in ts], "residuals": residuals, "pass": ok})
    return OK if ok else FAIL


def cmd_surj_cover(args) -> int:
    F = _tiled(args)
    lo, hi = _fracs(args.box)
    dims = F.target.dim if F.target.kind == "euclidean" else args.dims
    rep = vf.coverage_scan(F, [(lo, hi)] * dims, Fraction(args.eps), args.max_tiles,
                           Fraction(args.beyond), timing=args.timing)
    payload = rep.to_json()
    if not args.full:
        payload.pop("hits")
    _emit(args, payload)
    return OK if rep.passed else FAIL


# -- order ---------------------------------------------------------------------

def cmd_order_coeffs(args) -> int:
    n = args.n if args.n is not None else args.trunc
    _emit(args, eo.prescribed_order_series(args.alpha, n).to_json())
    return OK


def cmd_order_estimate(args) -> int:
    s = eo.TruncatedSeries.from_json(_load_json(args.series))
    if args.method == "coeff":
        est = eo.order_from_coeffs(s, args.window, args.estimator)
    else:
        radii = _floats(args.radii) if args.radii else None
        if not radii:
            raise ConfigError("--radii is required for the growth method")
        est = eo.order_from_growth(s, radii)
    _emit(args, est.to_json())
    return OK


# -- algebra -------------------------------------------------------------------

def _element(args) -> alg.AlgebraElement:
    return alg.AlgebraElement.build(_floats(args.orders), args.poly, args.trunc, args.depth)


def cmd_algebra_order(args) -> int:
    e = _element(args)
    est = alg.element_order(e, args.estimator)
    target = max(e.generators[k - 1].s for k in eo.index_set(e.poly))
    out = est.to_json()
    out.update({"orders": [g.s for g in e.generators], "poly": str(e.P), "expected": target,
                "trunc": args.trunc})
    _emit(args, out)
    return OK


def cmd_algebra_scan(args) -> int:
    rep = alg.surjectivity_scan(_element(args), args.radius, args.eps, args.max_tiles, timing=args.timing)
    if not args.full:
        rep.pop("hits")
    _emit(args, rep)
    return OK if rep["pass"] else FAIL


# -- family --------------------------------------------------------------------

def cmd_family_build(args) -> int:
    names = [s.strip() for s in args.seeds.split(",") if s.strip()]
    if len(set(names)) != len(names):
        raise ConfigError("seeds must be distinct")
    members = lf.build_family(names, args.prefix)
    _emit(args, {
        "prefix": args.prefix,
        "enumeration": "height |p|+q, increasing q, +p/q before -p/q, 0 first",
        "members": [{"seed": m.J.seed.name, "approx": _fs(m.J.seed.approx), "bits": m.J.seed.bits,
                     "indices": m.J.indices[: args.prefix]} for m in members],
    })
    return OK


def _family_from_json(data: dict, depth: int) -> list:
    members = []
    for entry in data["members"]:
        seed = lf.Seed(entry["seed"], Fraction(entry["approx"]), entry.get("bits", lf.SEED_BITS))
        s = lf.AdSet(seed)
        s.extend(len(entry["indices"]))
        if s.indices != list(entry["indices"]):
            raise ConfigError(f"indices recorded for {seed.name} do not match the enumeration")
        members.append(lf.FamilyMember(s, depth=depth, label=seed.name))
    return members


def cmd_family_rank(args) -> int:
    members = _family_from_json(_load_json(args.family), args.depth)
    rep = lf.independence_test(members, args.samples_per_member)
    rep["seeds"] = [m.label for m in members]
    _emit(args, rep)
    return OK if rep["pass"] else FAIL


# -- seq -----------------------------------------------------------------------

def cmd_seq_phi(args) -> int:
    y = sm.phi_r(args.r, args.t)
    _emit(args, {"r": args.r, "t": args.t, "phi": y, "inverse": sm.phi_r_inverse(args.r, y)})
    return OK


def cmd_seq_metric(args) -> int:
    x = sm.FiniteSeq.from_json(_load_json(args.x))
    y = sm.FiniteSeq.from_json(_load_json(args.y))
    if args.kind == "product":
        terms = args.terms if args.terms is not None else max(x.support, y.support)
        value, tail = sm.product_metric(x, y, terms)
        _emit(args, {"kind": "product", "value": value, "tail_bound": tail, "terms": terms})
    else:
        n = max(x.support, y.support)
        value = sm.uniform_metric(dict(enumerate(x.padded(n))), dict(enumerate(y.padded(n))))
        _emit(args, {"kind": "uniform", "value": value})
    return OK


# -- verify --------------------------------------------------------------------

def cmd_verify(args) -> int:
    names = vf.SUITES if args.suite == "all" else [args.suite]
    results = [vf.run_suite(n, args.seed, args.trunc, args.depth).to_json() for n in names]
    payload = results[0] if len(results) == 1 else {"suites": results, "pass": all(r["pass"] for r in results)}
    _emit(args, payload)
    return OK if all(r["pass"] for r in results) else FAIL


def cmd_verify_unbounded(args) -> int:
    F = _tiled(args)
    pts = [tuple(_fracs(p)) for p in args.points.split(";") if p.strip()]
    res = vf.unboundedness_scan(F, pts, [int(b) for b in args.bounds.split(",")], Fraction(args.tol), args.max_tiles)
    _emit(args, res.to_json())
    return OK if res.passed else FAIL


# -- parser --------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, top: bool) -> None:
    d = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p.add_argument("--out", default=d(None), help="write output to FILE instead of stdout")
    p.add_argument("--seed", type=int, default=d(vf.DEFAULT_SEED), help="seed for random cases")
    p.add_argument("--depth", type=int, default=d(lt.DEFAULT_DEPTH), help="curve depth")
    p.add_argument("--trunc", type=int, default=d(400), help="series truncation order")
    p.add_argument("--timing", action="store_true", default=d(False), help="include wall time in reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peano-lab", description=__doc__.splitlines()[0], allow_abbrev=False)
    _common(parser, True)
    sub = parser.add_subparsers(dest="group", required=True)

    def leaf(group, name, fn, help_):
        p = group.add_parser(name, help=help_, allow_abbrev=False)
        _common(p, False)
        p.set_defaults(fn=fn)
        return p

    curve = sub.add_parser("curve", help="space-filling curves").add_subparsers(dest="cmd", required=True)
    for name, fn in (("eval", cmd_curve_eval), ("trace", cmd_curve_trace)):
        p = leaf(curve, name, fn, f"{name} a curve")
        p.add_argument("--kind", choices=("hilbert", "peano"), default="hilbert")
        p.add_argument("--dim", type=int, default=2)
        if name == "eval":
            p.add_argument("--t", required=True, help="parameter as NUM/DEN")
        else:
            p.add_argument("--samples", type=int, default=257)

    surj = sub.add_parser("surjection", help="tiled line surjections").add_subparsers(dest="cmd", required=True)
    for name, fn in (("eval", cmd_surj_eval), ("witnesses", cmd_surj_witnesses), ("cover", cmd_surj_cover)):
        p = leaf(surj, name, fn, f"{name} for the tiled map")
        p.add_argument("--target", default="r2", help="r2, r3, ... or c00")
        p.add_argument("--channel", type=int, default=None, help="block map f_n instead of the composite")
        p.add_argument("--max-tiles", type=int, default=lt.DEFAULT_TILE_BUDGET)
    surj_eval, surj_wit, surj_cover = (surj.choices[n] for n in ("eval", "witnesses", "cover"))
    surj_eval.add_argument("--t", required=True)
    surj_wit.add_argument("--point", required=True, help='comma separated, e.g. "0.3,0.7"')
    surj_wit.add_argument("--count", type=int, default=1)
    surj_wit.add_argument("--beyond", default="0")
    surj_wit.add_argument("--tol", default="1/1000000")
    surj_cover.add_argument("--box", default="-2,2", help="lo,hi for every axis")
    surj_cover.add_argument("--dims", type=int, default=2, help="axes of the box for the c00 target")
    surj_cover.add_argument("--eps", default="1/50")
    surj_cover.add_argument("--beyond", default="0")
    surj_cover.add_argument("--full", action="store_true", help="list every hit")

    order = sub.add_parser("order", help="orders of entire functions").add_subparsers(dest="cmd", required=True)
    p = leaf(order, "coeffs", cmd_order_coeffs, "coefficients of f_alpha")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, default=None, help="truncation order (defaults to --trunc)")
    p = leaf(order, "estimate", cmd_order_estimate, "estimate the order of a series file")
    p.add_argument("--series", required=True)
    p.add_argument("--method", choices=("coeff", "growth"), default="coeff")
    p.add_argument("--estimator", choices=("limsup", "fit"), default="limsup")
    p.add_argument("--window", type=float, default=0.5)
    p.add_argument("--radii", default=None, help="comma separated radii for the growth method")

    algebra = sub.add_parser("algebra", help="algebra of surjections").add_subparsers(dest="cmd", required=True)
    for name, fn in (("order", cmd_algebra_order), ("scan", cmd_algebra_scan)):
        p = leaf(algebra, name, fn, f"element {name}")
        p.add_argument("--orders", required=True, help="comma separated non-integer orders")
        p.add_argument("--poly", required=True, help='polynomial in z1, z2, ... e.g. "z1*z2+z1"')
    algebra.choices["order"].add_argument("--estimator", choices=("limsup", "fit"), default="fit")
    scan = algebra.choices["scan"]
    scan.add_argument("--radius", type=float, default=1.5)
    scan.add_argument("--eps", type=float, default=0.05)
    scan.add_argument("--max-tiles", type=int, default=10_000)
    scan.add_argument("--full", action="store_true", help="list every hit")

    family = sub.add_parser("family", help="linearly independent families").add_subparsers(dest="cmd", required=True)
    p = leaf(family, "build", cmd_family_build, "build AdSet prefixes")
    p.add_argument("--seeds", default=",".join(lf.DEFAULT_SEEDS))
    p.add_argument("--prefix", type=int, default=64)
    p = leaf(family, "rank", cmd_family_rank, "sampled-matrix rank")
    p.add_argument("--family", required=True)
    p.add_argument("--samples-per-member", type=int, default=8)

    seq = sub.add_parser("seq", help="sequence-space maps").add_subparsers(dest="cmd", required=True)
    p = leaf(seq, "phi", cmd_seq_phi, "evaluate phi_r")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p = leaf(seq, "metric", cmd_seq_metric, "distance between two sequence files")
    p.add_argument("--kind", choices=("product", "uniform"), default="product")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--terms", type=int, default=None)

    ver = sub.add_parser("verify", help="seeded verification suites")
    _common(ver, False)
    ver.add_argument("--suite", choices=vf.SUITES + ("all",), default="all")
    ver.set_defaults(fn=cmd_verify)
    vsub = ver.add_subparsers(dest="cmd")
    p = leaf(vsub, "unbounded", cmd_verify_unbounded, "witnesses beyond growing bounds")
    p.add_argument("--target", default="r2")
    p.add_argument("--channel", type=int, default=None)
    p.add_argument("--points", required=True, help='";"-separated points, e.g. "0.5,0.5;1,-1"')
    p.add_argument("--bounds", default="10,100,1000")
    p.add_argument("--tol", default="1/100")
    p.add_argument("--max-tiles", type=int, default=lt.DEFAULT_TILE_BUDGET)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _FAILURES as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return FAIL
    except (ConfigError, PeanoLabError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return CONFIG


if __name__ == "__main__":
    sys.exit(main())
