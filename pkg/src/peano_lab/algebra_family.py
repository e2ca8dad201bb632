"""Free algebra of line surjections into the complex plane.

Generators are ``phi_s o F`` where ``F`` is the plane-valued composite tiled
map (read as ``x + iy``) and ``phi_s = f_s`` is the prescribed-order series
with ``s`` a positive non-integer.  An element is ``P(phi_{s_1}, ...) o F``
for a non-constant polynomial ``P`` without constant term.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .entire_orders import (
    OrderEstimate,
    PolySpec,
    TruncatedSeries,
    compose_poly,
    order_from_coeffs,
    prescribed_order_series,
)
from .errors import BudgetExhausted, ConstantPolynomial, InvalidAlpha, ResolutionTooCoarse
from .line_tiling import DEFAULT_DEPTH, TargetSpace, TiledLineMap, fiber_witnesses

DEFAULT_TRUNC = 256
GRID = 64
NEWTON_STEPS = 50
REFINE_TRIES = 4


def plane_map(depth: int = DEFAULT_DEPTH) -> TiledLineMap:
    return TiledLineMap(TargetSpace.euclidean(2), depth)


@dataclass(frozen=True)
class GeneratorSpec:
    s: float
    N: int = DEFAULT_TRUNC
    series: TruncatedSeries = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        s = float(self.s)
        if not (s > 0 and math.isfinite(s)) or s == int(s):
            raise InvalidAlpha(f"generator order must be a positive non-integer, got {self.s}")
        object.__setattr__(self, "s", s)
        if self.series is None:
            object.__setattr__(self, "series", prescribed_order_series(s, self.N))


@dataclass(frozen=True)
class AlgebraElement:
    P: PolySpec
    generators: tuple
    base: TiledLineMap = field(default_factory=plane_map)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if self.P.is_constant():
            raise ConstantPolynomial("elements need a non-constant polynomial")
        if self.P.has_constant:
            raise ValueError("P must not have a constant term")
        if self.P.nvars > len(self.generators):
            raise ValueError(f"P uses {self.P.nvars} variables but only {len(self.generators)} generators were given")
        orders = [g.s for g in self.generators]
        if len(set(orders)) != len(orders):
            raise ValueError("generator orders must be pairwise distinct")
        if self.base.target != TargetSpace.euclidean(2):
            raise ValueError("the base map must be plane-valued")

    @classmethod
    def build(cls, orders: Sequence[float], poly: str, N: int = DEFAULT_TRUNC,
              depth: int = DEFAULT_DEPTH) -> "AlgebraElement":
        gens = tuple(GeneratorSpec(s, N) for s in orders)
        return cls(PolySpec.parse(poly, len(gens)), gens, plane_map(depth))

    @property
    def poly(self) -> PolySpec:
        """``P`` padded to one variable per generator."""
        if self.P.nvars == len(self.generators):
            return self.P
        return PolySpec(self.P.monomials, len(self.generators))

    def at(self, z: complex, check: bool = True) -> complex:
        """``P(f_{s_1}(z), ...)``."""
        if z == 0:
            return 0j
        return self.poly.evaluate([g.series.evaluate(z, check) for g in self.generators])

    def composed(self) -> TruncatedSeries:
        return compose_poly(self.poly, [g.series for g in self.generators])

    def evaluate(self, t, depth: Optional[int] = None) -> complex:
        return element_eval(self, t, depth)

    __call__ = evaluate


def plane_point(F: TiledLineMap, t, depth: Optional[int] = None) -> complex:
    x, y = F.evaluate(t, depth)
    return complex(float(x), float(y))


def element_eval(e: AlgebraElement, t, depth: Optional[int] = None) -> complex:
    return e.at(plane_point(e.base, t, depth))


def element_order(e: AlgebraElement, method: str = "fit", window: float = 0.5) -> OrderEstimate:
    return order_from_coeffs(e.composed(), window, method)


def vector_eval(elements: Sequence[AlgebraElement], t, depth: Optional[int] = None) -> tuple:
    """``C^n``-valued map built coordinatewise from independent elements."""
    return tuple(element_eval(e, t, depth) for e in elements)


class _Solver:
    """Roots of ``g(z) = w`` for ``g = P(f_{s_1}, ...)`` on a polar grid plus Newton."""

    def __init__(self, e: AlgebraElement, reach: float, grid: int = GRID):
        self.e = e
        h = e.composed()
        self.c = h.coeffs
        self.dc = h.derivative().coeffs
        self.zmax = self._radius_for(reach)
        radii = np.linspace(self.zmax / grid, self.zmax, grid)
        angles = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
        self.zgrid = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
        self.ggrid = self.g(self.zgrid)

    def g(self, z):
        return np.polynomial.polynomial.polyval(z, self.c)

    def dg(self, z):
        return np.polynomial.polynomial.polyval(z, self.dc)

    def _radius_for(self, reach: float) -> float:
        """A radius whose circle ``g`` maps outside ``|w| <= reach``."""
        r = 0.5
        angles = np.exp(1j * np.linspace(0, 2 * math.pi, 256, endpoint=False))
        while r < 1e3:
            if np.min(np.abs(self.g(r * angles))) > reach:
                return r
            r *= 1.25
        return r

    def _newton(self, z: complex, w: complex, tol: float) -> Optional[complex]:
        res = abs(complex(self.g(z)) - w)
        for _ in range(NEWTON_STEPS):
            if res <= tol:
                return z
            d = complex(self.dg(z))
            if d == 0:
                return None
            step = (complex(self.g(z)) - w) / d
            lam = 1.0
            while lam > 1e-6:
                cand = z - lam * step
                r2 = abs(complex(self.g(cand)) - w)
                if r2 < res:
                    z, res = cand, r2
                    break
                lam /= 2
            else:
                return None
        return z if res <= tol else None

    def solve(self, w: complex, tol: float, starts: int = 8) -> Optional[complex]:
        """Root of ``g = w`` from the best grid starts, preferring the one
        whose neighbourhood is cheapest to hit (small ``|g'| * box``)."""
        roots = []
        for i in np.argsort(np.abs(self.ggrid - w))[:starts]:
            z = self._newton(complex(self.zgrid[i]), w, tol)
            if z is not None:
                box = max(1.0, math.ceil(max(abs(z.real), abs(z.imag))))
                roots.append((abs(complex(self.dg(z))) * box, abs(z), z.real, z.imag))
        if not roots:
            return None
        _, _, x, y = min(roots)
        return complex(x, y)


def disk_net(R: float, eps: float) -> list:
    """Square grid of step ``eps`` clipped to ``|w| <= R``, origin included."""
    m = int(math.floor(R / eps + 1e-9))
    pts = []
    for i in range(-m, m + 1):
        for j in range(-m, m + 1):
            w = complex(i * eps, j * eps)
            if abs(w) <= R + 1e-12:
                pts.append(w)
    return pts


def surjectivity_scan(e: AlgebraElement, R: float, eps: float, max_tiles: int = 10_000,
                      grid: int = GRID, timing: bool = False) -> dict:
    """Witness ``t`` with ``|e(t) - w| <= eps`` for each ``w`` of an eps-net of ``|w| <= R``."""
    if R <= 0 or eps <= 0:
        raise ValueError("radius and eps must be positive")
    t0 = time.perf_counter()
    solver = _Solver(e, R + eps, grid)
    hits, misses = [], []
    for w in disk_net(R, eps):
        if w == 0:
            hits.append({"w": [0.0, 0.0], "t": "0", "residual": 0.0})
            continue
        z = solver.solve(w, eps / 10)
        if z is None:
            misses.append({"w": [w.real, w.imag], "reason": "no root found"})
            continue
        pt = (Fraction(z.real), Fraction(z.imag))
        slope = max(abs(complex(solver.dg(z))), 1.0)
        inner = Fraction(eps / (4.0 * slope)).limit_denominator(10**12)
        outcome = None
        for _ in range(REFINE_TRIES):
            try:
                t = fiber_witnesses(e.base, pt, 1, 0, inner, max_tiles)[0]
            except (BudgetExhausted, ResolutionTooCoarse) as exc:
                outcome = type(exc).__name__
                break
            residual = abs(element_eval(e, t) - w)
            if residual <= eps:
                outcome = None
                hits.append({"w": [w.real, w.imag], "t": f"{t.numerator}/{t.denominator}", "residual": residual})
                break
            outcome = f"residual {residual:.3g}"
            inner /= 4
        if outcome is not None:
            misses.append({"w": [w.real, w.imag], "reason": outcome})
    report = {
        "orders": [g.s for g in e.generators],
        "poly": str(e.P),
        "radius": R,
        "eps": eps,
        "depth": e.base.depth,
        "trunc": min(g.N for g in e.generators),
        "net_size": len(hits) + len(misses),
        "hits": hits,
        "misses": misses,
        "pass": not misses,
    }
    if timing:
        report["wall_time"] = time.perf_counter() - t0
    return report
