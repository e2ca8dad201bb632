"""Continuous surjections of the real line with unbounded fibers.

The half-line is tiled by unit intervals ``I(k, n) = [j, j + 1]`` where
``(k, n) = g(j)`` for the Cantor pairing ``g``.  Channel ``n`` owns the tiles
``I(k, n)`` for every ``k``; on such a tile the block map ``f_n`` runs a loop
from the origin out over the ``k``-th box ``K_k`` of the target and back, and
it is zero everywhere else.  The composite map ``F`` is ``f_n`` on the tiles of
every channel ``n`` and zero on ``(-inf, 0]``.

Inside a tile the local coordinate ``u`` in ``[0, 1]`` is split as

* ``[0, 1/8]``: straight segment from the origin to the curve's start corner,
* ``[1/8, 7/8]``: the Hilbert curve scaled onto ``K_k``,
* ``[7/8, 1]``: straight segment from the curve's end corner back to 0.

Parameters and points are exact ``Fraction`` values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import curve_core
from .curve_core import MAX_DEPTH, as_fraction
from .errors import (
    BudgetExhausted,
    DepthOverflow,
    NegativeParameter,
    ResolutionTooCoarse,
    TargetOutOfRange,
)

OUT_LEG = Fraction(1, 8)
BACK_LEG = Fraction(7, 8)
DEFAULT_DEPTH = 16
DEFAULT_TILE_BUDGET = 200_000


class CantorPairing:
    """Bijection ``g: N0 -> N x N`` with ``g(0) = (1, 1)``.

    ``g^-1(k, n) = w (w + 1) / 2 + (n - 1)`` with ``w = k + n - 2``.
    """

    tag = "cantor"

    @staticmethod
    def encode(k: int, n: int) -> int:
        if k < 1 or n < 1:
            raise ValueError("tile indices start at 1")
        w = k + n - 2
        return w * (w + 1) // 2 + (n - 1)

    @staticmethod
    def decode(j: int) -> tuple:
        if j < 0:
            raise ValueError("pairing index must be non-negative")
        w = (math.isqrt(8 * j + 1) - 1) // 2
        b = j - w * (w + 1) // 2
        return w - b + 1, b + 1


PAIRING = CantorPairing()


def tile_lookup(t) -> tuple:
    """Return ``(k, n, local)`` with ``t`` in ``I(k, n)`` (right-open)."""
    q = as_fraction(t)
    if q < 0:
        raise NegativeParameter(f"t = {q} lies in the constant region")
    j = math.floor(q)
    k, n = PAIRING.decode(j)
    return k, n, q - j


def tile_start(k: int, n: int) -> int:
    return PAIRING.encode(k, n)


@dataclass(frozen=True)
class TargetSpace:
    """``euclidean``: ``K_k = [-k, k]^dim``.  ``c00``: ``K_k = [-k, k]^k x {0}``."""

    kind: str = "euclidean"
    dim: Optional[int] = 2

    def __post_init__(self):
        if self.kind == "euclidean":
            if self.dim is None or self.dim < 1:
                raise ValueError("euclidean target needs a positive dimension")
        elif self.kind == "c00":
            object.__setattr__(self, "dim", None)
        else:
            raise ValueError(f"unknown target kind {self.kind!r}")

    @classmethod
    def euclidean(cls, dim: int) -> "TargetSpace":
        return cls("euclidean", dim)

    @classmethod
    def c00(cls) -> "TargetSpace":
        return cls("c00", None)

    def curve_dim(self, k: int) -> int:
        return self.dim if self.kind == "euclidean" else k

    def box(self, k: int) -> list:
        return [(-k, k)] * self.curve_dim(k)

    def origin(self) -> tuple:
        return (Fraction(0),) * self.dim if self.kind == "euclidean" else ()

    def normalize(self, a: Sequence) -> tuple:
        """Exact point of the space; c00 points are trimmed of trailing zeros."""
        pt = tuple(as_fraction(x) for x in a)
        if self.kind == "euclidean":
            if len(pt) != self.dim:
                raise TargetOutOfRange(f"expected a point of R^{self.dim}, got {len(pt)} coordinates")
            return pt
        end = len(pt)
        while end and pt[end - 1] == 0:
            end -= 1
        return pt[:end]

    def min_box(self, a: Sequence) -> int:
        """Smallest ``k`` with ``a`` in ``K_k``."""
        pt = self.normalize(a)
        k = max([1] + [math.ceil(abs(x)) for x in pt])
        if self.kind == "c00":
            k = max(k, len(pt))
        return k

    def contains(self, a: Sequence, k: int) -> bool:
        return self.min_box(a) <= k

    def distance(self, x: Sequence, y: Sequence) -> float:
        """Euclidean distance on R^d, sup norm on c00."""
        n = max(len(x), len(y))
        xs = list(x) + [0] * (n - len(x))
        ys = list(y) + [0] * (n - len(y))
        diffs = [abs(float(p) - float(q)) for p, q in zip(xs, ys)]
        if self.kind == "c00":
            return max(diffs, default=0.0)
        return math.sqrt(sum(d * d for d in diffs))

    def cell_error_exceeds(self, k: int, depth: int, scale: Fraction, tol: Fraction) -> bool:
        """True when a depth-``depth`` cell of ``K_k`` times ``scale`` can be
        wider than ``tol`` in this space's norm."""
        side = abs(scale) * 2 * k
        if self.kind == "c00":
            return side > tol * (1 << depth)
        return side * side * self.curve_dim(k) > tol * tol * (1 << (2 * depth))


def _scale_into_box(pt: curve_core.CurvePoint, k: int) -> tuple:
    return tuple(k * (2 * c - 1) for c in pt.coords)


def loop_point(target: TargetSpace, k: int, u: Fraction, depth: int) -> tuple:
    """Point of the origin-based loop over ``K_k`` at local coordinate ``u``."""
    dim = target.curve_dim(k)
    if u <= OUT_LEG:
        start = _scale_into_box(curve_core.hilbert_point(0, dim, depth), k)
        pt = tuple(8 * u * c for c in start)
    elif u >= BACK_LEG:
        end = _scale_into_box(curve_core.hilbert_point(1, dim, depth), k)
        pt = tuple(8 * (1 - u) * c for c in end)
    else:
        s = (u - OUT_LEG) * Fraction(4, 3)
        pt = _scale_into_box(curve_core.hilbert_point(s, dim, depth), k)
    return target.normalize(pt) if target.kind == "c00" else pt


class TiledMap:
    """Shared machinery for maps that equal ``scale(n) * f_n`` on channel-n tiles."""

    target: TargetSpace
    depth: int

    def channel_scale(self, n: int) -> Fraction:
        raise NotImplementedError

    def evaluate(self, t, depth: Optional[int] = None) -> tuple:
        depth = self.depth if depth is None else depth
        if depth > MAX_DEPTH or depth < 0:
            raise DepthOverflow(f"depth {depth} outside [0, {MAX_DEPTH}]")
        q = as_fraction(t)
        if q <= 0:
            return self.target.origin()
        k, n, u = tile_lookup(q)
        c = self.channel_scale(n)
        if c == 0 or u == 0:
            return self.target.origin()
        pt = loop_point(self.target, k, u, depth)
        if c != 1:
            pt = self.target.normalize(tuple(c * x for x in pt))
        return pt

    __call__ = evaluate

    def residual(self, t, a) -> float:
        return self.target.distance(self.evaluate(t), self.target.normalize(a))

    def witnesses(self, a, count: int = 1, beyond=0, tol=Fraction(1, 10**6),
                  max_tiles: int = DEFAULT_TILE_BUDGET) -> list:
        return fiber_witnesses(self, a, count, beyond, tol, max_tiles)


@dataclass(frozen=True)
class TiledLineMap(TiledMap):
    """``f_n`` when ``channel`` is set, the composite ``F`` when it is None."""

    target: TargetSpace = field(default_factory=lambda: TargetSpace.euclidean(2))
    depth: int = DEFAULT_DEPTH
    channel: Optional[int] = None

    def __post_init__(self):
        if self.depth < 0 or self.depth > MAX_DEPTH:
            raise DepthOverflow(f"depth {self.depth} outside [0, {MAX_DEPTH}]")
        if self.channel is not None and self.channel < 1:
            raise ValueError("channels are numbered from 1")

    @property
    def composite(self) -> bool:
        return self.channel is None

    def channel_scale(self, n: int) -> Fraction:
        if self.channel is None or self.channel == n:
            return Fraction(1)
        return Fraction(0)

    def block(self, n: int) -> "TiledLineMap":
        return TiledLineMap(self.target, self.depth, n)


def block_map_eval(spec: TiledLineMap, t, depth: Optional[int] = None) -> tuple:
    if spec.channel is None:
        raise ValueError("block_map_eval needs a channel map f_n")
    return spec.evaluate(t, depth)


def composite_eval(spec: TiledLineMap, t, depth: Optional[int] = None) -> tuple:
    return spec.evaluate(t, depth)


def fiber_witnesses(spec: TiledMap, a, count: int = 1, beyond=0, tol=Fraction(1, 10**6),
                    max_tiles: int = DEFAULT_TILE_BUDGET) -> list:
    """Parameters ``t_1 < ... < t_count``, all past ``beyond``, with
    ``|spec(t_i) - a| <= tol``.

    Each witness is the parameter of a curve cell located by exact inverse
    lookup inside a tile whose box contains ``a / scale``.
    """
    if count < 1:
        raise ValueError("count must be positive")
    target = spec.target
    point = target.normalize(a)
    tol = as_fraction(tol)
    start = max(0, math.floor(as_fraction(beyond)) + 1)
    found = []
    if all(x == 0 for x in point):
        return [Fraction(j) for j in range(start, start + count)]

    too_coarse = False
    need = {}
    for j in range(start, start + max_tiles):
        k, n = PAIRING.decode(j)
        c = spec.channel_scale(n)
        if c == 0:
            continue
        if c not in need:
            need[c] = target.min_box(tuple(x / c for x in point))
        if need[c] > k:
            continue
        b = tuple(x / c for x in point)
        if target.cell_error_exceeds(k, spec.depth, c, tol):
            # hopeless only if even the smallest admissible box is too coarse
            too_coarse = too_coarse or target.cell_error_exceeds(need[c], spec.depth, c, tol)
            continue
        s = _cell_parameter(target, b, k, spec.depth)
        t = j + OUT_LEG + Fraction(3, 4) * s
        found.append(t)
        if len(found) == count:
            return found
    if too_coarse and not found:
        raise ResolutionTooCoarse(
            f"tol {float(tol):g} is below the depth-{spec.depth} cell size of every candidate tile")
    raise BudgetExhausted(f"found {len(found)} of {count} witnesses within {max_tiles} tiles")


def _cell_parameter(target: TargetSpace, b: tuple, k: int, depth: int) -> Fraction:
    """Start parameter of the depth-``depth`` cell of ``K_k`` holding ``b``."""
    dim = target.curve_dim(k)
    coords = list(b) + [Fraction(0)] * (dim - len(b))
    side = 1 << depth
    corner = []
    for x in coords:
        y = (x / k + 1) / 2
        corner.append(min(math.floor(y * side), side - 1))
    index = curve_core.hilbert_index(corner, depth)
    return Fraction(index, 1 << (dim * depth))


@dataclass(frozen=True)
class ProjectedMap:
    """``G(t_1, ..., t_m) = F(t_1)``."""

    base: TiledMap
    m: int

    def evaluate(self, ts: Sequence) -> tuple:
        if len(ts) != self.m:
            raise ValueError(f"expected {self.m} parameters")
        return self.base.evaluate(ts[0])

    __call__ = evaluate

    def fiber_points(self, a, count: int = 1, beyond=0, tol=Fraction(1, 10**6)) -> list:
        """Fiber points ``(t, s, ..., s)``; the free coordinates reach past ``beyond``."""
        ts = self.base.witnesses(a, count, 0, tol)
        far = math.floor(as_fraction(beyond)) + 1
        return [(t,) + (Fraction(far + i),) * (self.m - 1) for i, t in enumerate(ts)]


def projection_lift(spec: TiledMap, m: int):
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return spec
    return ProjectedMap(spec, m)


def trace(fn: Callable, ts: Sequence) -> list:
    return [(t, fn(t)) for t in ts]
