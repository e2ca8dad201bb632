"""Exact space-filling curves of the unit interval onto unit cubes.

Two curves are provided:

* the Hilbert curve in dimension 2 or 3 (Gray-code / rotation formulation),
  starting at the origin and ending at ``(1, 0, ..., 0)``;
* Peano's original ternary curve of the square, ending at ``(1, 1)``.

Everything is integer arithmetic.  A depth-``d`` evaluation truncates the
parameter to ``d`` digits (base ``2**dim`` or 9) and returns the *exact* value
of the limit curve at the truncated parameter.  That value is a corner of the
depth-``d`` cell traversed from the truncated parameter on, so successive
depths move by at most one cell diagonal.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .errors import DepthOverflow, InvalidCell, UnsupportedDimension

MAX_DEPTH = 32

Param = Union["DyadicParam", Fraction, int, str]


@dataclass(frozen=True, eq=False)
class DyadicParam:
    """The parameter ``numerator / radix**depth`` in ``[0, 1]``.

    ``radix`` is ``2**dim`` for a Hilbert curve and 9 for the Peano curve, so
    one "digit" of depth is one level of subdivision.  The stored form is
    canonical: trailing zero digits are trimmed.
    """

    numerator: int
    depth: int
    radix: int = 4

    def __post_init__(self):
        if self.radix < 2:
            raise ValueError("radix must be at least 2")
        if self.depth < 0 or self.numerator < 0:
            raise ValueError("numerator and depth must be non-negative")
        if self.numerator > self.radix ** self.depth:
            raise ValueError("parameter exceeds 1")
        num, depth = self.numerator, self.depth
        while depth > 0 and num % self.radix == 0:
            num //= self.radix
            depth -= 1
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "depth", depth)

    @classmethod
    def from_value(cls, value, radix: int = 4) -> "DyadicParam":
        q = as_fraction(value)
        depth = 0
        while (q * radix ** depth).denominator != 1:
            depth += 1
            if depth > 4 * MAX_DEPTH:
                raise ValueError(f"{q} is not a finite base-{radix} fraction")
        return cls(int(q * radix ** depth), depth, radix)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.radix ** self.depth)

    def __eq__(self, other):
        if isinstance(other, DyadicParam):
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __lt__(self, other):
        return self.value < as_fraction(other)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"DyadicParam({self.numerator}/{self.radix}^{self.depth})"


@dataclass(frozen=True)
class CurvePoint:
    coords: tuple

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_floats(self) -> tuple:
        return tuple(float(c) for c in self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


@dataclass(frozen=True)
class CellAddress:
    """Geometric address of a subcube: one orthant digit per level.

    For a Hilbert cell the level digit packs the coordinate bits with the
    first axis most significant (digit in ``[0, 2**dim)``); for a Peano cell
    it is ``3 * x_digit + y_digit`` (digit in ``[0, 9)``).
    """

    digits: tuple
    dim: int
    kind: str = "hilbert"

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if self.kind not in ("hilbert", "peano"):
            raise InvalidCell(f"unknown curve kind {self.kind!r}")
        base = 3 if self.kind == "peano" else 2
        if self.dim < 1 or (self.kind == "peano" and self.dim != 2):
            raise InvalidCell(f"bad dimension {self.dim} for {self.kind}")
        top = base ** self.dim
        if any(d < 0 or d >= top for d in self.digits):
            raise InvalidCell(f"cell digits must lie in [0, {top})")

    @property
    def depth(self) -> int:
        return len(self.digits)

    @property
    def base(self) -> int:
        return 3 if self.kind == "peano" else 2

    def corner(self) -> tuple:
        """Integer lower corner on the grid of side ``base**-depth``."""
        return _digits_to_corner(self.digits, self.dim, self.base)

    def bounds(self) -> list:
        side = Fraction(1, self.base ** self.depth)
        return [(c * side, (c + 1) * side) for c in self.corner()]

    def contains(self, point) -> bool:
        return all(lo <= c <= hi for c, (lo, hi) in zip(point, self.bounds()))

    @classmethod
    def from_corner(cls, corner: Sequence[int], depth: int, kind: str = "hilbert") -> "CellAddress":
        dim = len(corner)
        base = 3 if kind == "peano" else 2
        digits = []
        for level in range(depth - 1, -1, -1):
            digit = 0
            for c in corner:
                digit = digit * base + (c // base ** level) % base
            digits.append(digit)
        return cls(tuple(digits), dim, kind)


def _digits_to_corner(digits, dim, base):
    corner = [0] * dim
    for digit in digits:
        parts = []
        for _ in range(dim):
            parts.append(digit % base)
            digit //= base
        parts.reverse()
        corner = [c * base + p for c, p in zip(corner, parts)]
    return tuple(corner)


def as_fraction(t) -> Fraction:
    """Coerce a parameter (DyadicParam, int, Fraction, float or "p/q") exactly."""
    if isinstance(t, DyadicParam):
        return t.value
    if isinstance(t, Fraction):
        return t
    if isinstance(t, str):
        return Fraction(t.strip())
    return Fraction(t)


# -- Hilbert engine ---------------------------------------------------------
#
# Subcube i (in visiting order) has corner bits gray(i).  Inside it the curve
# is the standard curve transformed by T^-1(b) = rotl(b, d(i) + 1) ^ e(i).
# Bit b of a word corresponds to axis dim - 1 - b, so the standard curve,
# which runs from 0 to the top bit, ends at (1, 0, ..., 0).

def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _gray_inverse(g: int) -> int:
    i = g
    g >>= 1
    while g:
        i ^= g
        g >>= 1
    return i


def _trailing_ones(i: int) -> int:
    return ((i ^ (i + 1)).bit_length()) - 1


def _entry(i: int) -> int:
    return 0 if i == 0 else _gray(2 * ((i - 1) // 2))


def _direction(i: int, n: int) -> int:
    if i == 0:
        return 0
    if i % 2 == 0:
        return _trailing_ones(i - 1) % n
    return _trailing_ones(i) % n


def _hilbert_forward(digits: Sequence[int], n: int, inner: list, scale_exp: int) -> tuple:
    """Push an inner point (numerators over 2**scale_exp, bit order) out through
    the subcube maps of ``digits`` (outermost first)."""
    v = list(inner)
    j = scale_exp
    for q in reversed(digits):
        e, r, w = _entry(q), _direction(q, n) + 1, _gray(q)
        z = [0] * n
        for b in range(n):
            z[(b + r) % n] = v[b]
        full = 1 << j
        for b in range(n):
            if (e >> b) & 1:
                z[b] = full - z[b]
            v[b] = (((w >> b) & 1) << j) + z[b]
        j += 1
    return tuple(v), j


def _hilbert_index_of_corner(corner_bits: Sequence[int], depth: int, n: int) -> list:
    """Visiting-order digits of the depth-``depth`` cell with the given lower
    corner (bit order)."""
    num = [2 * c + 1 for c in corner_bits]
    m = depth + 1
    digits = []
    for _ in range(depth):
        half = 1 << (m - 1)
        w = 0
        local = []
        for b in range(n):
            bit = num[b] >> (m - 1)
            w |= bit << b
            local.append(num[b] - bit * half)
        q = _gray_inverse(w)
        e, r = _entry(q), _direction(q, n) + 1
        for b in range(n):
            if (e >> b) & 1:
                local[b] = half - local[b]
        num = [local[(b + r) % n] for b in range(n)]
        digits.append(q)
        m -= 1
    return digits


def _split_digits(index: int, radix: int, depth: int) -> list:
    digits = []
    for _ in range(depth):
        index, d = divmod(index, radix)
        digits.append(d)
    digits.reverse()
    return digits


def _check_depth(depth: int, max_depth: int):
    if depth < 0 or depth > max_depth:
        raise DepthOverflow(f"depth {depth} outside [0, {max_depth}]")


def _truncate(t, radix: int, depth: int):
    """Return (cell index, is_endpoint) for t in [0, 1] at the given depth."""
    q = as_fraction(t)
    if q < 0 or q > 1:
        raise ValueError(f"curve parameter {q} outside [0, 1]")
    if q == 1:
        return radix ** depth - 1, True
    return (q.numerator * radix ** depth) // q.denominator, False


def hilbert_point(t, dim: int, depth: int, side: str = "right") -> CurvePoint:
    """Exact Hilbert point in any dimension ``dim >= 1`` (no dimension check).

    ``side="left"`` returns the limit from the left at the truncated
    parameter, i.e. the exit corner of the preceding cell.
    """
    radix = 1 << dim
    index, at_end = _truncate(t, radix, depth)
    top = [0] * dim
    top[dim - 1] = 1
    if side == "left" and not at_end:
        if index == 0:
            at_end = False
        else:
            index -= 1
            at_end = True
    inner = top if at_end else [0] * dim
    v, j = _hilbert_forward(_split_digits(index, radix, depth), dim, inner, 0)
    denom = 1 << j
    return CurvePoint(tuple(Fraction(v[dim - 1 - a], denom) for a in range(dim)))


def hilbert_eval(t: Param, dim: int, depth: int, max_depth: int = MAX_DEPTH) -> CurvePoint:
    """Depth-``depth`` Hilbert approximation point of ``t`` in ``[0, 1]^dim``."""
    if dim not in (2, 3):
        raise UnsupportedDimension(f"Hilbert curve supports dim 2 or 3, got {dim}")
    _check_depth(depth, max_depth)
    return hilbert_point(t, dim, depth)


def hilbert_cell_corner(t, dim: int, depth: int) -> tuple:
    """Integer lower corner (axis order) of the depth-``depth`` cell of ``t``."""
    radix = 1 << dim
    index, _ = _truncate(t, radix, depth)
    v, _ = _hilbert_forward(_split_digits(index, radix, depth), dim, [1] * dim, 1)
    return tuple((v[dim - 1 - a] - 1) // 2 for a in range(dim))


def hilbert_index(corner: Sequence[int], depth: int) -> int:
    """Visiting position of the cell with integer lower corner (axis order)."""
    n = len(corner)
    bits = [corner[n - 1 - b] for b in range(n)]
    index = 0
    for q in _hilbert_index_of_corner(bits, depth, n):
        index = index * (1 << n) + q
    return index


# -- Peano engine -----------------------------------------------------------

def _peano_digits(tdigits: Sequence[int]) -> tuple:
    """Peano's digit map: ternary digits of t -> ternary digits of (x, y)."""
    xs, ys = [], []
    odd_sum = even_sum = 0
    for i in range(0, len(tdigits), 2):
        a, b = tdigits[i], tdigits[i + 1]
        xs.append(2 - a if even_sum % 2 else a)
        odd_sum += a
        ys.append(2 - b if odd_sum % 2 else b)
        even_sum += b
    return xs, ys, odd_sum % 2, even_sum % 2


def _peano_tdigits(xs: Sequence[int], ys: Sequence[int]) -> list:
    tdigits = []
    odd_sum = even_sum = 0
    for x, y in zip(xs, ys):
        a = 2 - x if even_sum % 2 else x
        odd_sum += a
        b = 2 - y if odd_sum % 2 else y
        even_sum += b
        tdigits.extend((a, b))
    return tdigits


def _ternary(index: int, count: int) -> list:
    out = []
    for _ in range(count):
        index, d = divmod(index, 3)
        out.append(d)
    out.reverse()
    return out


def _from_ternary(digits) -> int:
    value = 0
    for d in digits:
        value = value * 3 + d
    return value


def peano_point(t, depth: int, side: str = "right") -> CurvePoint:
    index, at_end = _truncate(t, 9, depth)
    if side == "left" and not at_end and index > 0:
        index -= 1
        at_end = True
    xs, ys, odd, even = _peano_digits(_ternary(index, 2 * depth))
    scale = 3 ** depth
    x, y = _from_ternary(xs), _from_ternary(ys)
    # an infinite tail of 0s (or 2s) keeps both parities, so each coordinate
    # tail is constant: all 0s or all 2s, complemented when its parity is odd
    if at_end:
        return CurvePoint((Fraction(x + 1 - even, scale), Fraction(y + 1 - odd, scale)))
    return CurvePoint((Fraction(x + even, scale), Fraction(y + odd, scale)))


def peano_eval(t: Param, depth: int, max_depth: int = MAX_DEPTH) -> CurvePoint:
    """Depth-``depth`` point of Peano's ternary curve of the unit square."""
    _check_depth(depth, max_depth)
    return peano_point(t, depth)


# -- cells ------------------------------------------------------------------

def cell_of(t: Param, dim: int, depth: int, kind: str = "hilbert",
            max_depth: int = MAX_DEPTH) -> CellAddress:
    """The depth-``depth`` cell containing the image of ``t``'s digit interval."""
    _check_depth(depth, max_depth)
    if kind == "peano":
        if dim != 2:
            raise UnsupportedDimension("the Peano curve is two-dimensional")
        index, _ = _truncate(t, 9, depth)
        xs, ys, _, _ = _peano_digits(_ternary(index, 2 * depth))
        return CellAddress(tuple(3 * x + y for x, y in zip(xs, ys)), 2, "peano")
    if dim not in (2, 3):
        raise UnsupportedDimension(f"Hilbert curve supports dim 2 or 3, got {dim}")
    return CellAddress.from_corner(hilbert_cell_corner(t, dim, depth), depth)


def preimage_of_cell(cell: CellAddress) -> tuple:
    """Exact parameter interval ``(lo, hi)`` mapped onto ``cell``."""
    if not isinstance(cell, CellAddress):
        raise InvalidCell(f"expected CellAddress, got {type(cell).__name__}")
    depth = cell.depth
    if cell.kind == "peano":
        xs = [d // 3 for d in cell.digits]
        ys = [d % 3 for d in cell.digits]
        index = _from_ternary(_peano_tdigits(xs, ys))
        radix = 9
    else:
        index = hilbert_index(cell.corner(), depth)
        radix = 1 << cell.dim
    width = Fraction(1, radix ** depth)
    return index * width, (index + 1) * width


def iter_cells(dim: int, depth: int, kind: str = "hilbert") -> Iterator[CellAddress]:
    """All depth-``depth`` cells in curve visiting order."""
    radix = 9 if kind == "peano" else 1 << dim
    width = Fraction(1, radix ** depth)
    for i in range(radix ** depth):
        yield cell_of(i * width, dim, depth, kind)
