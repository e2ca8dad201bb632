"""Sequence-space targets: c00 vectors, the coordinate homeomorphisms
``phi_r(t) = e^(rt) - e^(-rt)``, product and uniform metrics, and boxes.

Sequences are 0-indexed in Python; the weight of entry ``i`` in the product
metric is ``2**-(i + 1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import IndexMismatch, SaturationError
from .line_tiling import TargetSpace, TiledLineMap, fiber_witnesses

_EXP_LIMIT = 709.0


@dataclass(frozen=True)
class FiniteSeq:
    """Eventually null sequence; ``support`` is one past the last nonzero entry."""

    entries: tuple = ()

    def __post_init__(self):
        vals = list(self.entries)
        while vals and vals[-1] == 0:
            vals.pop()
        object.__setattr__(self, "entries", tuple(vals))

    @property
    def support(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int):
        return self.entries[i] if i < len(self.entries) else 0

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def sup_norm(self) -> float:
        return max((abs(float(x)) for x in self.entries), default=0.0)

    def padded(self, n: int) -> tuple:
        return self.entries + (0,) * (n - len(self.entries))

    def to_json(self) -> dict:
        return {"entries": [float(x) for x in self.entries]}

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteSeq":
        return cls(tuple(data["entries"]))


@dataclass(frozen=True)
class RateVector:
    """Positive rates ``r_1, r_2, ...``: explicit entries then a constant tail."""

    rates: tuple = ()
    tail: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        for r in self.rates + (self.tail,):
            if not (r > 0 and math.isfinite(r)):
                raise ValueError(f"rates must lie in (0, inf), got {r}")

    def __getitem__(self, i: int) -> float:
        return self.rates[i] if i < len(self.rates) else self.tail

    @property
    def sup_norm(self) -> float:
        return max(self.rates + (self.tail,))


def phi_r(r: float, t: float) -> float:
    if r <= 0:
        raise ValueError("rate must be positive")
    x = r * float(t)
    if abs(x) > _EXP_LIMIT:
        raise SaturationError(f"phi_{r}({t}) needs exp({abs(x):.1f})")
    return 2.0 * math.sinh(x)


def phi_r_inverse(r: float, y: float) -> float:
    """Inverse of ``phi_r``; ``phi_r(t) = 2 sinh(rt)`` gives ``asinh(y / 2) / r``."""
    if r <= 0:
        raise ValueError("rate must be positive")
    return math.asinh(float(y) / 2.0) / r


def big_phi(r: RateVector, x: FiniteSeq) -> FiniteSeq:
    """Coordinatewise ``phi_{r_n}``; zero entries stay zero, so support is kept."""
    out = []
    for i, t in enumerate(x.entries):
        if t == 0:
            out.append(0.0)
            continue
        try:
            out.append(phi_r(r[i], t))
        except SaturationError as exc:
            raise SaturationError(str(exc), index=i) from None
    return FiniteSeq(tuple(out))


def big_phi_inverse(r: RateVector, y: FiniteSeq) -> FiniteSeq:
    return FiniteSeq(tuple(0.0 if v == 0 else phi_r_inverse(r[i], v) for i, v in enumerate(y.entries)))


def equicontinuity_bound(r: RateVector, t: float, s: float) -> float:
    """Upper bound for ``|phi_{r_n}(t) - phi_{r_n}(s)|`` uniform in ``n``.

    ``|phi_r'(u)| = 2 r cosh(r u) <= 2 r e^(r |u|)`` with ``|u| <= max(|t|, |s|)``.
    """
    R = r.sup_norm
    return 2.0 * R * math.exp(R * max(abs(t), abs(s))) * abs(t - s)


def product_metric(x: FiniteSeq, y: FiniteSeq, terms: Optional[int] = None) -> tuple:
    """``(value, tail_bound)`` of ``sum 2^-n |x_n - y_n| / (1 + |x_n - y_n|)``
    over the first ``terms`` entries; the omitted tail is below ``2**-terms``."""
    need = max(x.support, y.support)
    terms = need if terms is None else terms
    if terms < need:
        raise ValueError(f"terms must cover the support ({need})")
    total = 0.0
    for i in range(terms):
        d = abs(float(x[i]) - float(y[i]))
        total += math.ldexp(d / (1.0 + d), -(i + 1))
    return total, math.ldexp(1.0, -terms)


def uniform_metric(f: Mapping, g: Mapping) -> float:
    """``sup_l min(1, |f(l) - g(l)|)`` over a common finite index set."""
    if set(f) != set(g):
        raise IndexMismatch("functions are defined on different index sets")
    return max((min(1.0, abs(float(f[k]) - float(g[k]))) for k in f), default=0.0)


@dataclass(frozen=True)
class IndexMap:
    """Finite index sets ``Gamma <= Lambda`` with a rate in (0, 1] per gamma."""

    lam: tuple
    gamma: tuple
    rates: Mapping

    def __post_init__(self):
        if not set(self.gamma) <= set(self.lam):
            raise IndexMismatch("Gamma must be a subset of Lambda")
        if set(self.rates) != set(self.gamma):
            raise IndexMismatch("one rate per element of Gamma")
        for r in self.rates.values():
            if not 0 < r <= 1:
                raise ValueError("rates over Gamma lie in (0, 1]")


def index_surjection(m: IndexMap, f: Mapping) -> dict:
    """``Phi_r(f)(gamma) = phi_{r_gamma}(f(gamma))``; depends only on ``f|Gamma``."""
    if set(f) != set(m.lam):
        raise IndexMismatch("f must be defined exactly on Lambda")
    return {g: phi_r(m.rates[g], f[g]) for g in m.gamma}


def index_preimage(m: IndexMap, target: Mapping, fill: float = 0.0) -> dict:
    """Some ``f`` over Lambda with ``index_surjection(m, f) == target``."""
    if set(target) != set(m.gamma):
        raise IndexMismatch("target must be defined exactly on Gamma")
    return {l: phi_r_inverse(m.rates[l], target[l]) if l in target else fill for l in m.lam}


@dataclass(frozen=True)
class Box:
    bounds: tuple

    @property
    def dims(self) -> int:
        return len(self.bounds)

    def contains(self, x: Sequence) -> bool:
        if len(x) > self.dims and any(v != 0 for v in x[self.dims:]):
            return False
        return all(lo <= v <= hi for v, (lo, hi) in zip(x, self.bounds))

    def is_subset(self, other: "Box") -> bool:
        if self.dims > other.dims:
            return False
        return all(olo <= lo and hi <= ohi for (lo, hi), (olo, ohi) in zip(self.bounds, other.bounds))


def box_cover(k: int, dims: int, profile: str = "cube") -> Box:
    """``[-k, k]^dims`` (``cube``) or ``k * prod_{n <= dims} [-1/n, 1/n]``
    (``hilbert_cube``)."""
    if profile == "cube":
        return Box(tuple((Fraction(-k), Fraction(k)) for _ in range(dims)))
    if profile == "hilbert_cube":
        return Box(tuple((Fraction(-k, n), Fraction(k, n)) for n in range(1, dims + 1)))
    raise ValueError(f"unknown profile {profile!r}")


@dataclass(frozen=True)
class PhiComposite:
    """``Phi_r o F`` for a c00-valued tiled map ``F``."""

    rates: RateVector
    base: TiledLineMap

    def __post_init__(self):
        if self.base.target.kind != "c00":
            raise ValueError("PhiComposite needs a c00 target")

    @property
    def target(self) -> TargetSpace:
        return self.base.target

    def evaluate(self, t) -> FiniteSeq:
        return big_phi(self.rates, FiniteSeq(self.base.evaluate(t)))

    __call__ = evaluate

    def residual(self, t, a) -> float:
        value, a = self.evaluate(t), FiniteSeq(tuple(a))
        n = max(value.support, a.support)
        return max((abs(float(value[i]) - float(a[i])) for i in range(n)), default=0.0)

    def witnesses(self, a, count: int = 1, beyond=0, tol=Fraction(1, 100), max_tiles: int = 200_000) -> list:
        """Pull ``a`` back through ``Phi_r`` and search the fiber of ``F``.

        The inner tolerance divides ``tol`` by the Lipschitz constant of
        ``phi`` on a unit neighbourhood of the pulled-back point.
        """
        a = FiniteSeq(tuple(float(v) for v in a))
        b = big_phi_inverse(self.rates, a)
        reach = b.sup_norm() + 1.0
        lip = 2.0 * self.rates.sup_norm * math.cosh(self.rates.sup_norm * reach)
        inner = Fraction(float(tol) / (2.0 * lip)).limit_denominator(10**12)
        inner = min(inner, Fraction(1, 2))
        pt = tuple(Fraction(v) for v in b.entries)
        return fiber_witnesses(self.base, pt, count, beyond, inner, max_tiles)
