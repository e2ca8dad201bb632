"""Linearly independent families of line surjections.

Each irrational seed ``alpha`` picks the index set ``A_alpha`` of a subsequence
of a fixed enumeration of the rationals converging to ``alpha``; two such sets
meet in finitely many indices.  The member ``F_alpha`` is the sum of the block
maps ``f_n`` over ``n`` in ``A_alpha``; on a tile of channel ``n`` it is ``f_n``
when ``n`` is in the set and 0 otherwise.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import mpmath
import numpy as np

from .curve_core import as_fraction
from .errors import DegenerateSamplePlan, PrecisionExhausted
from .line_tiling import (
    DEFAULT_DEPTH,
    PAIRING,
    TargetSpace,
    TiledLineMap,
    TiledMap,
    tile_lookup,
)

SEED_BITS = 128
RANK_THRESHOLD = 1e-8


class RationalEnumeration:
    """``q_1, q_2, ...``: 0 first, then by height ``|p| + q`` (``q >= 1``,
    ``gcd(p, q) = 1``), within a height by increasing ``q``, ``+p/q``
    before ``-p/q``.  Indices are 1-based."""

    def __init__(self):
        self._terms = [Fraction(0)]
        self._height = 1

    def _grow(self):
        self._height += 1
        h = self._height
        for q in range(1, h):
            p = h - q
            if math.gcd(p, q) == 1:
                self._terms.append(Fraction(p, q))
                self._terms.append(Fraction(-p, q))

    def __getitem__(self, n: int) -> Fraction:
        if n < 1:
            raise IndexError("enumeration indices start at 1")
        while len(self._terms) < n:
            self._grow()
        return self._terms[n - 1]

    def prefix(self, count: int) -> list:
        self[count]
        return self._terms[:count]

    def index_of(self, q: Fraction) -> int:
        """Position of ``q``; heights up to ``|p| + den`` are materialised."""
        q = Fraction(q)
        while self._height < abs(q.numerator) + q.denominator:
            self._grow()
        return self._terms.index(q) + 1


ENUMERATION = RationalEnumeration()


def _named_constant(name: str):
    name = name.strip().lower()
    sign = 1
    if name.startswith("-"):
        sign, name = -1, name[1:]
    with mpmath.workprec(SEED_BITS + 64):
        if name.startswith("sqrt"):
            n = int(name[4:])
            if math.isqrt(n) ** 2 == n:
                raise ValueError(f"sqrt{n} is rational")
            value = mpmath.sqrt(n)
        elif name in ("phi", "golden"):
            value = (1 + mpmath.sqrt(5)) / 2
        elif name == "pi":
            value = +mpmath.pi
        elif name.startswith("pi-") or name.startswith("pi+"):
            value = mpmath.pi + int(name[2:])
        elif name == "e":
            value = +mpmath.e
        elif name.startswith("e-") or name.startswith("e+"):
            value = mpmath.e + int(name[1:])
        elif name == "ln2":
            value = mpmath.log(2)
        else:
            raise ValueError(f"unknown irrational seed {name!r}")
        scaled = mpmath.floor(value * mpmath.mpf(2) ** SEED_BITS)
    return sign * Fraction(int(scaled), 1 << SEED_BITS)


@dataclass(frozen=True)
class Seed:
    """An irrational known to ``SEED_BITS`` bits: ``|alpha - approx| < 2**-bits``."""

    name: str
    approx: Fraction
    bits: int = SEED_BITS

    @classmethod
    def named(cls, name: str) -> "Seed":
        return cls(name, _named_constant(name))

    @property
    def error(self) -> Fraction:
        return Fraction(1, 1 << self.bits)

    def __float__(self):
        return float(self.approx)

    def within(self, q: Fraction, radius: Fraction) -> bool:
        """Decide ``|q - alpha| < radius`` or raise PrecisionExhausted."""
        d = abs(q - self.approx)
        if d + self.error < radius:
            return True
        if d - self.error >= radius:
            return False
        raise PrecisionExhausted(f"{self.name} is not known precisely enough to compare with {q}")


@dataclass(eq=False)
class AdSet:
    """``A_alpha = {n_1 < n_2 < ...}``: ``n_k`` is the least index above
    ``n_{k-1}`` with ``|q_{n_k} - alpha| < 1/k``.

    The prefix grows on demand; growth mutates the object, so share it across
    threads only after calling :meth:`extend` up front.
    """

    seed: Seed
    indices: list = field(default_factory=list)
    enumeration: RationalEnumeration = field(default_factory=lambda: ENUMERATION, repr=False)

    def extend(self, count: int) -> list:
        n = self.indices[-1] if self.indices else 0
        while len(self.indices) < count:
            k = len(self.indices) + 1
            radius = Fraction(1, k)
            n += 1
            while not self.seed.within(self.enumeration[n], radius):
                n += 1
            self.indices.append(n)
        return self.indices[:count]

    def extend_past(self, bound: int) -> list:
        """Materialise every element ``<= bound``."""
        while not self.indices or self.indices[-1] < bound:
            self.extend(len(self.indices) + 1)
        return [n for n in self.indices if n <= bound]

    def __contains__(self, n: int) -> bool:
        self.extend_past(n)
        i = bisect.bisect_left(self.indices, n)
        return i < len(self.indices) and self.indices[i] == n

    def position(self, n: int) -> int:
        """1-based position ``k`` with ``n_k = n``."""
        self.extend_past(n)
        return self.indices.index(n) + 1


def ad_set(alpha, count: int) -> AdSet:
    seed = Seed.named(alpha) if isinstance(alpha, str) else alpha
    if count < 1:
        raise ValueError("count must be positive")
    s = AdSet(seed)
    s.extend(count)
    return s


def intersection_certificate(a: AdSet, b: AdSet) -> dict:
    """Exact ``A_alpha ∩ A_beta`` with the index bound past which it cannot grow.

    A common index at positions ``k`` and ``k'`` forces
    ``|alpha - beta| < 1/k + 1/k'``, so once ``2/K < |alpha - beta|`` no index
    at positions ``>= K`` in both sets can coincide; everything is decided by
    the elements at positions ``< K``.
    """
    gap = abs(a.seed.approx - b.seed.approx) - a.seed.error - b.seed.error
    if gap <= 0:
        raise PrecisionExhausted("seeds are not separated at the available precision")
    K = math.floor(2 / gap) + 1
    a.extend(K)
    b.extend(K)
    bound = max(a.indices[K - 2] if K >= 2 else 0, b.indices[K - 2] if K >= 2 else 0)
    common = sorted(set(a.extend_past(bound)) & set(b.extend_past(bound)))
    return {"common": common, "count": len(common), "stable_after": bound, "position_bound": K}


class FamilyMember(TiledMap):
    """``F_J = sum_{n in J} f_n``; ``J`` is an AdSet or an explicit finite set."""

    def __init__(self, J, target: Optional[TargetSpace] = None, depth: int = DEFAULT_DEPTH,
                 label: Optional[str] = None):
        self.J = J if isinstance(J, AdSet) else frozenset(int(n) for n in J)
        self.target = target or TargetSpace.euclidean(2)
        self.depth = depth
        self.label = label or (J.seed.name if isinstance(J, AdSet) else "explicit")

    def channel_scale(self, n: int) -> Fraction:
        return Fraction(1) if n in self.J else Fraction(0)

    def channels(self, bound: int) -> list:
        if isinstance(self.J, AdSet):
            return self.J.extend_past(bound)
        return sorted(n for n in self.J if n <= bound)

    def __repr__(self):
        return f"FamilyMember({self.label})"


def member_eval(m: FamilyMember, t, depth: Optional[int] = None) -> tuple:
    return m.evaluate(t, depth)


class Combination(TiledMap):
    """``sum_i c_i F_i``; on channel-n tiles it is ``(sum_{i: n in J_i} c_i) f_n``."""

    def __init__(self, coeffs: Sequence, members: Sequence[FamilyMember]):
        if len(coeffs) != len(members):
            raise ValueError("one coefficient per member")
        if not members:
            raise ValueError("empty combination")
        self.coeffs = [Fraction(c) for c in coeffs]
        self.members = list(members)
        self.target = members[0].target
        self.depth = members[0].depth

    def channel_scale(self, n: int) -> Fraction:
        return sum((c for c, m in zip(self.coeffs, self.members) if n in m.J), Fraction(0))


def combo_eval(coeffs: Sequence, members: Sequence[FamilyMember], t, depth: Optional[int] = None) -> tuple:
    """Pointwise ``sum_i c_i F_i(t)`` computed term by term."""
    target = members[0].target
    total = None
    for c, m in zip(coeffs, members):
        v = m.evaluate(t, depth)
        term = tuple(Fraction(c) * x for x in v)
        if total is None:
            total = term
        else:
            width = max(len(total), len(term))
            total = tuple(
                (total[i] if i < len(total) else 0) + (term[i] if i < len(term) else 0)
                for i in range(width))
    return target.normalize(total) if target.kind == "c00" else total


def exclusive_channel(members: Sequence[FamilyMember], i: int, bound: int = 10_000) -> Optional[int]:
    """Least channel ``<= bound`` in member ``i``'s set and in no other's."""
    others = [set(m.channels(bound)) for j, m in enumerate(members) if j != i]
    for n in members[i].channels(bound):
        if not any(n in o for o in others):
            return n
    return None


def sample_plan(members: Sequence[FamilyMember], per_member: int = 8, bound: int = 10_000,
                require_exclusive: bool = False) -> list:
    """Sample parameters: for each member, points inside tiles ``I(k, n)``,
    ``k = 1 .. per_member``, of a channel ``n`` exclusive to it (or of its
    first channel when none is exclusive)."""
    plan = []
    for i, m in enumerate(members):
        n = exclusive_channel(members, i, bound)
        exclusive = n is not None
        if n is None:
            if require_exclusive:
                raise DegenerateSamplePlan(f"member {i} ({m.label}) has no exclusive channel below {bound}")
            chans = m.channels(bound)
            if not chans:
                raise DegenerateSamplePlan(f"member {i} ({m.label}) has no channel below {bound}")
            n = chans[0]
        for k in range(1, per_member + 1):
            j = PAIRING.encode(k, n)
            plan.append({"member": i, "channel": n, "k": k, "t": j + Fraction(1, 2) + Fraction(1, 1 << (k + 4)),
                         "exclusive": exclusive})
    return plan


def independence_test(members: Sequence[FamilyMember], per_member: int = 8, plan=None,
                      threshold: float = RANK_THRESHOLD) -> dict:
    """Numerical rank of the member-by-sample value matrix after row scaling."""
    if len(members) < 2:
        raise ValueError("need at least two members")
    if plan is None:
        plan = sample_plan(members, per_member)
    else:
        _check_plan(members, plan)
    covered = sorted({p["member"] for p in plan if p.get("exclusive", True)})
    columns = []
    for p in plan:
        values = [m.evaluate(p["t"]) for m in members]
        width = max(len(v) for v in values)
        for c in range(width):
            columns.append([float(v[c]) if c < len(v) else 0.0 for v in values])
    A = np.asarray(columns, dtype=float).T
    norms = np.linalg.norm(A, axis=1)
    if np.any(norms == 0):
        raise DegenerateSamplePlan("some member vanishes on every sample")
    A = A / norms[:, None]
    sv = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(sv > threshold * sv[0]))
    return {
        "rank": rank,
        "members": len(members),
        "pass": rank == len(members),
        "singular_values": [float(s) for s in sv],
        "ratio": float(sv[-1] / sv[0]),
        "samples": len(plan),
        "exclusive": covered,
    }


def _check_plan(members: Sequence[FamilyMember], plan: Sequence) -> None:
    """Each member needs a sample on a tile whose channel only it owns."""
    channels = {tile_lookup(as_fraction(p["t"]))[1] for p in plan if as_fraction(p["t"]) > 0}
    for i, m in enumerate(members):
        if not any(n in m.J and not any(n in o.J for j, o in enumerate(members) if j != i)
                   for n in channels):
            raise DegenerateSamplePlan(f"no sample on a channel exclusive to member {i} ({m.label})")


DEFAULT_SEEDS = ("ln2", "pi-3", "sqrt2", "phi", "sqrt3", "sqrt5", "e", "pi", "sqrt17", "-sqrt2")


def build_family(seeds: Iterable[str], prefix: int = 64, target: Optional[TargetSpace] = None,
                 depth: int = DEFAULT_DEPTH) -> list:
    members = []
    for name in seeds:
        s = ad_set(name, prefix)
        members.append(FamilyMember(s, target, depth, label=name))
    return members


def block_identity_residual(coeffs: Sequence, members: Sequence[FamilyMember], n0: int, ts: Sequence,
                            depth: Optional[int] = None) -> list:
    """``combo(t) - c_last * f_{n0}(t)`` at each ``t`` (exact, should be zero)."""
    f = TiledLineMap(members[0].target, members[0].depth if depth is None else depth, n0)
    out = []
    for t in ts:
        k, n, _ = tile_lookup(as_fraction(t))
        if n != n0:
            raise ValueError(f"t = {t} is not in a channel-{n0} tile")
        lhs = combo_eval(coeffs, members, t, depth)
        rhs = tuple(Fraction(coeffs[-1]) * x for x in f.evaluate(t))
        out.append(tuple(a - b for a, b in zip(lhs, rhs)))
    return out
