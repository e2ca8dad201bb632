"""Truncated entire functions and their growth order.

Coefficients of high-order MacLaurin tails span thousands of decades
(``400**-800`` for ``f_0.5``), so a series stores ``log|a_n|`` and the unit
phase ``a_n / |a_n|`` instead of ``a_n``.  Sums and Cauchy products are done
with max-normalised exponentials in that representation.
"""
from __future__ import annotations

import json
import math
import re
import warnings
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import (
    ConstantPolynomial,
    DomainWarning,
    InvalidAlpha,
    PeanoLabError,
    SaturationError,
    TruncationUnreliable,
)

ORDER_CAP = 1.0e3
RELIABLE_RATIO = 1e-12
NEG_INF = -np.inf


class DomainError(PeanoLabError, ValueError):
    """Too few radii with M(f, r) > e to fit a growth slope."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """MacLaurin coefficients ``a_0 .. a_N`` kept as ``(log|a_n|, phase)``."""

    logabs: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        la = np.asarray(self.logabs, dtype=float)
        ph = np.asarray(self.phase, dtype=complex)
        if la.ndim != 1 or la.shape != ph.shape:
            raise ValueError("logabs and phase must be 1-D arrays of equal length")
        if la.size < 2:
            raise ValueError("a truncated series needs N >= 1")
        if np.any(np.isnan(la)) or np.any(la == np.inf):
            raise ValueError("coefficients must be finite")
        ph = np.where(np.isneginf(la), 1.0 + 0j, ph)
        object.__setattr__(self, "logabs", _frozen(la))
        object.__setattr__(self, "phase", _frozen(ph))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[complex]) -> "TruncatedSeries":
        c = np.asarray(coeffs, dtype=complex)
        mag = np.abs(c)
        with np.errstate(divide="ignore"):
            la = np.log(mag)
        ph = np.where(mag > 0, np.exp(1j * np.angle(c)), 1.0)
        return cls(la, ph)

    @classmethod
    def zero(cls, N: int) -> "TruncatedSeries":
        return cls(np.full(N + 1, NEG_INF), np.ones(N + 1, dtype=complex))

    @classmethod
    def monomial(cls, degree: int, N: int, coeff: complex = 1.0) -> "TruncatedSeries":
        c = np.zeros(N + 1, dtype=complex)
        if degree <= N:
            c[degree] = coeff
        return cls.from_coeffs(c)

    @property
    def N(self) -> int:
        return self.logabs.size - 1

    @property
    def coeffs(self) -> np.ndarray:
        """Plain complex coefficients; magnitudes below ~1e-308 read as 0."""
        return np.exp(self.logabs) * self.phase

    def coeff(self, n: int) -> complex:
        return complex(math.exp(self.logabs[n]) * self.phase[n]) if np.isfinite(self.logabs[n]) else 0j

    def is_zero(self) -> bool:
        return bool(np.all(np.isneginf(self.logabs)))

    def is_constant(self) -> bool:
        return bool(np.all(np.isneginf(self.logabs[1:])))

    def truncate(self, N: int) -> "TruncatedSeries":
        if N < 1 or N > self.N:
            raise ValueError(f"cannot truncate order {self.N} series at {N}")
        return TruncatedSeries(self.logabs[: N + 1], self.phase[: N + 1])

    def tail_log_size(self, r: float) -> float:
        """``log`` of the largest of the last few terms ``|a_n| r^n``."""
        width = max(1, self.N // 20)
        n = np.arange(self.N + 1 - width, self.N + 1)
        return float(np.max(self.logabs[-width:] + n * math.log(r)))

    def _log_terms(self, r: float) -> np.ndarray:
        n = np.arange(self.N + 1)
        with np.errstate(invalid="ignore"):
            out = self.logabs + n * math.log(r)
        return np.where(np.isneginf(self.logabs), NEG_INF, out)

    def check_reliable(self, r: float, current_log_max: float):
        if r <= 0:
            return
        tail = self.tail_log_size(r)
        if np.isfinite(tail) and tail > current_log_max + math.log(RELIABLE_RATIO):
            raise TruncationUnreliable(
                f"tail term exp({tail:.3g}) is not below 1e-12 of M at r = {r:g}; raise N")

    def evaluate(self, z: complex, check: bool = True) -> complex:
        z = complex(z)
        r = abs(z)
        if r == 0:
            return self.coeff(0)
        logs = self._log_terms(r)
        top = float(np.max(logs))
        if not np.isfinite(top):
            return 0j
        if check:
            self.check_reliable(r, top)
        n = np.arange(self.N + 1)
        rot = np.exp(1j * n * math.atan2(z.imag, z.real))
        s = np.sum(np.exp(logs - top) * self.phase * rot)
        if top > 700:
            raise SaturationError(f"|f(z)| ~ exp({top:.1f}) overflows")
        return complex(math.exp(top) * s)

    __call__ = evaluate

    def derivative(self) -> "TruncatedSeries":
        n = np.arange(1, self.N + 1)
        la = self.logabs[1:] + np.log(n)
        if la.size < 2:
            la = np.append(la, NEG_INF)
            ph = np.append(self.phase[1:], 1.0)
        else:
            ph = self.phase[1:]
        return TruncatedSeries(la, ph)

    def to_json(self) -> dict:
        c = self.coeffs
        return {
            "coeffs": [[float(x.real), float(x.imag)] for x in c],
            "log_abs": [None if not np.isfinite(v) else float(v) for v in self.logabs],
            "arg": [float(np.angle(p)) for p in self.phase],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TruncatedSeries":
        """Read ``{"coeffs": [[re, im], ...]}``; the optional ``log_abs`` and
        ``arg`` arrays carry magnitudes beyond the float range losslessly."""
        if "log_abs" in data:
            la = np.array([NEG_INF if v is None else v for v in data["log_abs"]], dtype=float)
            ph = np.exp(1j * np.asarray(data.get("arg", [0.0] * la.size), dtype=float))
            return cls(la, ph)
        return cls.from_coeffs([complex(re, im) for re, im in data["coeffs"]])

    def dumps(self) -> str:
        return json.dumps(self.to_json())


# -- arithmetic ---------------------------------------------------------------

def _log_add(la, pa, lb, pb):
    la, lb = np.asarray(la), np.asarray(lb)
    m = np.maximum(la, lb)
    finite = np.isfinite(m)
    safe_m = np.where(finite, m, 0.0)
    with np.errstate(invalid="ignore", over="ignore"):
        s = np.exp(la - safe_m) * pa + np.exp(lb - safe_m) * pb
    mag = np.abs(s)
    with np.errstate(divide="ignore"):
        out = np.where(finite & (mag > 0), safe_m + np.log(np.where(mag > 0, mag, 1.0)), NEG_INF)
    ph = np.where(mag > 0, np.exp(1j * np.angle(s)), 1.0)
    return out, ph


def series_add(s1: TruncatedSeries, s2: TruncatedSeries) -> TruncatedSeries:
    N = min(s1.N, s2.N)
    la, ph = _log_add(s1.logabs[: N + 1], s1.phase[: N + 1], s2.logabs[: N + 1], s2.phase[: N + 1])
    return TruncatedSeries(la, ph)


def series_scale(s: TruncatedSeries, c: complex) -> TruncatedSeries:
    c = complex(c)
    if c == 0:
        return TruncatedSeries.zero(s.N)
    return TruncatedSeries(s.logabs + math.log(abs(c)), s.phase * (c / abs(c)))


def series_add_constant(s: TruncatedSeries, c: complex) -> TruncatedSeries:
    return series_add(s, TruncatedSeries.monomial(0, s.N, c))


def series_mul(s1: TruncatedSeries, s2: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at ``min(N1, N2)``."""
    N = min(s1.N, s2.N)
    la, pa = s1.logabs[: N + 1], s1.phase[: N + 1]
    lb, pb = s2.logabs[: N + 1], s2.phase[: N + 1]
    out = np.full(N + 1, NEG_INF)
    ph = np.ones(N + 1, dtype=complex)
    for n in range(N + 1):
        logs = la[: n + 1] + lb[n::-1]
        top = logs.max()
        if not np.isfinite(top):
            continue
        s = np.sum(np.exp(logs - top) * pa[: n + 1] * pb[n::-1])
        mag = abs(s)
        if mag > 0:
            out[n] = top + math.log(mag)
            ph[n] = s / mag
    return TruncatedSeries(out, ph)


def series_pow(s: TruncatedSeries, e: int) -> TruncatedSeries:
    if e < 0:
        raise ValueError("negative powers are not entire")
    result = TruncatedSeries.monomial(0, s.N)
    base = s
    while e:
        if e & 1:
            result = series_mul(result, base)
        e >>= 1
        if e:
            base = series_mul(base, base)
    return result


# -- prescribed order ---------------------------------------------------------

def prescribed_order_series(alpha: float, N: int) -> TruncatedSeries:
    """``f_alpha(z) = sum_{n>=1} z^n / n^(n/alpha)``, truncated at ``N``."""
    if not alpha > 0 or not math.isfinite(alpha):
        raise InvalidAlpha(f"order must be a positive real, got {alpha}")
    if N < 2:
        raise ValueError("N must be at least 2")
    n = np.arange(N + 1, dtype=float)
    la = np.empty(N + 1)
    la[0] = NEG_INF
    la[1:] = -(n[1:] / alpha) * np.log(n[1:])
    return TruncatedSeries(la, np.ones(N + 1, dtype=complex))


# -- order estimation ---------------------------------------------------------

@dataclass(frozen=True)
class OrderEstimate:
    value: float
    method: str
    window: tuple
    residual: Optional[float] = None
    infinite: bool = False
    constant: bool = False

    def to_json(self) -> dict:
        return {
            "estimate": self.value,
            "method": self.method,
            "window": list(self.window),
            "residual": self.residual,
            "infinite": self.infinite,
            "constant": self.constant,
        }


def _window_indices(N: int, window: float) -> np.ndarray:
    if not 0 <= window <= 1:
        raise ValueError("window must be a fraction in [0, 1]")
    lo = max(2, math.ceil(window * N))
    return np.arange(lo, N + 1)


def order_from_coeffs(s: TruncatedSeries, window: float = 0.5, method: str = "limsup") -> OrderEstimate:
    """Order of ``s`` from its coefficients over the tail ``[ceil(window N), N]``.

    ``limsup``: max of ``n log n / log(1/|a_n|)`` over the window, the finite
    stand-in for the limsup.  It converges like ``1/log n``.

    ``fit``: least-squares fit of
    ``log(1/|a_n|) = A n log n + B n + C sqrt(n) + D log n + E``, returning
    ``1/A``.  ``B n`` absorbs the type, ``C sqrt(n)`` the sub-linear shift that
    lower-order factors of a product contribute, ``D log n`` the polynomial
    prefactors (Stirling's ``log n / 2`` for ``1/n!``).
    """
    if method not in ("limsup", "fit"):
        raise ValueError(f"unknown method {method!r}")
    idx = _window_indices(s.N, window)
    span = (int(idx[0]), int(idx[-1])) if idx.size else (s.N, s.N)
    if s.is_constant():
        return OrderEstimate(0.0, method, span, constant=True)
    la = s.logabs[idx]
    keep = np.isfinite(la)
    n = idx[keep].astype(float)
    inv = -la[keep]
    if n.size == 0:
        # eventually zero: a polynomial at this truncation
        return OrderEstimate(0.0, method, span, constant=True)
    if method == "limsup":
        if np.any(inv <= 0):
            return OrderEstimate(ORDER_CAP, method, span, infinite=True)
        ratios = n * np.log(n) / inv
        return OrderEstimate(float(np.max(ratios)), method, span)
    if n.size < 5:
        raise ValueError("the fit method needs at least 5 nonzero tail coefficients")
    design = np.column_stack([n * np.log(n), n, np.sqrt(n), np.log(n), np.ones_like(n)])
    sol, *_ = np.linalg.lstsq(design, inv, rcond=None)
    resid = float(np.sqrt(np.mean((design @ sol - inv) ** 2)))
    slope = sol[0]
    if slope <= 1.0 / ORDER_CAP:
        return OrderEstimate(ORDER_CAP, method, span, resid, infinite=True)
    return OrderEstimate(float(1.0 / slope), method, span, resid)


def max_modulus(s: TruncatedSeries, r: float, samples: int = 1024, check: bool = True) -> float:
    """``max |s(z)|`` over ``samples`` equally spaced points of ``|z| = r``."""
    log_m = log_max_modulus(s, r, samples, check)
    if log_m > 709:
        raise SaturationError(f"M(f, {r:g}) ~ exp({log_m:.1f}) overflows")
    return math.exp(log_m) if np.isfinite(log_m) else 0.0


def log_max_modulus(s: TruncatedSeries, r: float, samples: int = 1024, check: bool = True) -> float:
    """``log M(f, r)``; the samples include ``z = r`` and the sum is one FFT."""
    if r <= 0:
        raise ValueError("radius must be positive")
    if samples < 1:
        raise ValueError("samples must be positive")
    logs = s._log_terms(r)
    top = float(np.max(logs))
    if not np.isfinite(top):
        return NEG_INF
    if check:
        s.check_reliable(r, top)
    b = np.exp(logs - top) * s.phase
    folded = np.zeros(samples, dtype=complex)
    np.add.at(folded, np.arange(s.N + 1) % samples, b)
    peak = float(np.max(np.abs(np.fft.ifft(folded) * samples)))
    return top + math.log(peak) if peak > 0 else NEG_INF


def order_from_growth(s: TruncatedSeries, radii: Sequence[float], samples: int = 512) -> OrderEstimate:
    """Least-squares slope of ``log log M(f, r)`` against ``log r``."""
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be increasing")
    xs, ys = [], []
    for r in radii:
        lm = log_max_modulus(s, r, samples)
        if not lm > 1.0:
            warnings.warn(f"M(f, {r:g}) <= e; radius dropped", DomainWarning, stacklevel=2)
            continue
        xs.append(math.log(r))
        ys.append(math.log(lm))
    if len(xs) < 2:
        raise DomainError("need at least two radii with M(f, r) > e")
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((np.polyval([slope, intercept], xs) - np.asarray(ys)) ** 2)))
    return OrderEstimate(max(0.0, float(slope)), "growth", (radii[0], radii[-1]), resid)


# -- polynomials --------------------------------------------------------------

_VAR = re.compile(r"z(\d+)")


@dataclass(frozen=True)
class PolySpec:
    """Polynomial in ``z_1 .. z_M``: exponent tuple -> nonzero coefficient."""

    monomials: Mapping
    nvars: int = 0

    def __post_init__(self):
        items = self.monomials.items() if isinstance(self.monomials, Mapping) else self.monomials
        merged = {}
        width = self.nvars
        for expo, c in items:
            expo = tuple(int(e) for e in expo)
            if any(e < 0 for e in expo):
                raise ValueError("exponents must be non-negative")
            width = max(width, len(expo))
            merged[expo] = merged.get(expo, 0) + complex(c)
        canon = {}
        for expo, c in merged.items():
            key = expo + (0,) * (width - len(expo))
            canon[key] = canon.get(key, 0) + c
        canon = {k: v for k, v in sorted(canon.items()) if v != 0}
        object.__setattr__(self, "monomials", canon)
        object.__setattr__(self, "nvars", width)

    @classmethod
    def parse(cls, text: str, nvars: int = 0) -> "PolySpec":
        """Parse e.g. ``"3*z1^4 + z1*z2 - 7"`` (``^`` and ``**`` both accepted)."""
        import sympy

        idx = [int(m) for m in _VAR.findall(text)]
        if any(i < 1 for i in idx):
            raise ValueError("variables are z1, z2, ...")
        width = max([nvars] + idx)
        symbols = sympy.symbols([f"z{i}" for i in range(1, width + 1)]) if width else []
        local = {str(sym): sym for sym in symbols}
        expr = sympy.sympify(text.replace("^", "**"), locals=local)
        if not width:
            return cls({(): complex(expr)}, 0)
        poly = sympy.Poly(sympy.expand(expr), *symbols)
        return cls({m: complex(c) for m, c in poly.terms()}, width)

    @property
    def constant_term(self) -> complex:
        return self.monomials.get((0,) * self.nvars, 0j)

    @property
    def has_constant(self) -> bool:
        return self.constant_term != 0

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.monomials)

    def degree(self) -> int:
        return max((sum(e) for e in self.monomials), default=0)

    def without_constant(self) -> "PolySpec":
        return PolySpec({e: c for e, c in self.monomials.items() if sum(e) > 0}, self.nvars)

    def evaluate(self, values: Sequence[complex]) -> complex:
        if len(values) != self.nvars:
            raise ValueError(f"expected {self.nvars} values")
        total = 0j
        for expo, c in self.monomials.items():
            term = c
            for v, e in zip(values, expo):
                if e:
                    term *= v ** e
            total += term
        return total

    def __str__(self):
        parts = []
        for expo, c in self.monomials.items():
            factors = [f"z{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(expo) if e]
            coef = c.real if c.imag == 0 else c
            if not factors:
                parts.append(f"{coef:g}" if isinstance(coef, float) else str(coef))
            elif coef == 1:
                parts.append("*".join(factors))
            else:
                head = f"{coef:g}" if isinstance(coef, float) else f"({coef})"
                parts.append(head + "*" + "*".join(factors))
        return " + ".join(parts) if parts else "0"


def index_set(P: PolySpec) -> set:
    """``{n : dP/dz_n != 0}``, 1-based."""
    if P.is_constant():
        raise ConstantPolynomial("constant polynomial has no index set")
    return {i + 1 for expo in P.monomials for i, e in enumerate(expo) if e > 0}


def compose_poly(P: PolySpec, series: Sequence[TruncatedSeries]) -> TruncatedSeries:
    """The series of ``P(s_1, ..., s_M)``, truncated at ``min N``."""
    if P.is_constant():
        raise ConstantPolynomial("P must be non-constant")
    if len(series) != P.nvars:
        raise ValueError(f"P has {P.nvars} variables but {len(series)} series were given")
    N = min(s.N for s in series)
    series = [s.truncate(N) if s.N > N else s for s in series]
    powers = [{1: s} for s in series]

    def power(i, e):
        cache = powers[i]
        if e not in cache:
            half = power(i, e // 2)
            sq = series_mul(half, half)
            cache[e] = series_mul(sq, series[i]) if e % 2 else sq
        return cache[e]

    total = TruncatedSeries.zero(N)
    for expo, c in P.monomials.items():
        term = None
        for i, e in enumerate(expo):
            if e:
                p = power(i, e)
                term = p if term is None else series_mul(term, p)
        if term is None:
            term = TruncatedSeries.monomial(0, N)
        total = series_add(total, series_scale(term, c))
    return total
