"""Symbolic closed subsets of the complex plane.

A :class:`SpectralSet` is a finite union of

* points (with an *attained* flag and a multiplicity in N or infinity),
* sequence families ``map(w_n)`` where ``w_n = q**n`` (n >= 0, geometric)
  or ``w_n = 1/n**p`` (n >= 1, harmonic) and ``map`` is a non-constant
  exact polynomial; the limit is ``map(0)``,
* real segments ``[lo, hi]``.

Families may exclude individual terms (by base index, by value or by lying
in a segment) and may omit their limit; this is how non-closed sets such as
``iso S`` and pole sets are written down.  Closed sets produced by
:func:`SpectralSet.normalized` never carry exclusions.

Membership in a family is decided in closed form: solve ``map(w) = z`` for
``w`` and then ``q**n = w`` or ``1/n**p = w`` for an integer ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional

import mpmath
import numpy as np

from .errors import UnsupportedImage
from .scalars import (
    DEFAULT_TF,
    ONE,
    ComplexValue,
    Polynomial,
    ToleranceFrame,
    cv,
    format_polynomial,
    modulus_bounds,
)

INF = math.inf

__all__ = [
    "INF",
    "Point",
    "Family",
    "Segment",
    "SpectralSet",
    "PoleSet",
    "geometric",
    "harmonic",
    "iso_points",
    "acc_set",
    "is_countable",
    "set_relation",
    "conjugate_set",
    "boundary",
    "union",
    "image",
    "includes",
    "disjoint",
    "segment_image",
]


@dataclass(frozen=True)
class Point:
    value: ComplexValue
    attained: bool = True
    multiplicity: float = 1  # int, or INF

    def conjugate(self) -> "Point":
        return replace(self, value=self.value.conjugate())


@dataclass(frozen=True, order=True)
class Segment:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if not self.lo < self.hi:
            raise ValueError(f"segment requires lo < hi, got [{self.lo}, {self.hi}]")

    def contains(self, z: ComplexValue, eps: float = 0.0) -> bool:
        if z.exact:
            return z.im == 0 and self.lo <= z.re <= self.hi
        return abs(z.im) <= eps and float(self.lo) - eps <= z.re <= float(self.hi) + eps

    def __str__(self):
        return f"[{cv(self.lo)}, {cv(self.hi)}]"


@dataclass(frozen=True)
class Family:
    """Terms ``map(w_n)`` of a geometric or harmonic base sequence."""

    kind: str  # "geometric" | "harmonic"
    param: object  # ComplexValue ratio q, or int exponent p
    map: Polynomial
    include_limit: bool = True
    skip: frozenset = frozenset()
    excluded: tuple = ()
    excluded_segments: tuple = ()

    def __post_init__(self):
        if self.kind == "geometric":
            q = cv(self.param)
            object.__setattr__(self, "param", q)
            if not q.exact:
                raise ValueError("geometric ratio must be exact")
            if q.is_zero() or q.abs2() >= 1:
                raise ValueError("geometric ratio must satisfy 0 < |q| < 1")
        elif self.kind == "harmonic":
            if not isinstance(self.param, int) or self.param < 1:
                raise ValueError("harmonic exponent must be a positive integer")
        else:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.map.is_constant():
            raise ValueError("family map must be non-constant")
        if not self.map.exact:
            raise ValueError("family map must have exact coefficients")
        param, fmap = rebase(self.kind, self.param, self.map)
        object.__setattr__(self, "param", param)
        object.__setattr__(self, "map", fmap)

    # basic data --------------------------------------------------------------
    @property
    def first_index(self) -> int:
        return 0 if self.kind == "geometric" else 1

    @property
    def limit(self) -> ComplexValue:
        return self.map.coeff(0)

    @property
    def is_plain(self) -> bool:
        return not (self.skip or self.excluded or self.excluded_segments)

    def base(self, n: int) -> ComplexValue:
        if self.kind == "geometric":
            return self.param ** n
        return ComplexValue(Fraction(1, n ** self.param), 0, True)

    def raw_term(self, n: int) -> ComplexValue:
        return self.map(self.base(n))

    def term_present(self, n: int) -> bool:
        if n in self.skip:
            return False
        t = self.raw_term(n)
        if any(t == e for e in self.excluded):
            return False
        if any(s.contains(t) for s in self.excluded_segments):
            return False
        return True

    def terms(self, count: int):
        """First ``count`` base indices with their terms (present or not)."""
        start = self.first_index
        for n in range(start, start + count):
            yield n, self.raw_term(n)

    def plain(self) -> "Family":
        return Family(self.kind, self.param, self.map)

    def same_sequence(self, other: "Family") -> bool:
        return self.kind == other.kind and self.param == other.param and self.map == other.map

    # membership -------------------------------------------------------------
    def raw_indices(self, z: ComplexValue) -> list[int]:
        """All base indices n with ``map(w_n) == z`` (exact z)."""
        out = set()
        for w in _solve_map(self.map, z):
            for n in self._index_candidates(w):
                if self.raw_term(n) == z:
                    out.add(n)
        return sorted(out)

    def _index_candidates(self, w) -> Iterable[int]:
        if isinstance(w, ComplexValue):
            if w.is_zero():
                return []
            wa = w.to_complex()
            exact_w = w
        else:
            wa = complex(w)
            exact_w = None
            if wa == 0:
                return []
        if self.kind == "geometric":
            q = self.param
            if exact_w is not None:
                lo, _ = modulus_bounds(exact_w)
                if lo > 1:
                    return []
                logw = _log_abs(exact_w)
            else:
                if abs(wa) > 1 + 1e-9:
                    return []
                logw = math.log(abs(wa))
            est = logw / _log_abs(q)
        else:
            if abs(wa) > 1 + 1e-9:
                return []
            if exact_w is not None:
                if exact_w.im != 0 or exact_w.re <= 0:
                    return []
                inv = 1 / exact_w.re
                if inv.denominator != 1:
                    return []
                root = _int_root(inv.numerator, self.param)
                return [root] if root is not None else []
            est = abs(wa) ** (-1.0 / self.param)
        if not math.isfinite(est) or est > 1e7:
            return []
        center = int(round(est))
        return [n for n in range(center - 2, center + 3) if n >= self.first_index]

    def contains_term(self, z: ComplexValue, eps: float = 0.0) -> bool:
        if z.exact:
            return any(self.term_present(n) for n in self.raw_indices(z))
        return any(
            self.term_present(n) for n in self._near_indices(z, eps)
        )

    def _near_indices(self, z: ComplexValue, eps: float) -> list[int]:
        out = []
        zc = z.to_complex()
        for w in _solve_map_numeric(self.map, zc):
            for n in self._index_candidates(complex(w)):
                if abs(self.raw_term(n).to_complex() - zc) <= eps:
                    out.append(n)
        return out

    def contains(self, z: ComplexValue, eps: float = 0.0) -> bool:
        if self.include_limit and _same(z, self.limit, eps):
            return True
        return self.contains_term(z, eps)

    def conjugate(self) -> "Family":
        param = self.param.conjugate() if self.kind == "geometric" else self.param
        return Family(
            self.kind,
            param,
            self.map.conjugate(),
            self.include_limit,
            self.skip,
            tuple(e.conjugate() for e in self.excluded),
            self.excluded_segments,
        )

    def real_hull(self) -> Optional[tuple[Fraction, Fraction]]:
        """Interval containing every term, when all terms are real and the map is affine."""
        if not self.map.is_real() or self.map.degree != 1:
            return None
        if self.kind == "geometric":
            q = self.param
            if q.im != 0:
                return None
            wlo, whi = (Fraction(0), Fraction(1)) if q.re > 0 else (q.re, Fraction(1))
        else:
            wlo, whi = Fraction(0), Fraction(1)
        a = self.map.coeff(1).re
        b = self.map.coeff(0).re
        ends = sorted([a * wlo + b, a * whi + b])
        return ends[0], ends[1]

    def describe(self) -> str:
        if self.kind == "geometric":
            base = f"geometric(1,{self.param})"
        else:
            base = f"harmonic(1,{self.param})"
        return f"{format_polynomial(self.map, 'w')} @ {base}"


def rebase(kind: str, param, fmap: Polynomial):
    """Rewrite ``a + c w^k`` over the base ``w`` as ``a + c w'`` over ``w' = w^k``.

    Term indices are unchanged, so skip sets stay valid.
    """
    k = fmap.degree
    if k > 1 and all(fmap.coeff(j).is_zero() for j in range(1, k)):
        param = cv(param) ** k if kind == "geometric" else param * k
        fmap = Polynomial([fmap.coeff(0), fmap.lead()])
    return param, fmap


def geometric(c, q, include_limit: bool = True) -> Family:
    """Family ``c*q**n`` (n >= 0) converging to 0."""
    return Family("geometric", cv(q), Polynomial([0, cv(c)]), include_limit)


def harmonic(c, p: int, include_limit: bool = True) -> Family:
    """Family ``c/n**p`` (n >= 1) converging to 0."""
    return Family("harmonic", int(p), Polynomial([0, cv(c)]), include_limit)


def _same(a: ComplexValue, b: ComplexValue, eps: float) -> bool:
    if a.exact and b.exact:
        return a == b
    return abs(a.to_complex() - b.to_complex()) <= eps


def _log_abs(z: ComplexValue) -> float:
    s = Fraction(z.re) ** 2 + Fraction(z.im) ** 2
    return 0.5 * (math.log(s.numerator) - math.log(s.denominator))


def _int_root(n: int, p: int) -> Optional[int]:
    if n < 1:
        return None
    r = round(n ** (1.0 / p))
    for cand in (r - 1, r, r + 1):
        if cand >= 1 and cand ** p == n:
            return cand
    # large n: integer Newton iteration
    lo, hi = 1, 1 << (n.bit_length() // p + 1)
    while lo <= hi:
        mid = (lo + hi) // 2
        v = mid ** p
        if v == n:
            return mid
        if v < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def _solve_map(p: Polynomial, z: ComplexValue):
    """Solutions w of p(w) = z: exact for affine p, high-precision numeric otherwise."""
    if p.degree == 1:
        return [(z - p.coeff(0)) / p.coeff(1)]
    if p.exact and z.exact:
        coeffs = list(p.coeffs)
        coeffs[0] = coeffs[0] - z
        with mpmath.workdps(60):
            return _mp_roots([_mpc_exact(c) for c in reversed(coeffs)])
    return _solve_map_numeric(p, z.to_complex())


def _mpc_exact(c: ComplexValue):
    re, im = Fraction(c.re), Fraction(c.im)
    return mpmath.mpc(mpmath.mpf(re.numerator) / re.denominator, mpmath.mpf(im.numerator) / im.denominator)


def _mp_roots(mcoeffs) -> list[complex]:
    try:
        roots = mpmath.polyroots(mcoeffs, maxsteps=400, extraprec=200)
    except mpmath.libmp.NoConvergence:
        roots = np.roots([complex(c) for c in mcoeffs])
    return [complex(r) for r in roots]


def _solve_map_numeric(p: Polynomial, z: complex):
    coeffs = [c.to_complex() for c in p.coeffs]
    coeffs[0] -= z
    if p.degree == 1:
        return [-coeffs[0] / coeffs[1]]
    with mpmath.workdps(60):
        return _mp_roots([mpmath.mpc(c.real, c.imag) for c in reversed(coeffs)])


def _seg_merge(segments: Iterable[Segment]) -> list[Segment]:
    segs = sorted(segments)
    out: list[Segment] = []
    for s in segs:
        if out and s.lo <= out[-1].hi:
            if s.hi > out[-1].hi:
                out[-1] = Segment(out[-1].lo, s.hi)
        else:
            out.append(s)
    return out


def _fmt_mult(m) -> str:
    return "inf" if m == INF else str(m)


@dataclass(frozen=True)
class SpectralSet:
    points: tuple = ()
    families: tuple = ()
    segments: tuple = ()

    # construction --------------------------------------------------------
    @classmethod
    def empty(cls) -> "SpectralSet":
        return cls()

    @classmethod
    def of(cls, *values, attained: bool = True) -> "SpectralSet":
        return cls(points=tuple(Point(cv(v), attained) for v in values)).normalized()

    def normalized(self) -> "SpectralSet":
        segments = tuple(_seg_merge(self.segments))
        merged: dict = {}
        order: list = []
        for p in self.points:
            key = p.value
            if key in merged:
                q = merged[key]
                merged[key] = Point(q.value, q.attained or p.attained, q.multiplicity + p.multiplicity)
            else:
                merged[key] = p
                order.append(key)
        families = []
        for f in self.families:
            if f not in families:
                families.append(f)
        points = []
        for key in order:
            p = merged[key]
            if any(s.contains(p.value) for s in segments):
                continue
            if p.value.exact and any(
                f.contains_term(p.value) and not _same(p.value, f.limit, 0.0) for f in families
            ):
                continue
            points.append(p)
        points.sort(key=lambda p: p.value.sort_key())
        families.sort(key=lambda f: (f.limit.sort_key(), f.describe(), f.include_limit))
        return SpectralSet(tuple(points), tuple(families), segments)

    # queries -------------------------------------------------------------
    def is_empty(self) -> bool:
        return not (self.points or self.families or self.segments)

    def is_finite(self) -> bool:
        return not (self.families or self.segments)

    def point_values(self) -> list[ComplexValue]:
        return [p.value for p in self.points]

    def family_limits(self) -> list[ComplexValue]:
        return [f.limit for f in self.families]

    def contains(self, z, tf: ToleranceFrame = DEFAULT_TF) -> Optional[bool]:
        """Membership; ``None`` when an approx value is ambiguous."""
        z = cv(z)
        eps = 0.0 if z.exact and self.all_exact() else tf.eps_set
        if z.exact and self.all_exact():
            return (
                any(p.value == z for p in self.points)
                or any(s.contains(z) for s in self.segments)
                or any(f.contains(z) for f in self.families)
            )
        candidates = [p.value for p in self.points if _same(z, p.value, eps)]
        distinct = []
        for c in candidates:
            if not any(_same(c, d, 0.0) for d in distinct):
                distinct.append(c)
        if len(distinct) > 1:
            return None
        if distinct:
            return True
        if any(s.contains(z, eps) for s in self.segments):
            return True
        if any(f.contains(z, eps) for f in self.families):
            return True
        return False

    def all_exact(self) -> bool:
        return all(p.value.exact for p in self.points)

    def is_real(self) -> bool:
        return (
            all(p.value.im == 0 for p in self.points)
            and all(_family_is_real(f) for f in self.families)
        )

    def with_excluded(self, values: Iterable[ComplexValue]) -> "SpectralSet":
        """Remove finitely many values from the set."""
        values = [cv(v) for v in values]
        if not values:
            return self
        points = tuple(p for p in self.points if not any(_same(p.value, v, 0.0) for v in values))
        families = []
        for f in self.families:
            drop_limit = any(v == f.limit for v in values)
            families.append(
                replace(
                    f,
                    include_limit=f.include_limit and not drop_limit,
                    excluded=f.excluded + tuple(v for v in values if v not in f.excluded),
                )
            )
        if any(s.contains(v) for s in self.segments for v in values):
            raise UnsupportedImage("removing a point from a segment leaves the representable class")
        return SpectralSet(points, tuple(families), self.segments)

    def __str__(self):
        return format_set(self)


def _family_is_real(f: Family) -> bool:
    if not f.map.is_real():
        return False
    return f.kind == "harmonic" or f.param.im == 0


def format_set(s: SpectralSet) -> str:
    parts = [str(p.value) for p in s.points]
    for f in s.families:
        tail = f" -> {f.limit}" if f.include_limit else f" (limit {f.limit} omitted)"
        parts.append(f"seq {f.describe()}{tail}")
    parts.extend(f"dense {seg}" for seg in s.segments)
    return "{" + ", ".join(parts) + "}"


# ---------------------------------------------------------------------------
# point-set operations


def union(*sets: SpectralSet) -> SpectralSet:
    return SpectralSet(
        tuple(p for s in sets for p in s.points),
        tuple(f for s in sets for f in s.families),
        tuple(g for s in sets for g in s.segments),
    ).normalized()


def iso_points(S: SpectralSet) -> SpectralSet:
    """Points of ``S`` at positive distance from the rest of ``S``."""
    limits = S.family_limits()
    points = tuple(
        p
        for p in S.points
        if not any(_same(p.value, L, 0.0) for L in limits)
        and not any(seg.contains(p.value) for seg in S.segments)
    )
    families = []
    for f in S.families:
        extra = tuple(L for L in limits if L not in f.excluded)
        families.append(
            replace(
                f,
                include_limit=False,
                excluded=f.excluded + extra,
                excluded_segments=f.excluded_segments
                + tuple(g for g in S.segments if g not in f.excluded_segments),
            )
        )
    return SpectralSet(points, tuple(families), ())


def acc_set(S: SpectralSet) -> SpectralSet:
    """``S`` minus its isolated points: family limits lying in ``S`` and segments."""
    points = []
    for f in S.families:
        L = f.limit
        if any(seg.contains(L) for seg in S.segments):
            continue
        if not S.contains(L):
            continue
        attained = any(p.attained and _same(p.value, L, 0.0) for p in S.points)
        mult = next((p.multiplicity for p in S.points if _same(p.value, L, 0.0)), 0)
        points.append(Point(L, attained, mult))
    return SpectralSet(tuple(points), (), S.segments).normalized()


def is_countable(S: SpectralSet) -> bool:
    return not S.segments


def boundary(S: SpectralSet) -> SpectralSet:
    """Topological boundary; every representable set has empty interior."""
    return S


def conjugate_set(S: SpectralSet) -> SpectralSet:
    return SpectralSet(
        tuple(p.conjugate() for p in S.points),
        tuple(f.conjugate() for f in S.families),
        S.segments,
    ).normalized()


# ---------------------------------------------------------------------------
# polynomial images


def segment_image(seg: Segment, p: Polynomial) -> tuple[Fraction, Fraction]:
    """Exact image interval of a real segment under a real polynomial."""
    if not p.is_real() or not p.exact:
        raise UnsupportedImage("image of a segment under a non-real polynomial is a curve")
    lo, hi = seg.lo, seg.hi
    candidates = [lo, hi]
    dp = Polynomial([c for c in p.derivative().coeffs])
    for r in _real_critical_points(dp, lo, hi):
        candidates.append(r)
    values = [p(cv(x)).re for x in candidates]
    return min(values), max(values)


def _real_critical_points(dp: Polynomial, lo: Fraction, hi: Fraction) -> list[Fraction]:
    if dp.degree <= 0:
        return []
    coeffs = [c.re for c in dp.coeffs]
    if dp.degree == 1:
        r = -coeffs[0] / coeffs[1]
        return [r] if lo < r < hi else []
    if dp.degree == 2:
        c0, c1, c2 = coeffs
        disc = c1 * c1 - 4 * c2 * c0
        if disc < 0:
            return []
        root = _frac_sqrt(disc)
        if root is None:
            fl = math.sqrt(float(disc))
            approx = [(-float(c1) + s * fl) / (2 * float(c2)) for s in (1, -1)]
            if any(float(lo) - 1e-12 <= r <= float(hi) + 1e-12 for r in approx):
                raise UnsupportedImage("irrational critical point inside a segment")
            return []
        rs = [(-c1 + root) / (2 * c2), (-c1 - root) / (2 * c2)]
        return [r for r in rs if lo < r < hi]
    raise UnsupportedImage("segment images are supported for polynomials of degree <= 3")


def _frac_sqrt(x: Fraction) -> Optional[Fraction]:
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def image(S: SpectralSet, p: Polynomial) -> SpectralSet:
    """``p(S)`` for a closed set without exclusions."""
    if p.is_constant():
        return SpectralSet.of(p.coeff(0)) if not S.is_empty() else SpectralSet()
    points = [Point(p(pt.value), pt.attained, pt.multiplicity) for pt in S.points]
    families = []
    for f in S.families:
        if f.excluded or f.excluded_segments:
            raise UnsupportedImage("image of a family with excluded values")
        families.append(replace(f, map=p.compose(f.map)))
    segments = []
    for seg in S.segments:
        lo, hi = segment_image(seg, p)
        if lo == hi:
            points.append(Point(cv(lo), True, INF))
        else:
            segments.append(Segment(lo, hi))
    return SpectralSet(tuple(points), tuple(families), tuple(segments)).normalized()


# ---------------------------------------------------------------------------
# relations

_ENUM_TERMS = 100


def _covered_by_segments(seg: Segment, segments: Iterable[Segment]) -> bool:
    return any(g.lo <= seg.lo and seg.hi <= g.hi for g in _seg_merge(segments))


def _scale_between(f: Family, g: Family) -> Optional[ComplexValue]:
    """Scalar c with ``f.map(x) == g.map(c x)``, when one is found."""
    F, G = f.map, g.map
    if F.degree != G.degree or G.coeff(1).is_zero():
        return None
    c = F.coeff(1) / G.coeff(1)
    return c if G.compose(Polynomial([0, c])) == F else None


def _positive_int_power(x: ComplexValue, p: int) -> Optional[int]:
    """Return m >= 1 with m**p == x, if x is such a power of a positive integer."""
    if not x.exact or x.im != 0 or x.re <= 0 or x.re.denominator != 1:
        return None
    return _int_root(x.re.numerator, p)


def _sequence_inside(f: Family, g: Family) -> bool:
    """True when every raw term of ``f`` is a raw term of ``g`` (proved, not sampled)."""
    if f.same_sequence(g):
        return True
    # f = G(c w_n) and g = G(v_m): enough that every c w_n is some v_m
    cf, cg = _scale_between(f, g), ONE
    if cf is None:
        return False
    if f.kind == "geometric" and g.kind == "geometric":
        # c q^n = d s^m  for all n: need q = s^k (k >= 1) and c = d s^j (j >= 0)
        q, s = f.param, g.param
        k = _power_exponent(s, q, minimum=1)
        j = _power_exponent(s, cf / cg, minimum=0)
        return k is not None and j is not None
    if f.kind == "harmonic" and g.kind == "harmonic":
        # c/n^p = d/m^r: need r | p and d/c a perfect r-th power of a positive integer
        if f.param % g.param:
            return False
        return _positive_int_power(cg / cf, g.param) is not None
    if f.kind == "geometric" and g.kind == "harmonic":
        # c q^n = d/m^r: need 1/q = s^r and d/c = m0^r with positive integers s, m0
        q = f.param
        return (
            _positive_int_power(ONE / q, g.param) is not None
            and _positive_int_power(cg / cf, g.param) is not None
        )
    return False


def _power_exponent(s: ComplexValue, x: ComplexValue, minimum: int) -> Optional[int]:
    """Least k >= minimum with s**k == x, else None (|s| < 1)."""
    if x.is_zero():
        return None
    target = x.abs2()
    k = minimum
    val = s ** k
    while val.abs2() >= target:
        if val == x:
            return k
        k += 1
        val = val * s
        if k > 4096:
            return None
    return None


def _family_inside(f: Family, S: SpectralSet, tf: ToleranceFrame,
                   ignore: tuple = ()) -> Optional[bool]:
    """Are all present terms of ``f`` (minus ``ignore``) inside ``S``?"""

    def covered(v: ComplexValue) -> Optional[bool]:
        if any(v == g for g in ignore):
            return True
        return S.contains(v, tf)

    hull = f.real_hull()
    if hull is not None:
        if any(g.lo <= hull[0] and hull[1] <= g.hi for g in _seg_merge(S.segments)):
            return True
    for g in S.families:
        if _family_covers(g, f, covered, S.segments):
            return True
    # no structural proof: look for a definite counterexample among the first terms
    for n, t in f.terms(_ENUM_TERMS):
        if f.term_present(n) and covered(t) is False:
            return False
    return None


def _family_covers(g: Family, f: Family, covered, segments) -> bool:
    """Proof that every present term of ``f`` is a present term of ``g`` or covered."""
    if not _sequence_inside(f.plain(), g.plain()):
        return False
    # every raw term of f is a raw term of g; check what g drops
    dropped_values = [g.raw_term(n) for n in g.skip] + list(g.excluded)
    for v in dropped_values:
        if f.contains_term(v) and covered(v) is not True:
            return False
    return all(seg in f.excluded_segments or seg in segments for seg in g.excluded_segments)


def includes(big: SpectralSet, small: SpectralSet, tf: ToleranceFrame = DEFAULT_TF,
             ignore: tuple = ()) -> Optional[bool]:
    """Three-valued test of ``small`` (minus ``ignore``) being a subset of ``big``."""
    ignore = tuple(cv(v) for v in ignore)
    unknown = False
    for p in small.points:
        if any(_same(p.value, g, 0.0) for g in ignore):
            continue
        r = big.contains(p.value, tf)
        if r is False:
            return False
        if r is None:
            unknown = True
    for seg in small.segments:
        if not _covered_by_segments(seg, big.segments):
            return False
    for f in small.families:
        if f.include_limit and not any(f.limit == g for g in ignore):
            r = big.contains(f.limit, tf)
            if r is False:
                return False
            if r is None:
                unknown = True
        r = _family_inside(f, big, tf, ignore)
        if r is False:
            return False
        if r is None:
            unknown = True
    return None if unknown else True


def set_relation(S1: SpectralSet, S2: SpectralSet, tf: ToleranceFrame = DEFAULT_TF) -> str:
    """One of ``equal``, ``subset``, ``superset``, ``incomparable``."""
    a = includes(S2, S1, tf)
    b = includes(S1, S2, tf)
    if a is True and b is True:
        return "equal"
    if a is True and b is False:
        return "subset"
    if b is True and a is False:
        return "superset"
    return "incomparable"


def disjoint(S1: SpectralSet, S2: SpectralSet, tf: ToleranceFrame = DEFAULT_TF) -> Optional[bool]:
    """Three-valued emptiness of the intersection."""
    unknown = False
    for p in S1.points:
        r = S2.contains(p.value, tf)
        if r:
            return False
        if r is None:
            unknown = True
    for f in S1.families:
        if f.include_limit:
            r = S2.contains(f.limit, tf)
            if r:
                return False
            if r is None:
                unknown = True
    for seg in S1.segments:
        for g in S2.segments:
            if seg.lo <= g.hi and g.lo <= seg.hi:
                return False
    # remaining: terms of S1 families against S2, and S2 families against S1
    for f in S1.families:
        for p in S2.points:
            if f.contains_term(p.value):
                return False
        for g in S2.families:
            if g.include_limit and f.contains_term(g.limit):
                return False
        for seg in S2.segments:
            if seg in f.excluded_segments:
                continue
            if any(f.term_present(n) and seg.contains(t) for n, t in f.terms(_ENUM_TERMS)):
                return False
            unknown = True
        for g in S2.families:
            shared = _shared_term(f, g)
            if shared is True:
                return False
            if shared is None:
                unknown = True
    for g in S2.families:
        for seg in S1.segments:
            if seg in g.excluded_segments:
                continue
            if any(g.term_present(n) and seg.contains(t) for n, t in g.terms(_ENUM_TERMS)):
                return False
            unknown = True
    return None if unknown else True


def _shared_term(f: Family, g: Family) -> Optional[bool]:
    for n, t in f.terms(_ENUM_TERMS):
        if f.term_present(n) and g.contains_term(t):
            return True
    f_terms_distinct_from_g_limit = not f.contains_term(g.limit)
    if f_terms_distinct_from_g_limit and not g.contains_term(f.limit) and f.limit != g.limit:
        # both tails are confined near different limits: only finitely many
        # terms of each can be near the other; those were enumerated above
        # provided the enumeration reached inside the separation radius
        sep = abs(f.limit.to_complex() - g.limit.to_complex()) / 3
        if _tail_radius(f, _ENUM_TERMS) < sep and _tail_radius(g, _ENUM_TERMS) < sep:
            for n, t in g.terms(_ENUM_TERMS):
                if g.term_present(n) and f.contains_term(t):
                    return True
            return False
    return None


def _tail_radius(f: Family, n: int) -> float:
    """Upper bound for |term_k - limit| over k >= n."""
    w = abs(f.base(n).to_complex())
    coeffs = [abs(c.to_complex()) for c in f.map.coeffs]
    return sum(c * w ** k for k, c in enumerate(coeffs) if k > 0)


# ---------------------------------------------------------------------------
# pole sets


@dataclass(frozen=True)
class PoleSet:
    """Poles of the resolvent with their orders.

    Finitely many poles carry explicit orders; family terms are poles of
    order one unless the same point also appears in ``finite``.
    """

    finite: tuple = ()  # ((ComplexValue, order), ...)
    families: tuple = ()

    def normalized(self) -> "PoleSet":
        orders: dict = {}
        for z, k in self.finite:
            orders[z] = max(orders.get(z, 0), k)
        finite = tuple(sorted(orders.items(), key=lambda zk: zk[0].sort_key()))
        fams = []
        for f in self.families:
            if f not in fams:
                fams.append(f)
        fams.sort(key=lambda f: (f.limit.sort_key(), f.describe()))
        return PoleSet(finite, tuple(fams))

    def as_set(self) -> SpectralSet:
        return SpectralSet(
            tuple(Point(z, True, 1) for z, _ in self.finite), self.families, ()
        )

    def order(self, z) -> Optional[int]:
        z = cv(z)
        best = None
        for w, k in self.finite:
            if _same(w, z, 0.0):
                best = k if best is None else max(best, k)
        if best is None and any(f.contains_term(z) for f in self.families):
            best = 1
        return best

    def is_empty(self) -> bool:
        return not self.finite and not self.families

    def is_finite(self) -> bool:
        return not self.families

    def without(self, *values) -> "PoleSet":
        values = [cv(v) for v in values]
        finite = tuple((z, k) for z, k in self.finite if not any(z == v for v in values))
        families = tuple(
            replace(f, excluded=f.excluded + tuple(v for v in values if v not in f.excluded))
            for f in self.families
        )
        return PoleSet(finite, families)

    def conjugate(self) -> "PoleSet":
        return PoleSet(
            tuple((z.conjugate(), k) for z, k in self.finite),
            tuple(f.conjugate() for f in self.families),
        ).normalized()

    def items(self):
        return list(self.finite)

    def __str__(self):
        parts = [f"{z} (order {k})" for z, k in self.finite]
        parts += [f"seq {f.describe()} (order 1)" for f in self.families]
        return "{" + ", ".join(parts) + "}"


def pole_relation(P1: PoleSet, P2: PoleSet, tf: ToleranceFrame = DEFAULT_TF) -> bool:
    """Equal as point sets with matching orders at every finite pole."""
    if set_relation(P1.as_set(), P2.as_set(), tf) != "equal":
        return False
    for z, k in P1.finite:
        if P2.order(z) != k:
            return False
    for z, k in P2.finite:
        if P1.order(z) != k:
            return False
    return True
