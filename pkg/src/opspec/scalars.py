"""Scalars, tolerance frames and polynomials.

A :class:`ComplexValue` is either *exact* (a Gaussian rational, both parts
:class:`fractions.Fraction`) or *approx* (both parts finite floats).  Mixing
the two modes in arithmetic yields an approx value.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "ComplexValue",
    "ToleranceFrame",
    "Polynomial",
    "cv",
    "ZERO",
    "ONE",
    "I",
    "modulus_bounds",
]


class ComplexValue:
    """Immutable complex scalar in exact or approx mode."""

    __slots__ = ("re", "im", "exact")

    def __init__(self, re_part=0, im_part=0, exact=None):
        if exact is None:
            exact = not (isinstance(re_part, float) or isinstance(im_part, float))
        if exact:
            re_part = Fraction(re_part)
            im_part = Fraction(im_part)
        else:
            re_part = float(re_part)
            im_part = float(im_part)
            if not (math.isfinite(re_part) and math.isfinite(im_part)):
                raise ValueError("approx ComplexValue must be finite")
        object.__setattr__(self, "re", re_part)
        object.__setattr__(self, "im", im_part)
        object.__setattr__(self, "exact", exact)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexValue is immutable")

    def __reduce__(self):
        return (ComplexValue, (self.re, self.im, self.exact))

    # construction helpers -------------------------------------------------
    @classmethod
    def approx(cls, re_part, im_part=0.0) -> "ComplexValue":
        return cls(float(re_part), float(im_part), exact=False)

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexValue":
        return cls(z.real, z.imag, exact=False)

    @classmethod
    def parse(cls, text: str) -> "ComplexValue":
        """Parse ``p/q``, ``p/q+r/si``, ``r/si`` or a decimal form."""
        return _parse_complex(text)

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "approx"

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, ComplexValue):
            return other
        return cv(other)

    def __add__(self, other):
        other = self._coerce(other)
        return ComplexValue(self.re + other.re, self.im + other.im, self.exact and other.exact)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return ComplexValue(self.re - other.re, self.im - other.im, self.exact and other.exact)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return ComplexValue(-self.re, -self.im, self.exact)

    def __mul__(self, other):
        other = self._coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return ComplexValue(a * c - b * d, a * d + b * c, self.exact and other.exact)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        den = c * c + d * d
        if den == 0:
            raise ZeroDivisionError("division by zero ComplexValue")
        return ComplexValue((a * c + b * d) / den, (b * c - a * d) / den, self.exact and other.exact)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k < 0:
            return ONE / (self ** -k)
        result = ONE if self.exact else ComplexValue.approx(1.0)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "ComplexValue":
        return ComplexValue(self.re, -self.im, self.exact)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.hypot(float(self.re), float(self.im))

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def to_approx(self) -> "ComplexValue":
        return self if not self.exact else ComplexValue.approx(self.re, self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def sort_key(self):
        return (self.re, self.im)

    # comparison --------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, float, complex)):
            other = cv(other)
        if not isinstance(other, ComplexValue):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"ComplexValue({self})"

    def __str__(self):
        if not self.exact:
            re_s = format(self.re, ".17g")
            if self.im == 0:
                return re_s
            sign = "-" if self.im < 0 else "+"
            return f"{re_s}{sign}{format(abs(self.im), '.17g')}i"
        re_s = _fmt_fraction(self.re)
        if self.im == 0:
            return re_s
        sign = "-" if self.im < 0 else "+"
        return f"{re_s}{sign}{_fmt_fraction(abs(self.im))}i"


def _fmt_fraction(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


_NUM = r"(?:\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
_RAT = rf"{_NUM}(?:/\d+)?"
_COMPLEX_RE = re.compile(
    rf"^\s*(?P<re>[+-]?{_RAT})?\s*(?:(?P<sign>[+-])?\s*(?P<im>{_RAT})?\s*i)?\s*$"
)


def _parse_rational(text: str):
    if "/" in text:
        num, den = text.split("/")
        if any(ch in num for ch in ".eE"):
            return float(num) / float(den)
        return Fraction(int(num), int(den))
    if any(ch in text for ch in ".eE"):
        return float(text)
    return Fraction(int(text))


def _parse_complex(text: str) -> ComplexValue:
    m = _COMPLEX_RE.match(text)
    if not m or (m.group("re") is None and "i" not in text):
        raise ValueError(f"cannot parse complex value {text!r}")
    re_part = _parse_rational(m.group("re")) if m.group("re") else Fraction(0)
    im_part = Fraction(0)
    if "i" in text:
        im_txt = m.group("im")
        im_part = _parse_rational(im_txt) if im_txt else Fraction(1)
        sign = m.group("sign")
        if sign is None and m.group("re") is not None:
            # "3i" was swallowed by the real group
            im_part, re_part = re_part, Fraction(0)
        if sign == "-":
            im_part = -im_part
    exact = not (isinstance(re_part, float) or isinstance(im_part, float))
    return ComplexValue(re_part, im_part, exact)


def cv(x) -> ComplexValue:
    """Coerce ints, Fractions, floats, complex numbers and strings."""
    if isinstance(x, ComplexValue):
        return x
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, (int, Fraction)):
        return ComplexValue(x, 0, True)
    if isinstance(x, float):
        return ComplexValue(x, 0.0, False)
    if isinstance(x, complex):
        return ComplexValue(x.real, x.imag, False)
    if isinstance(x, str):
        return _parse_complex(x)
    if hasattr(x, "real") and hasattr(x, "imag"):
        return ComplexValue(float(x.real), float(x.imag), False)
    raise TypeError(f"cannot convert {type(x).__name__} to ComplexValue")


ZERO = ComplexValue(0, 0, True)
ONE = ComplexValue(1, 0, True)
I = ComplexValue(0, 1, True)

_SQRT_SCALE = 1 << 48


def modulus_bounds(z: ComplexValue) -> tuple[Fraction, Fraction]:
    """Rational lower and upper bounds on ``|z|`` (tight to about 2**-48)."""
    s = Fraction(z.re) ** 2 + Fraction(z.im) ** 2
    if s == 0:
        return Fraction(0), Fraction(0)
    scaled = s * _SQRT_SCALE * _SQRT_SCALE
    lo = math.isqrt(scaled.numerator // scaled.denominator)
    return Fraction(lo, _SQRT_SCALE), Fraction(lo + 1, _SQRT_SCALE)


@dataclass(frozen=True)
class ToleranceFrame:
    """Thresholds for every floating-point decision.

    ``eps_rank`` is relative to the largest singular value, ``eps_cluster``
    is the eigenvalue merging radius and ``eps_set`` the radius for set
    equality.  ``eps_set`` must not be smaller than ``eps_cluster``.
    """

    eps_rank: float = 1e-9
    eps_cluster: float = 1e-7
    eps_set: float = 1e-7

    def __post_init__(self):
        for name in ("eps_rank", "eps_cluster", "eps_set"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite float")
        if self.eps_set < self.eps_cluster:
            raise ValueError("eps_set must be >= eps_cluster")

    @classmethod
    def uniform(cls, tol: float) -> "ToleranceFrame":
        return cls(eps_rank=tol, eps_cluster=tol, eps_set=tol)


DEFAULT_TF = ToleranceFrame()


class Polynomial:
    """Polynomial with ComplexValue coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [cv(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    def __reduce__(self):
        return (Polynomial, (self.coeffs,))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls([0, 1])

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls([c])

    @classmethod
    def from_roots(cls, roots: Sequence[tuple]) -> "Polynomial":
        """Build prod (x - r)**m from ``(r, m)`` pairs."""
        p = cls([1])
        for r, m in roots:
            factor = cls([-cv(r), 1])
            for _ in range(m):
                p = p * factor
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def exact(self) -> bool:
        return all(c.exact for c in self.coeffs)

    def lead(self) -> ComplexValue:
        return self.coeffs[-1] if self.coeffs else ZERO

    def coeff(self, k: int) -> ComplexValue:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.coeffs)

    def __call__(self, z):
        z = cv(z)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.coeff(k) + other.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = Polynomial([1])
        for _ in range(k):
            result = result * self
        return result

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """Return ``self(inner(x))``."""
        acc = Polynomial()
        for c in reversed(self.coeffs):
            acc = acc * inner + Polynomial([c])
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial(c * k for k, c in enumerate(self.coeffs) if k > 0)

    def conjugate(self) -> "Polynomial":
        return Polynomial(c.conjugate() for c in self.coeffs)

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lead = self.lead()
        return Polynomial(c / lead for c in self.coeffs)

    def divmod(self, divisor: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = divisor.degree
        lead = divisor.lead()
        quot = [ZERO] * max(len(rem) - dd, 0)
        for k in range(len(rem) - 1, dd - 1, -1):
            coef = rem[k] / lead
            quot[k - dd] = coef
            if coef.is_zero():
                continue
            for j, d in enumerate(divisor.coeffs):
                rem[k - dd + j] = rem[k - dd + j] - coef * d
        return Polynomial(quot), Polynomial(rem[:dd])

    def gcd(self, other: "Polynomial") -> "Polynomial":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def taylor(self, center) -> "Polynomial":
        """Coefficients of ``self`` expanded around ``center``."""
        return self.compose(Polynomial([cv(center), 1]))

    def multiplicity(self, root) -> int:
        """Order of vanishing at ``root`` (exact coefficients only)."""
        if self.is_zero():
            raise ValueError("zero polynomial vanishes to infinite order")
        factor = Polynomial([-cv(root), 1])
        p, m = self, 0
        while True:
            q, r = p.divmod(factor)
            if not r.is_zero():
                return m
            p, m = q, m + 1

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        return format_polynomial(self)


def _as_poly(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial([x])


def format_polynomial(p: Polynomial, var: str = "x") -> str:
    """Render in the DSL polynomial syntax, highest degree first."""
    if p.is_zero():
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if c.is_zero():
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        negative = c.im == 0 and c.re < 0
        mag = -c if negative else c
        if mag.im != 0:
            body = f"({mag}){mono}"
        elif k == 0:
            body = str(mag)
        elif mag == ONE:
            body = mono
        else:
            body = f"{mag}{mono}"
        if not parts:
            parts.append(("-" if negative else "") + body)
        else:
            parts.append((" - " if negative else " + ") + body)
    return "".join(parts)
