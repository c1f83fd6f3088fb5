from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from opspec.scalars import I, ONE, ZERO, ComplexValue, Polynomial, ToleranceFrame, cv

fractions = st.builds(Fraction, st.integers(-40, 40), st.integers(1, 12))
gaussians = st.builds(ComplexValue, fractions, fractions)


def to_sympy(z: ComplexValue):
    return sympy.Rational(z.re.numerator, z.re.denominator) + sympy.I * sympy.Rational(z.im.numerator, z.im.denominator)


@given(gaussians, gaussians)
def test_field_operations_match_sympy(a, b):
    assert to_sympy(a + b) == sympy.expand(to_sympy(a) + to_sympy(b))
    assert to_sympy(a * b) == sympy.expand(to_sympy(a) * to_sympy(b))
    if not b.is_zero():
        assert sympy.expand(to_sympy(a / b) * to_sympy(b)) == to_sympy(a)


@given(gaussians)
def test_parse_round_trips_str(z):
    assert ComplexValue.parse(str(z)) == z


def test_parse_forms():
    assert cv("1/2") == ComplexValue(Fraction(1, 2))
    assert cv("1/2-3/4i") == ComplexValue(Fraction(1, 2), Fraction(-3, 4))
    assert cv("i") == I
    assert not cv("0.5").exact


def test_mode_propagates_to_approx():
    z = cv(1) + ComplexValue.approx(0.5)
    assert z.mode == "approx" and z == cv(Fraction(3, 2))
    assert (ONE / 3).exact


def test_immutable_and_hashable():
    z = cv(2)
    with pytest.raises(AttributeError):
        z.re = 3
    assert {z, cv(2), ZERO} == {cv(2), ZERO}


def test_approx_rejects_non_finite():
    with pytest.raises(ValueError):
        ComplexValue.approx(float("inf"))


def test_tolerance_frame_validation():
    with pytest.raises(ValueError):
        ToleranceFrame(eps_rank=0)
    with pytest.raises(ValueError):
        ToleranceFrame(eps_cluster=1e-6, eps_set=1e-8)
    assert ToleranceFrame.uniform(1e-5).eps_set == 1e-5


polys = st.lists(gaussians, min_size=1, max_size=4).map(Polynomial)


@given(polys, polys, gaussians)
def test_polynomial_algebra_matches_sympy(p, q, z):
    x = sympy.Symbol("x")

    def sp(poly):
        return sum(to_sympy(c) * x**k for k, c in enumerate(poly.coeffs))

    assert sympy.expand(sp(p * q) - sp(p) * sp(q)) == 0
    assert sympy.expand(sp(p.compose(q)) - sympy.sympify(sp(p)).subs(x, sp(q))) == 0
    assert to_sympy(p(z)) == sympy.expand(sympy.sympify(sp(p)).subs(x, to_sympy(z)))


@given(polys, polys)
def test_divmod_identity(p, q):
    if q.is_zero():
        return
    quo, rem = p.divmod(q)
    assert quo * q + rem == p
    assert rem.is_zero() or rem.degree < q.degree


def test_multiplicity_and_gcd():
    x = Polynomial.x()
    p = x**3 * (x - 2)
    assert p.multiplicity(0) == 3 and p.multiplicity(2) == 1 and p.multiplicity(1) == 0
    assert p.gcd(x**2 * (x - 1)) == x**2


@given(polys)
def test_polynomial_str_reparses(p):
    from opspec.dsl import parse

    prog = parse(f"let A = poly(diag {{ 0: inf }}, {p});") if not p.is_zero() else None
    if prog is not None:
        assert prog.statements[0].expr.args[1] == p
