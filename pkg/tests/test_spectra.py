from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from opspec.scalars import I, Polynomial, cv
from opspec.spectra import (
    Family,
    Point,
    Segment,
    SpectralSet,
    acc_set,
    conjugate_set,
    disjoint,
    geometric,
    harmonic,
    image,
    includes,
    is_countable,
    iso_points,
    set_relation,
    union,
)

x = Polynomial.x()


def fam(f: Family) -> SpectralSet:
    return SpectralSet(families=(f,)).normalized()


def seg(lo, hi) -> SpectralSet:
    return SpectralSet(segments=(Segment(lo, hi),))


# iso_points


def test_iso_of_family_with_attained_limit():
    S = union(SpectralSet.of(0), fam(geometric(1, Fraction(1, 2))))
    iso = iso_points(S)
    for k in range(6):
        assert iso.contains(cv(Fraction(1, 2**k))) is True
    assert iso.contains(0) is False


def test_iso_of_st_spectrum():
    assert set_relation(iso_points(SpectralSet.of(0, 1)), SpectralSet.of(0, 1)) == "equal"


def test_iso_of_segment_plus_point():
    S = union(seg(0, 1), SpectralSet.of(2))
    assert set_relation(iso_points(S), SpectralSet.of(2)) == "equal"


def test_iso_excludes_points_on_segments_and_limits():
    S = union(seg(0, 1), SpectralSet.of(Fraction(1, 2), 0), fam(harmonic(1, 1)))
    assert iso_points(S).contains(Fraction(1, 2)) is False
    assert iso_points(S).contains(0) is False


# acc_set


def test_acc_examples():
    S = union(fam(harmonic(1, 1)), SpectralSet.of(0))
    assert set_relation(acc_set(S), SpectralSet.of(0)) == "equal"
    assert acc_set(SpectralSet.of(1, 2, 3)).is_empty()
    assert set_relation(acc_set(seg(0, 1)), seg(0, 1)) == "equal"


def test_acc_of_limit_inside_segment_is_the_segment():
    S = union(seg(-1, 1), fam(harmonic(1, 1)))
    assert set_relation(acc_set(S), seg(-1, 1)) == "equal"


# is_countable


def test_countability_examples():
    assert is_countable(SpectralSet.of(1, 2))
    assert is_countable(fam(harmonic(1, 1)))
    assert not is_countable(seg(0, 1))


# set_relation


def test_relation_examples():
    assert set_relation(SpectralSet.of(0, 1), SpectralSet.of(1, 0)) == "equal"
    assert set_relation(SpectralSet.of(0), SpectralSet.of(0, 1)) == "subset"
    assert set_relation(SpectralSet.of(0, 1), SpectralSet.of(0)) == "superset"
    assert set_relation(SpectralSet.of(2), SpectralSet.of(0, 1)) == "incomparable"


def test_geometric_halves_sit_inside_harmonic():
    # Every 2^-k equals 1/n with n = 2^k, so the geometric set is a proper subset.
    G = union(fam(geometric(1, Fraction(1, 2))), SpectralSet.of(0))
    H = union(fam(harmonic(1, 1)), SpectralSet.of(0))
    for k in range(40):
        assert sympy.Rational(1, 2**k) == 1 / sympy.Integer(2**k)
        assert H.contains(cv(Fraction(1, 2**k))) is True
    assert G.contains(cv(Fraction(1, 3))) is False
    assert set_relation(G, H) == "subset"


def test_relation_of_mapped_families():
    # 1 + 1/n^2 is a subsequence of 1 + 1/n
    A = fam(Family("harmonic", 2, Polynomial([1, 1])))
    B = fam(Family("harmonic", 1, Polynomial([1, 1])))
    assert set_relation(A, B) == "subset"


def test_relation_segment_covering():
    assert set_relation(seg(0, 1), union(seg(0, Fraction(1, 2)), seg(Fraction(1, 2), 2))) == "subset"
    assert set_relation(union(SpectralSet.of(Fraction(1, 3)), fam(harmonic(1, 1))), union(seg(0, 1))) == "subset"


def test_approx_points_use_eps_set():
    a = SpectralSet.of(cv(1.0 + 1e-12))
    assert set_relation(a, SpectralSet.of(1)) == "equal"
    assert set_relation(SpectralSet.of(cv(1.1)), SpectralSet.of(1)) == "incomparable"


# conjugate_set


def test_conjugate_examples():
    assert set_relation(conjugate_set(SpectralSet.of(I)), SpectralSet.of(-I)) == "equal"
    assert set_relation(conjugate_set(seg(0, 1)), seg(0, 1)) == "equal"
    g = fam(geometric(I, Fraction(1, 2)))
    assert set_relation(conjugate_set(g), fam(geometric(-I, Fraction(1, 2)))) == "equal"


def test_conjugate_of_complex_ratio_family():
    g = fam(geometric(1, cv("1/2+1/2i")))
    c = conjugate_set(g)
    for k in range(8):
        assert c.contains(cv("1/2-1/2i") ** k) is True
    assert set_relation(conjugate_set(c), g) == "equal"


gaussian = st.builds(
    lambda a, b, c, d: cv(Fraction(a, c)) + I * Fraction(b, d),
    st.integers(-6, 6), st.integers(-6, 6), st.integers(1, 4), st.integers(1, 4),
)
point_sets = st.lists(gaussian, max_size=4).map(lambda vs: SpectralSet.of(*vs))


@given(point_sets)
def test_conjugation_is_involutive(S):
    assert set_relation(conjugate_set(conjugate_set(S)), S) == "equal"


@given(point_sets, point_sets)
def test_relation_antisymmetry(A, B):
    r, s = set_relation(A, B), set_relation(B, A)
    flip = {"equal": "equal", "subset": "superset", "superset": "subset", "incomparable": "incomparable"}
    assert s == flip[r]
    if r == "equal":
        assert includes(A, B) and includes(B, A)


@given(point_sets, point_sets)
def test_relation_on_finite_sets_matches_python_sets(A, B):
    a, b = set(A.point_values()), set(B.point_values())
    want = "equal" if a == b else "subset" if a < b else "superset" if a > b else "incomparable"
    assert set_relation(A, B) == want
    assert disjoint(A, B) == (not (a & b))


# image


def test_image_of_family_and_segment():
    S = union(fam(harmonic(1, 1)), SpectralSet.of(0), seg(-1, 2))
    T = image(S, x**2)
    assert set_relation(T, union(fam(harmonic(1, 2)), SpectralSet.of(0), seg(0, 4))) == "equal"


def test_image_of_segment_at_interior_critical_point():
    T = image(seg(-1, 1), Polynomial([0, -3, 0, 1]))  # x^3 - 3x peaks at x = -1, dips at x = 1
    assert set_relation(T, seg(-2, 2)) == "equal"


# validation


def test_family_validation():
    with pytest.raises(ValueError):
        geometric(1, 1)
    with pytest.raises(ValueError):
        harmonic(1, 0)
    with pytest.raises(ValueError):
        Family("harmonic", 1, Polynomial([3]))
    with pytest.raises(ValueError):
        Segment(1, 1)


def test_normalization_merges_duplicate_points():
    S = SpectralSet((Point(cv(1)), Point(cv(1)), Point(cv(2))))
    assert len(S.normalized().points) == 2
