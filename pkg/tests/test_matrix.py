from fractions import Fraction

import numpy as np
import pytest
import sympy

from opspec.errors import IrrationalSpectrum
from opspec.harness import gen_presentation, trial_rng
from opspec.matrix import (
    GaussianMatrix,
    JordanPresentation,
    ascent_descent,
    block_diag,
    drazin_axioms_exact,
    drazin_inverse,
    drazin_residuals,
    eigen_clusters,
    eval_polynomial,
    jordan_block,
    matrix_poles,
    minimal_polynomial,
    rank,
)
from opspec.scalars import I, Polynomial, cv

x = Polynomial.x()


def to_sympy(M: GaussianMatrix):
    def s(e):
        return sympy.Rational(e.re.numerator, e.re.denominator) + sympy.I * sympy.Rational(e.im.numerator, e.im.denominator)

    return sympy.Matrix([[s(e) for e in row] for row in M.rows()])


def sympy_drazin(A):
    """Core-nilpotent split: range and kernel of A^n are complementary and A-invariant."""
    n = A.rows
    P = A**n
    R, N = P.columnspace(), P.nullspace()
    if not R:
        return sympy.zeros(n)
    Q = sympy.Matrix.hstack(*(R + N))
    core = (Q.inv() * A * Q)[: len(R), : len(R)]
    Z = sympy.zeros(n)
    Z[: len(R), : len(R)] = core.inv()
    return (Q * Z * Q.inv()).applyfunc(sympy.expand)


J3 = jordan_block(0, 3)
ST4 = GaussianMatrix.diagonal([0, 1, 1, 1])


# minimal_polynomial


def test_minimal_polynomial_examples():
    assert minimal_polynomial(GaussianMatrix.identity(2)) == x - 1
    assert minimal_polynomial(JordanPresentation.diagonal_form([(0, (3,))])) == x**3
    pres = JordanPresentation.diagonal_form([(0, (2,)), (2, (1,))])
    assert minimal_polynomial(pres) == x**2 * (x - 2)
    assert minimal_polynomial(pres.matrix()) == x**2 * (x - 2)


@pytest.mark.parametrize("seed", range(12))
def test_minimal_polynomial_annihilates_and_matches_sympy(seed):
    pres = gen_presentation(trial_rng(seed), 4, 5)
    M = pres.matrix()
    p = minimal_polynomial(M)
    assert eval_polynomial(p, M).is_zero()
    # sympy oracle: product over eigenvalues of (x - lam)^(largest Jordan block)
    _, J = to_sympy(M).jordan_form()
    xs = sympy.Symbol("x")
    largest: dict = {}
    for lam, size in _block_sizes(J):
        largest[lam] = max(largest.get(lam, 0), size)
    want = sympy.Mul(*((xs - lam) ** k for lam, k in largest.items()))
    got = sympy.Add(*((sympy.nsimplify(c.re) + sympy.I * sympy.nsimplify(c.im)) * xs**k for k, c in enumerate(p.coeffs)))
    assert sympy.expand(got - want) == 0


def _block_sizes(J):
    out, i, n = [], 0, J.rows
    while i < n:
        j = i
        while j + 1 < n and J[j, j + 1] == 1:
            j += 1
        out.append((J[i, i], j - i + 1))
        i = j + 1
    return out


# ascent_descent


def test_ascent_descent_examples():
    assert ascent_descent(J3, 0) == (3, 3)
    assert ascent_descent(GaussianMatrix([[1, 1], [0, 1]]), 0) == (0, 0)
    assert ascent_descent(ST4, 0) == (1, 1)


def test_ascent_descent_off_spectrum_is_zero():
    assert ascent_descent(J3, 5) == (0, 0)


def test_ascent_descent_approx_matches_exact():
    M = block_diag(jordan_block(2, 2), jordan_block(-1, 1))
    assert ascent_descent(M.to_approx(), 2) == ascent_descent(M, 2) == (2, 2)


# drazin_inverse


def test_drazin_examples():
    r = drazin_inverse(GaussianMatrix([[1, 1], [0, 1]]))
    assert r.index == 0 and r.inverse == GaussianMatrix([[1, -1], [0, 1]])
    r = drazin_inverse(block_diag(jordan_block(0, 2), GaussianMatrix([[2]])))
    assert r.index == 2 and r.inverse == GaussianMatrix.diagonal([0, 0, Fraction(1, 2)])
    r = drazin_inverse(ST4)
    assert r.index == 1 and r.inverse == ST4
    assert drazin_axioms_exact(ST4, r.inverse, 1)


def test_drazin_nilpotent_is_zero():
    r = drazin_inverse(J3)
    assert r.index == 3 and r.inverse.is_zero()


@pytest.mark.parametrize("seed", range(15))
def test_drazin_matches_sympy_core_nilpotent_oracle(seed):
    pres = gen_presentation(trial_rng(100 + seed), 4, 5)
    M = pres.matrix()
    r = drazin_inverse(M)
    assert to_sympy(r.inverse).applyfunc(sympy.expand) == sympy_drazin(to_sympy(M))
    assert drazin_axioms_exact(M, r.inverse, r.index)
    # index consistency: Drazin index equals the ascent at 0
    assert r.index == ascent_descent(M, 0)[0]
    # presentation route agrees with the rank route
    assert drazin_inverse(pres).inverse == r.inverse


def test_drazin_approx_residuals_within_bound():
    M = block_diag(jordan_block(0, 2), GaussianMatrix([[3, 1], [0, 3]])).to_approx()
    r = drazin_inverse(M)
    assert r.index == 2
    bound = 1e-8 * (1 + M.norm()) ** (r.index + 1)
    assert max(drazin_residuals(M, r.inverse, r.index)) <= bound


def test_drazin_approx_against_numpy_formula():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((4, 4))
    A[:, 0] = 0  # singular, index 1 almost surely
    M = GaussianMatrix.from_numpy(A)
    r = drazin_inverse(M)
    k = r.index
    Ak = np.linalg.matrix_power(A, k)
    want = Ak @ np.linalg.pinv(np.linalg.matrix_power(A, 2 * k + 1)) @ Ak
    assert np.allclose(r.inverse.to_numpy(), want, atol=1e-8)


# eigen_clusters and matrix_poles


def test_eigen_clusters_examples():
    assert eigen_clusters(GaussianMatrix.diagonal([1, 1, 2])) == [(cv(1), 2), (cv(2), 1)]
    assert eigen_clusters(jordan_block(0, 2)) == [(cv(0), 2)]
    assert eigen_clusters(GaussianMatrix([[0, 1], [-1, 0]])) == [(-I, 1), (I, 1)]


def test_eigen_clusters_reject_irrational_spectrum():
    with pytest.raises(IrrationalSpectrum):
        eigen_clusters(GaussianMatrix([[0, 2], [1, 0]]))


@pytest.mark.parametrize("seed", range(10))
def test_eigen_clusters_match_sympy(seed):
    M = gen_presentation(trial_rng(200 + seed), 5, 6).matrix()
    want = sorted(
        ((sympy.re(k), sympy.im(k)), m) for k, m in to_sympy(M).eigenvals().items()
    )
    got = sorted(((sympy.nsimplify(l.re), sympy.nsimplify(l.im)), m) for l, m in eigen_clusters(M))
    assert got == want


@pytest.mark.parametrize("seed", range(10))
def test_eigen_clusters_spectral_mapping(seed):
    rng = trial_rng(300 + seed)
    M = gen_presentation(rng, 4, 4).matrix()
    p = Polynomial([int(c) for c in rng.integers(-2, 3, size=3)] + [1])
    mapped: dict = {}
    for lam, m in eigen_clusters(M):
        mapped[p(lam)] = mapped.get(p(lam), 0) + m
    assert eigen_clusters(eval_polynomial(p, M)) == sorted(mapped.items(), key=lambda t: t[0].sort_key())


def test_matrix_poles_examples():
    assert matrix_poles(J3) == [(cv(0), 3)]
    assert matrix_poles(ST4) == [(cv(0), 1), (cv(1), 1)]
    pres = JordanPresentation.diagonal_form([(0, (2,)), (2, (1,))])
    assert matrix_poles(pres) == [(cv(0), 2), (cv(2), 1)]
    assert matrix_poles(pres.matrix()) == [(cv(0), 2), (cv(2), 1)]


def test_approx_clusters_merge_within_eps():
    M = GaussianMatrix.from_numpy(np.diag([1.0, 1.0 + 1e-10, 2.0]))
    clusters = eigen_clusters(M)
    assert [m for _, m in clusters] == [2, 1]


# structural


def test_rank_exact_and_approx():
    assert rank(J3) == 2
    assert rank(J3.to_approx()) == 2
    assert rank(GaussianMatrix.zeros(3)) == 0


def test_presentation_validation():
    with pytest.raises(ValueError):
        JordanPresentation(((0, (2,)),), GaussianMatrix.identity(3))
    with pytest.raises(ValueError):
        JordanPresentation(((0, (1,)), (0, (1,))), GaussianMatrix.identity(2))
    with pytest.raises(ValueError):
        JordanPresentation(((0, (2,)),), GaussianMatrix([[1, 1], [1, 1]]))


def test_presentation_adjoint_is_adjoint_matrix():
    pres = gen_presentation(trial_rng(7), 4, 5)
    assert pres.conj_transpose().matrix() == pres.matrix().conj_transpose()


def test_rank_ambiguity_window_aborts():
    from opspec.errors import NumericAmbiguity

    M = GaussianMatrix.from_numpy(np.diag([1.0, 2e-9]))
    with pytest.raises(NumericAmbiguity):
        rank(M)
    assert rank(GaussianMatrix.from_numpy(np.diag([1.0, 1e-12]))) == 1
