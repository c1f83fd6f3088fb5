import numpy as np
import pytest
import sympy

from opspec.harness import gen_hermitian, gen_presentation, trial_rng
from opspec.matrix import GaussianMatrix, eigen_clusters, jordan_block
from opspec.multiplication import duality_report, realize, unvec, vec
from opspec.scalars import cv


def sympy_ascent_descent(M: np.ndarray, lam: complex):
    """Rank stabilization in sympy on the exact integer/Gaussian entries."""
    A = sympy.Matrix(M.shape[0], M.shape[1], [sympy.nsimplify(z.real) + sympy.I * sympy.nsimplify(z.imag) for z in M.ravel()])
    A = A - (sympy.nsimplify(lam.real) + sympy.I * sympy.nsimplify(lam.imag)) * sympy.eye(A.rows)
    ranks, P = [A.rows], sympy.eye(A.rows)
    for _ in range(A.rows + 1):
        P = P * A
        ranks.append(P.rank())
    first = next(k for k in range(len(ranks) - 1) if ranks[k] == ranks[k + 1])
    return first, first


def test_realize_identity():
    r = realize(GaussianMatrix.identity(2))
    assert r.left_mat == GaussianMatrix.identity(4) == r.right_mat


def test_realize_diagonal_eigenvalues():
    r = realize(GaussianMatrix.diagonal([1, 2]))
    assert eigen_clusters(r.left_mat) == [(cv(1), 2), (cv(2), 2)]


def test_realize_nilpotent_squares_to_zero():
    r = realize(jordan_block(0, 2))
    assert (r.left_mat @ r.left_mat).is_zero()
    assert (r.right_mat @ r.right_mat).is_zero()


@pytest.mark.parametrize("seed", range(6))
def test_realization_acts_by_left_and_right_multiplication(seed):
    rng = trial_rng(seed)
    a = gen_presentation(rng, 3, 4).matrix()
    X = gen_presentation(rng, 3, 4).matrix()
    r = realize(a)
    assert unvec(_apply(r.left_mat, X), 3) == a @ X
    assert unvec(_apply(r.right_mat, X), 3) == X @ a


def _apply(M: GaussianMatrix, X: GaussianMatrix):
    v = vec(X)
    return [sum((M.entry(i, j) * v[j] for j in range(M.n)), cv(0)) for i in range(M.n)]


def test_duality_nilpotent_descent():
    rep = duality_report(jordan_block(0, 2))
    assert rep.holds and not rep.hermitian
    descent = next(c for c in rep.checks if c.quantity.startswith("descent") and c.eigenvalue == 0)
    assert descent.values == (2, 2)


def test_duality_hermitian_semisimple():
    rep = duality_report(GaussianMatrix.diagonal([0, 1]))
    assert rep.hermitian and rep.holds
    asc = next(c for c in rep.checks if c.quantity == "ascent: L_a vs R_a vs a" and c.eigenvalue == 0)
    assert asc.values == (1, 1, 1)


def test_duality_invertible_at_zero():
    rep = duality_report(GaussianMatrix([[1, 1], [0, 2]]))
    at_zero = [c for c in rep.checks if c.eigenvalue == 0]
    assert at_zero and all(set(c.values) == {0} for c in at_zero)


@pytest.mark.parametrize("seed", range(5))
def test_duality_values_match_sympy(seed):
    a = gen_presentation(trial_rng(40 + seed), 2, 3).matrix()
    L = realize(a).left_mat.to_numpy()
    Rs = realize(a.conj_transpose()).right_mat.to_numpy()
    rep = duality_report(a)
    assert rep.holds
    for lam, _ in eigen_clusters(a):
        z = lam.to_complex()
        assert sympy_ascent_descent(L, z) == sympy_ascent_descent(Rs, z.conjugate())


@pytest.mark.parametrize("seed", range(5))
def test_hermitian_reports_hold(seed):
    a = gen_hermitian(trial_rng(60 + seed), 3)
    assert a.is_hermitian()
    rep = duality_report(a)
    assert rep.hermitian and rep.holds, rep.failures()


def test_approx_report_holds():
    a = GaussianMatrix([[2, 1], [0, 2]]).to_approx()
    assert duality_report(a).holds


def test_exact_dimension_cap():
    with pytest.raises(ValueError):
        duality_report(GaussianMatrix.identity(7))
