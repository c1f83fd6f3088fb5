from fractions import Fraction

import pytest

from opspec.errors import IncompatibleOperands, NonCommuting, NotFiniteRank
from opspec.matrix import GaussianMatrix, block_diag, jordan_block, minimal_polynomial
from opspec.operators import (
    INF,
    Atom,
    Dense,
    DiagonalBlock,
    Operator,
    Seq,
    ShiftBlock,
    SparseDiagonal,
    ZeroBlock,
    combine,
    diag,
    evaluate_polynomial_zero,
    identity_diag,
    is_algebraic,
    is_meromorphic,
    matrix_op,
    perturb_finite_rank,
    shift_op,
    spectral_profile,
)
from opspec.scalars import I, Polynomial, cv
from opspec.spectra import PoleSet, Segment, SpectralSet, harmonic, pole_relation, set_relation, union

x = Polynomial.x()
one_over_n = diag(Seq("harmonic", 1))
harmonic_shift = shift_op("harmonic", (1, 1))


def same(a: SpectralSet, b: SpectralSet) -> bool:
    return set_relation(a, b) == "equal"


# spectral_profile


def test_profile_of_one_over_n():
    p = spectral_profile(one_over_n)
    fam = SpectralSet(families=(harmonic(1, 1),))
    assert same(p.sigma, fam)
    assert p.sigma.contains(0) is True
    assert same(p.drazin_spectrum, SpectralSet.of(0))
    assert p.ies.is_empty()
    assert pole_relation(p.poles, PoleSet(families=(harmonic(1, 1, include_limit=False),)))
    assert p.poles.order(Fraction(1, 7)) == 1 and p.poles.order(0) is None


def test_profile_of_quasinilpotent_shift():
    p = spectral_profile(harmonic_shift)
    assert same(p.sigma, SpectralSet.of(0))
    assert p.poles.is_empty()
    assert same(p.drazin_spectrum, SpectralSet.of(0))
    assert same(p.ies, SpectralSet.of(0))


def test_profile_of_matrix_plus_identity():
    op = combine("direct_sum", matrix_op(jordan_block(0, 2)), identity_diag())
    p = spectral_profile(op)
    assert same(p.sigma, SpectralSet.of(0, 1))
    assert p.poles.finite == ((cv(0), 2), (cv(1), 1))
    assert p.drazin_spectrum.is_empty()


def test_profile_st_ts():
    st, ts = diag((0, 1), (1, INF)), identity_diag()
    pst, pts = spectral_profile(st), spectral_profile(ts)
    assert pst.poles.finite == ((cv(0), 1), (cv(1), 1))
    assert pts.poles.finite == ((cv(1), 1),)
    assert pst.drazin_spectrum.is_empty() and pts.drazin_spectrum.is_empty()


def test_profile_of_segment_diagonal():
    op = diag(Dense(0, 1), (2, 1))
    p = spectral_profile(op)
    assert not p.countable
    assert same(p.drazin_spectrum, SpectralSet(segments=(Segment(0, 1),)))
    assert p.poles.finite == ((cv(2), 1),)


def test_profile_invariants_on_mixed_sum():
    op = combine(
        "direct_sum",
        matrix_op(block_diag(jordan_block(0, 3), jordan_block(2, 1))),
        diag(Seq("geometric", Fraction(1, 2), Polynomial([2, 1]))),
        shift_op("geometric", (1, Fraction(1, 3))),
    )
    p = spectral_profile(op)
    # 2 is the limit of 2 + 2^-n, so it leaves the pole set
    assert p.poles.order(2) is None and p.poles.order(0) is None
    assert same(p.drazin_spectrum, SpectralSet.of(0, 2))
    # 0 is isolated in sigma but the infinite shift keeps it from being a pole
    assert same(p.ies, SpectralSet.of(0))
    assert same(union(p.drazin_spectrum, p.poles.as_set()), p.sigma)


def test_nilpotent_shift_pole_order():
    p = spectral_profile(shift_op("geometric", (1, Fraction(1, 2)), nilpotent=4))
    assert p.poles.finite == ((cv(0), 4),)
    squared = combine("poly", shift_op("geometric", (1, Fraction(1, 2)), nilpotent=5), p=x**2)
    assert spectral_profile(squared).poles.finite == ((cv(0), 3),)


# is_algebraic


def test_is_algebraic_examples():
    ok, poly = is_algebraic(diag((0, INF), (1, INF)))
    assert ok and poly == x * (x - 1)
    assert is_algebraic(one_over_n) == (False, None)
    M = block_diag(jordan_block(0, 2), jordan_block(3, 1))
    ok, poly = is_algebraic(matrix_op(M))
    assert ok and poly == minimal_polynomial(M)


def test_algebraic_witness_annihilates():
    op = combine("direct_sum", diag((2, INF), (I, 3)), matrix_op(jordan_block(0, 3)))
    ok, poly = is_algebraic(op)
    assert ok and evaluate_polynomial_zero(poly, op)
    assert not evaluate_polynomial_zero(poly.divmod(x)[0], op)


# is_meromorphic


def test_is_meromorphic_examples():
    assert is_meromorphic(one_over_n)
    assert not is_meromorphic(combine("scalar_shift", one_over_n, lam=-1))
    assert is_meromorphic(harmonic_shift)


# combine


def test_identity_is_neutral_for_mul():
    st = diag((0, 1), (1, INF))
    assert combine("mul", st, identity_diag()) == st
    assert combine("mul", identity_diag(), st) == st


def test_adjoint_conjugates_diagonal():
    assert combine("adjoint", diag((I, INF))) == diag((-I, INF))


def test_poly_rebases_harmonic():
    squared = combine("poly", one_over_n, p=x**2)
    assert squared == diag(Seq("harmonic", 2))
    assert same(spectral_profile(squared).drazin_spectrum, SpectralSet.of(0))


def test_add_and_mul_of_aligned_diagonals():
    a = diag((1, 2), Seq("harmonic", 1))
    b = diag((3, 2), Seq("harmonic", 1, Polynomial([0, 2])))
    assert combine("add", a, b) == diag((4, 2), Seq("harmonic", 1, Polynomial([0, 3])))
    assert combine("mul", a, b) == diag((3, 2), Seq("harmonic", 2, Polynomial([0, 2])))


def test_incompatible_operands_raise():
    with pytest.raises(IncompatibleOperands):
        combine("add", one_over_n, matrix_op(jordan_block(0, 2)))
    with pytest.raises(IncompatibleOperands):
        combine("mul", matrix_op(jordan_block(0, 2)), matrix_op(jordan_block(0, 3)))


def test_scalar_shift_keeps_matrix_presentation():
    from opspec.matrix import JordanPresentation

    pres = JordanPresentation.diagonal_form([(0, (2,)), (1, (1,))])
    shifted = combine("scalar_shift", matrix_op(pres), lam=3)
    block = shifted.blocks[0]
    assert block.presentation is not None
    assert block.matrix == pres.matrix().shift(3)


def test_adjoint_is_involutive():
    op = combine(
        "direct_sum",
        diag(Seq("geometric", cv("1/2i"), Polynomial([I, 1])), (cv("1+i"), 1)),
        shift_op("harmonic", (1, 2)),
        matrix_op(GaussianMatrix([[1, I], [0, 2]])),
    )
    assert combine("adjoint", combine("adjoint", op)) == op


# perturb_finite_rank


def test_perturbation_moves_one_eigenvalue():
    f = Operator((SparseDiagonal(((0, 1, 4),)),))
    pert = perturb_finite_rank(one_over_n, f)
    p = spectral_profile(pert)
    assert p.sigma.contains(5) is True and p.sigma.contains(1) is False
    assert is_meromorphic(pert)
    assert same(p.drazin_spectrum, SpectralSet.of(0))


def test_zero_perturbation_is_identity():
    op = matrix_op(jordan_block(0, 2))
    assert perturb_finite_rank(op, Operator((ZeroBlock(),))) == op
    assert perturb_finite_rank(op, matrix_op(GaussianMatrix.zeros(2))) == op


def test_noncommuting_matrix_perturbation_errors():
    with pytest.raises(NonCommuting):
        perturb_finite_rank(diag((0, INF)), matrix_op(jordan_block(0, 2)))
    with pytest.raises(NonCommuting):
        perturb_finite_rank(matrix_op(jordan_block(0, 2)), matrix_op(GaussianMatrix([[0, 0], [1, 0]])))


def test_infinite_support_is_not_finite_rank():
    with pytest.raises(NotFiniteRank):
        perturb_finite_rank(one_over_n, diag((1, INF)))
    with pytest.raises(NotFiniteRank):
        perturb_finite_rank(harmonic_shift, harmonic_shift)


def test_nilpotent_shift_perturbation_keeps_meromorphy():
    op = shift_op("geometric", (1, Fraction(1, 2)), nilpotent=3)
    f = Operator((ShiftBlock("geometric", (1, Fraction(1, 2)), nilpotent=3, map=Polynomial([0, 0, 1])),))
    pert = perturb_finite_rank(matrix_op(op.blocks[0].truncated_matrix()), f)
    assert is_meromorphic(pert)
    assert spectral_profile(pert).drazin_spectrum.is_empty()


# validation


def test_block_validation():
    with pytest.raises(ValueError):
        Atom(cv(1), 0)
    with pytest.raises(ValueError):
        Dense(1, 0)
    with pytest.raises(ValueError):
        DiagonalBlock(())
    with pytest.raises(ValueError):
        Operator(())


def test_constant_family_collapses_to_atom():
    assert diag(Seq("harmonic", 1, Polynomial([3]))) == diag((3, INF))
