"""Finitely presented operators and their spectral profiles.

An :class:`Operator` is a finite direct sum of blocks:

``MatrixBlock``
    a square matrix, optionally with an exact Jordan presentation;
``DiagonalBlock``
    a diagonal operator on l2 whose entries are listed atoms (a value with a
    finite or infinite multiplicity), mapped geometric/harmonic sequences and
    mapped dense enumerations of a real interval;
``ShiftBlock``
    ``map(S)`` or ``map(S*)`` for a weighted forward shift ``S`` with weights
    tending to zero (quasinilpotent), or its m-dimensional truncation.

The combinators of :func:`combine` act blockwise and return normalized
operators.  :func:`spectral_profile` applies per-block rules and the
direct-sum rules below.

Diagonal rule table (derived from the kernel/range structure of
``D - lambda`` for a diagonal ``D``):

* ``sigma`` is the closure of the entries; isolated points are attained
  entries and are poles of order one (``D - lambda`` splits as
  ``0 (+) invertible``);
* at an accumulation point the kernel of every power is the same eigenspace,
  so the ascent is at most one and ``sigma_asc`` is empty, while the ranges of
  the powers strictly decrease and are not closed, so
  ``sigma_dsc = sigma_LD = sigma_RD = sigma_DR = acc sigma``;
* ``IES`` is empty.

Shift rule table (weights tending to zero, so ``sigma = {offset}``):

* truncated shift of size m: ``offset`` is a pole of order ``ceil(m/k)``
  where ``k`` is the vanishing order of ``map - map(0)`` at 0;
* infinite forward shift: injective and never onto a closed range, so
  ``Pi`` is empty, ``IES = sigma_DR = sigma_dsc = sigma_LD = sigma_RD =
  {offset}`` and ``sigma_asc`` is empty;
* infinite backward shift (adjoint): kernels of powers grow, so in addition
  ``sigma_asc = {offset}``.

Direct sums: ``sigma`` and every regularity spectrum are unions;
a point is a pole of the sum iff it is isolated in the union and a pole or a
resolvent point of every summand, with the maximal summand order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Union

from .errors import IncompatibleOperands, NonCommuting, NotFiniteRank
from .matrix import (
    GaussianMatrix,
    JordanPresentation,
    eigen_clusters,
    eval_polynomial,
    matrix_poles,
)
from .scalars import DEFAULT_TF, ONE, ZERO, ComplexValue, Polynomial, ToleranceFrame, cv
from .spectra import (
    INF,
    Family,
    Point,
    PoleSet,
    Segment,
    SpectralSet,
    acc_set,
    includes,
    is_countable,
    iso_points,
    rebase,
    segment_image,
    union,
)

__all__ = [
    "Atom",
    "Seq",
    "Dense",
    "MatrixBlock",
    "DiagonalBlock",
    "ShiftBlock",
    "SparseDiagonal",
    "ZeroBlock",
    "Operator",
    "SpectralProfile",
    "combine",
    "spectral_profile",
    "is_algebraic",
    "is_meromorphic",
    "perturb_finite_rank",
    "evaluate_polynomial_zero",
    "diag",
    "matrix_op",
    "shift_op",
    "identity_diag",
]

X = Polynomial.x()


# ---------------------------------------------------------------------------
# diagonal components


@dataclass(frozen=True)
class Atom:
    value: ComplexValue
    multiplicity: float = 1  # positive int or INF

    def __post_init__(self):
        object.__setattr__(self, "value", cv(self.value))
        m = self.multiplicity
        if not (m == INF or (isinstance(m, int) and m >= 1)):
            raise ValueError("multiplicity must be a positive integer or inf")


@dataclass(frozen=True)
class Seq:
    """Entries ``map(w_n)``, one per base index, of a geometric/harmonic base."""

    kind: str
    param: object
    map: Polynomial = X
    skip: frozenset = frozenset()

    def family(self) -> Family:
        return Family(self.kind, self.param, self.map, True, self.skip)

    @property
    def limit(self) -> ComplexValue:
        return self.map.coeff(0)


@dataclass(frozen=True)
class Dense:
    """A dense enumeration of the real interval [lo, hi], pushed through ``map``."""

    lo: Fraction
    hi: Fraction
    map: Polynomial = X

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if not self.lo < self.hi:
            raise ValueError("dense interval requires lo < hi")


def _normalize_component(c):
    if isinstance(c, (Seq, Dense)) and c.map.is_constant():
        return Atom(c.map.coeff(0), INF)
    if isinstance(c, Seq):
        param, fmap = rebase(c.kind, c.param, c.map)
        if fmap != c.map:
            return Seq(c.kind, param, fmap, c.skip)
    return c


# ---------------------------------------------------------------------------
# blocks


@dataclass(frozen=True)
class MatrixBlock:
    matrix: GaussianMatrix
    presentation: Optional[JordanPresentation] = None

    @classmethod
    def of(cls, m: Union[GaussianMatrix, JordanPresentation]) -> "MatrixBlock":
        if isinstance(m, JordanPresentation):
            return cls(m.matrix(), m)
        return cls(m)

    @property
    def n(self) -> int:
        return self.matrix.n


@dataclass(frozen=True)
class DiagonalBlock:
    components: tuple

    def __post_init__(self):
        comps = tuple(_normalize_component(c) for c in self.components)
        if not comps:
            raise ValueError("a diagonal block needs at least one component")
        object.__setattr__(self, "components", comps)

    def is_scalar(self) -> bool:
        return (
            len(self.components) == 1
            and isinstance(self.components[0], Atom)
            and self.components[0].multiplicity == INF
        )

    def scalar(self) -> ComplexValue:
        return self.components[0].value

    def map_values(self, p: Polynomial) -> "DiagonalBlock":
        out = []
        for c in self.components:
            if isinstance(c, Atom):
                out.append(Atom(p(c.value), c.multiplicity))
            else:
                out.append(replace(c, map=p.compose(c.map)))
        return DiagonalBlock(_merge_atoms(out))

    def conjugate(self) -> "DiagonalBlock":
        out = []
        for c in self.components:
            if isinstance(c, Atom):
                out.append(Atom(c.value.conjugate(), c.multiplicity))
            elif isinstance(c, Seq):
                param = c.param.conjugate() if c.kind == "geometric" else c.param
                out.append(replace(c, param=param, map=c.map.conjugate()))
            else:
                out.append(replace(c, map=c.map.conjugate()))
        return DiagonalBlock(tuple(out))


def _merge_atoms(comps):
    return tuple(comps)


@dataclass(frozen=True)
class ShiftBlock:
    """``map(S)`` (or ``map(S*)`` when ``adjoint``) for a weighted shift S."""

    weight_kind: str  # "geometric" | "harmonic"
    weight_params: tuple  # (c, q) or (c, p)
    nilpotent: Optional[int] = None
    map: Polynomial = X
    adjoint: bool = False

    def __post_init__(self):
        c = cv(self.weight_params[0])
        if not (c.exact and c.im == 0 and c.re > 0):
            raise ValueError("shift weights need a positive real scale")
        if self.weight_kind == "geometric":
            q = cv(self.weight_params[1])
            if not (q.exact and q.im == 0 and 0 < q.re < 1):
                raise ValueError("geometric shift weights need 0 < q < 1")
            params = (c, q)
        elif self.weight_kind == "harmonic":
            p = int(self.weight_params[1])
            if p < 1:
                raise ValueError("harmonic shift weights need p >= 1")
            params = (c, p)
        else:
            raise ValueError(f"unknown weight kind {self.weight_kind!r}")
        object.__setattr__(self, "weight_params", params)
        if self.nilpotent is not None and self.nilpotent < 1:
            raise ValueError("nilpotent order must be >= 1")

    @property
    def offset(self) -> ComplexValue:
        return self.map.coeff(0)

    @property
    def vanishing(self) -> int:
        """Order of vanishing of ``map - map(0)`` at 0 (0 if map is constant)."""
        for k, c in enumerate(self.map.coeffs):
            if k > 0 and not c.is_zero():
                return k
        return 0

    def weight(self, n: int) -> ComplexValue:
        c, r = self.weight_params
        if self.weight_kind == "geometric":
            return c * r ** n
        return c / ComplexValue(n ** r)

    def pole_order(self) -> int:
        k = self.vanishing
        return -(-self.nilpotent // k)

    def truncated_matrix(self) -> GaussianMatrix:
        """The finite shift as a matrix (nilpotent blocks only)."""
        m = self.nilpotent
        rows = [[ZERO] * m for _ in range(m)]
        for i in range(1, m):
            rows[i][i - 1] = self.weight(i)
        S = GaussianMatrix(rows)
        if self.adjoint:
            S = S.conj_transpose()
        return eval_polynomial(self.map, S)


@dataclass(frozen=True)
class SparseDiagonal:
    """Finitely supported diagonal perturbation aligned with a DiagonalBlock.

    ``entries`` holds ``(component index, position, delta)``; the position is a
    base index for sequence components and ignored for atoms.
    """

    entries: tuple


@dataclass(frozen=True)
class ZeroBlock:
    """Zero perturbation aligned with any block."""


Block = Union[MatrixBlock, DiagonalBlock, ShiftBlock]


@dataclass(frozen=True)
class Operator:
    blocks: tuple

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("an operator needs at least one block")

    def is_scalar(self) -> bool:
        return len(self.blocks) == 1 and isinstance(self.blocks[0], DiagonalBlock) and self.blocks[0].is_scalar()

    def is_matrix(self) -> bool:
        return all(isinstance(b, MatrixBlock) for b in self.blocks)

    def as_matrix(self) -> GaussianMatrix:
        from .matrix import block_diag

        if not self.is_matrix():
            raise TypeError("operator is not finite-dimensional")
        if len(self.blocks) == 1:
            return self.blocks[0].matrix
        return block_diag(*[b.matrix for b in self.blocks])


# convenience constructors -------------------------------------------------------


def diag(*components) -> Operator:
    """``diag((v, m), Seq(...), Dense(...), ...)``; tuples become atoms."""
    comps = []
    for c in components:
        if isinstance(c, tuple):
            comps.append(Atom(cv(c[0]), c[1]))
        else:
            comps.append(c)
    return Operator((DiagonalBlock(tuple(comps)),))


def identity_diag() -> Operator:
    return diag((1, INF))


def matrix_op(m) -> Operator:
    if not isinstance(m, (GaussianMatrix, JordanPresentation)):
        m = GaussianMatrix(m)
    return Operator((MatrixBlock.of(m),))


def shift_op(kind: str, params, nilpotent: Optional[int] = None) -> Operator:
    return Operator((ShiftBlock(kind, tuple(params), nilpotent),))


# ---------------------------------------------------------------------------
# combinators


def _block_name(b) -> str:
    if isinstance(b, MatrixBlock):
        return f"matrix({b.n}x{b.n})"
    if isinstance(b, DiagonalBlock):
        return "diag"
    if isinstance(b, ShiftBlock):
        return "shift"
    return type(b).__name__


def _map_block(b: Block, p: Polynomial) -> Block:
    """Apply a polynomial to one block."""
    if isinstance(b, MatrixBlock):
        if p.degree == 1 and p.coeff(1) == ONE and b.presentation is not None:
            lam = -p.coeff(0)
            pres = b.presentation
            shifted = JordanPresentation(
                tuple((mu - lam, sizes) for mu, sizes in pres.eigen_data), pres.similarity
            )
            return MatrixBlock(shifted.matrix(), shifted)
        return MatrixBlock(eval_polynomial(p, b.matrix))
    if isinstance(b, DiagonalBlock):
        return b.map_values(p)
    new_map = p.compose(b.map)
    if new_map.is_constant():
        c = new_map.coeff(0)
        if b.nilpotent is not None:
            return MatrixBlock(GaussianMatrix.identity(b.nilpotent).scale(c))
        return DiagonalBlock((Atom(c, INF),))
    return replace(b, map=new_map)


def _adjoint_block(b: Block) -> Block:
    if isinstance(b, MatrixBlock):
        pres = b.presentation.conj_transpose() if b.presentation is not None else None
        return MatrixBlock(b.matrix.conj_transpose(), pres)
    if isinstance(b, DiagonalBlock):
        return b.conjugate()
    return replace(b, map=b.map.conjugate(), adjoint=not b.adjoint)


def _pair_blocks(a: Block, b: Block, op: str) -> Block:
    if isinstance(a, MatrixBlock) and isinstance(b, MatrixBlock):
        if a.n != b.n:
            raise IncompatibleOperands(
                f"{op}: matrix sizes differ ({a.n} vs {b.n})", _block_name(a), _block_name(b)
            )
        m = a.matrix @ b.matrix if op == "mul" else a.matrix + b.matrix
        return MatrixBlock(m)
    if isinstance(a, DiagonalBlock) and isinstance(b, DiagonalBlock):
        if a.is_scalar() or b.is_scalar():
            s, other = (a, b) if a.is_scalar() else (b, a)
            c = s.scalar()
            return other.map_values(Polynomial([0, c]) if op == "mul" else Polynomial([c, 1]))
        if len(a.components) != len(b.components):
            raise IncompatibleOperands(
                f"{op}: diagonal index structures differ", _block_name(a), _block_name(b)
            )
        out = []
        for ca, cb in zip(a.components, b.components):
            out.append(_pair_components(ca, cb, op))
        return DiagonalBlock(tuple(out))
    raise IncompatibleOperands(
        f"{op}: cannot combine {_block_name(a)} with {_block_name(b)}", _block_name(a), _block_name(b)
    )


def _pair_components(ca, cb, op: str):
    combine_maps = (lambda p, q: p * q) if op == "mul" else (lambda p, q: p + q)
    if isinstance(ca, Atom) and isinstance(cb, Atom):
        if ca.multiplicity != cb.multiplicity:
            raise IncompatibleOperands(f"{op}: atom multiplicities differ", "diag", "diag")
        v = ca.value * cb.value if op == "mul" else ca.value + cb.value
        return Atom(v, ca.multiplicity)
    if isinstance(ca, Seq) and isinstance(cb, Seq):
        if (ca.kind, ca.param, ca.skip) != (cb.kind, cb.param, cb.skip):
            raise IncompatibleOperands(f"{op}: sequence bases differ", "diag", "diag")
        return replace(ca, map=combine_maps(ca.map, cb.map))
    if isinstance(ca, Dense) and isinstance(cb, Dense):
        if (ca.lo, ca.hi) != (cb.lo, cb.hi):
            raise IncompatibleOperands(f"{op}: dense intervals differ", "diag", "diag")
        return replace(ca, map=combine_maps(ca.map, cb.map))
    raise IncompatibleOperands(
        f"{op}: component kinds differ ({type(ca).__name__} vs {type(cb).__name__})", "diag", "diag"
    )


def combine(kind: str, *operands, **kwargs) -> Operator:
    """Build a normalized operator.

    ``kind`` is one of ``direct_sum``, ``add``, ``mul``, ``scalar_shift``
    (``op - lam``, pass ``lam=``), ``adjoint`` or ``poly`` (pass ``p=``).
    """
    if kind == "direct_sum":
        return Operator(tuple(b for op in operands for b in op.blocks))
    if kind in ("add", "mul"):
        a, b = operands
        if b.is_scalar():
            c = b.blocks[0].scalar()
            p = Polynomial([0, c]) if kind == "mul" else Polynomial([c, 1])
            return Operator(tuple(_map_block(x, p) for x in a.blocks))
        if a.is_scalar():
            c = a.blocks[0].scalar()
            p = Polynomial([0, c]) if kind == "mul" else Polynomial([c, 1])
            return Operator(tuple(_map_block(x, p) for x in b.blocks))
        if len(a.blocks) != len(b.blocks):
            raise IncompatibleOperands(
                f"{kind}: block counts differ ({len(a.blocks)} vs {len(b.blocks)})", a, b
            )
        return Operator(tuple(_pair_blocks(x, y, kind) for x, y in zip(a.blocks, b.blocks)))
    if kind == "scalar_shift":
        (a,) = operands
        lam = cv(kwargs["lam"])
        return Operator(tuple(_map_block(x, Polynomial([-lam, 1])) for x in a.blocks))
    if kind == "adjoint":
        (a,) = operands
        return Operator(tuple(_adjoint_block(x) for x in a.blocks))
    if kind == "poly":
        (a,) = operands
        p = kwargs["p"]
        return Operator(tuple(_map_block(x, p) for x in a.blocks))
    raise ValueError(f"unknown combinator {kind!r}")


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class SpectralProfile:
    sigma: SpectralSet
    iso: SpectralSet
    acc: SpectralSet
    drazin_spectrum: SpectralSet
    ies: SpectralSet
    poles: PoleSet
    asc_spectrum: SpectralSet
    dsc_spectrum: SpectralSet
    ld_spectrum: SpectralSet
    rd_spectrum: SpectralSet
    algebraic: bool
    min_poly: Optional[Polynomial]
    meromorphic: bool
    countable: bool


@dataclass(frozen=True)
class _BlockProfile:
    sigma: SpectralSet
    poles: PoleSet
    drazin: SpectralSet
    ies: SpectralSet
    asc: SpectralSet
    dsc: SpectralSet
    ld: SpectralSet
    rd: SpectralSet
    factors: Optional[tuple]  # ((lambda, order), ...) when the block is algebraic


_EMPTY = SpectralSet()


def _matrix_block_profile(b: MatrixBlock, tf: ToleranceFrame) -> _BlockProfile:
    src = b.presentation if b.presentation is not None else b.matrix
    eig = eigen_clusters(src, tf)
    poles = matrix_poles(src, tf)
    sigma = SpectralSet(tuple(Point(lam, True, m) for lam, m in eig)).normalized()
    return _BlockProfile(
        sigma, PoleSet(tuple(poles)).normalized(), _EMPTY, _EMPTY, _EMPTY, _EMPTY, _EMPTY, _EMPTY,
        tuple(poles),
    )


def diagonal_sigma(b: DiagonalBlock) -> SpectralSet:
    points, families, segments = [], [], []
    for c in b.components:
        if isinstance(c, Atom):
            points.append(Point(c.value, True, c.multiplicity))
        elif isinstance(c, Seq):
            families.append(c.family())
        else:
            lo, hi = segment_image(Segment(c.lo, c.hi), c.map)
            if lo == hi:
                points.append(Point(ComplexValue(lo), True, INF))
            else:
                segments.append(Segment(lo, hi))
    return SpectralSet(tuple(points), tuple(families), tuple(segments)).normalized()


def _diagonal_block_profile(b: DiagonalBlock) -> _BlockProfile:
    sigma = diagonal_sigma(b)
    iso = iso_points(sigma)
    acc = acc_set(sigma)
    poles = PoleSet(tuple((p.value, 1) for p in iso.points), iso.families).normalized()
    factors = None
    if all(isinstance(c, Atom) for c in b.components):
        factors = tuple((p.value, 1) for p in sigma.points)
    return _BlockProfile(sigma, poles, acc, _EMPTY, _EMPTY, acc, acc, acc, factors)


def _shift_block_profile(b: ShiftBlock) -> _BlockProfile:
    lam = b.offset
    if b.nilpotent is not None:
        single = SpectralSet((Point(lam, True, b.nilpotent),))
        order = b.pole_order()
        return _BlockProfile(
            single, PoleSet(((lam, order),)), _EMPTY, _EMPTY, _EMPTY, _EMPTY, _EMPTY, _EMPTY,
            ((lam, order),),
        )
    # the forward shift is injective; the backward one has a k-dimensional kernel
    single = SpectralSet((Point(lam, b.adjoint, b.vanishing if b.adjoint else 1),))
    at = SpectralSet((Point(lam, False, 1),))
    asc = at if b.adjoint else _EMPTY
    return _BlockProfile(single, PoleSet(), at, at, asc, at, at, at, None)


def _block_profile(b: Block, tf: ToleranceFrame) -> _BlockProfile:
    if isinstance(b, MatrixBlock):
        return _matrix_block_profile(b, tf)
    if isinstance(b, DiagonalBlock):
        return _diagonal_block_profile(b)
    return _shift_block_profile(b)


def _union_factors(parts) -> Optional[Polynomial]:
    if any(p.factors is None for p in parts):
        return None
    orders: dict = {}
    for p in parts:
        for lam, k in p.factors:
            key = next((z for z in orders if z == lam), lam)
            orders[key] = max(orders.get(key, 0), k)
    roots = sorted(orders.items(), key=lambda t: t[0].sort_key())
    return Polynomial.from_roots(roots)


def spectral_profile(op: Operator, tf: ToleranceFrame = DEFAULT_TF) -> SpectralProfile:
    parts = [_block_profile(b, tf) for b in op.blocks]
    sigma = union(*[p.sigma for p in parts])
    iso = iso_points(sigma)
    acc = acc_set(sigma)
    drazin = union(*[p.drazin for p in parts])
    pole_set = iso.with_excluded(drazin.point_values())
    finite: dict = {}
    for p in parts:
        for z, _ in p.poles.finite:
            if pole_set.contains(z, tf):
                k = max(q.poles.order(z) or 0 for q in parts)
                finite[z] = max(finite.get(z, 0), k)
    for pt in pole_set.points:
        if pt.value not in finite:
            finite[pt.value] = max(q.poles.order(pt.value) or 0 for q in parts) or 1
    poles = PoleSet(tuple(finite.items()), pole_set.families).normalized()
    ies_points = [
        pt for p in parts for pt in p.ies.points if iso.contains(pt.value, tf)
    ]
    ies = SpectralSet(tuple(ies_points)).normalized()
    min_poly = _union_factors(parts)
    profile_kwargs = dict(
        sigma=sigma,
        iso=iso,
        acc=acc,
        drazin_spectrum=drazin,
        ies=ies,
        poles=poles,
        asc_spectrum=union(*[p.asc for p in parts]),
        dsc_spectrum=union(*[p.dsc for p in parts]),
        ld_spectrum=union(*[p.ld for p in parts]),
        rd_spectrum=union(*[p.rd for p in parts]),
        algebraic=min_poly is not None,
        min_poly=min_poly,
        countable=is_countable(sigma),
    )
    merom = _meromorphic_from_definition(sigma, poles, drazin, tf)
    return SpectralProfile(meromorphic=merom, **profile_kwargs)


def _meromorphic_from_definition(sigma, poles, drazin, tf) -> bool:
    """``sigma minus {0}`` inside the pole set, decided on the sets themselves."""
    verdict = includes(poles.as_set(), sigma, tf, ignore=(ZERO,))
    if verdict is None:
        # undecidable family inclusion: fall back on sigma_DR inside {0}
        return includes(SpectralSet.of(0), drazin, tf) is True
    return verdict


def is_algebraic(op: Operator, tf: ToleranceFrame = DEFAULT_TF) -> tuple[bool, Optional[Polynomial]]:
    """Decision by block rules; returns the minimal polynomial when algebraic."""
    for b in op.blocks:
        if isinstance(b, DiagonalBlock) and not all(isinstance(c, Atom) for c in b.components):
            return False, None
        if isinstance(b, ShiftBlock) and b.nilpotent is None:
            return False, None
    parts = [_block_profile(b, tf) for b in op.blocks]
    return True, _union_factors(parts)


def is_meromorphic(op: Operator, tf: ToleranceFrame = DEFAULT_TF) -> bool:
    return spectral_profile(op, tf).meromorphic


def evaluate_polynomial_zero(p: Polynomial, op: Operator, tf: ToleranceFrame = DEFAULT_TF) -> bool:
    """Structural check that ``p(op) = 0``."""
    for b in op.blocks:
        if isinstance(b, MatrixBlock):
            val = eval_polynomial(p, b.matrix)
            if val.exact:
                if not val.is_zero():
                    return False
            elif val.norm() > tf.eps_set * (1 + b.matrix.norm()) ** max(p.degree, 1):
                return False
        elif isinstance(b, DiagonalBlock):
            for c in b.components:
                if not isinstance(c, Atom):
                    return False
                if not p(c.value).is_zero():
                    return False
        else:
            if b.nilpotent is None:
                return False
            if p.is_zero():
                continue
            if p.multiplicity(b.offset) < b.pole_order():
                return False
    return True


# ---------------------------------------------------------------------------
# finite-rank perturbations


def perturb_finite_rank(op: Operator, f: Operator, tf: ToleranceFrame = DEFAULT_TF) -> Operator:
    """``op + f`` for a commuting ``f`` with a finite-rank power."""
    if len(f.blocks) != len(op.blocks):
        raise NonCommuting(
            f"perturbation has {len(f.blocks)} blocks, operator has {len(op.blocks)}"
        )
    out = []
    for i, (b, g) in enumerate(zip(op.blocks, f.blocks)):
        if isinstance(g, ZeroBlock):
            out.append(b)
            continue
        if isinstance(g, ShiftBlock):
            if g.nilpotent is None:
                raise NotFiniteRank(f"block {i}: an infinite shift has no finite-rank power")
            g = MatrixBlock(g.truncated_matrix())
        if isinstance(g, DiagonalBlock):
            if any(not isinstance(c, Atom) or c.multiplicity == INF for c in g.components):
                if all(isinstance(c, Atom) and c.value.is_zero() for c in g.components):
                    out.append(b)
                    continue
                raise NotFiniteRank(f"block {i}: diagonal perturbation has infinite support")
            raise NonCommuting(f"block {i}: use SparseDiagonal to align a finite diagonal perturbation")
        if isinstance(g, MatrixBlock):
            if not isinstance(b, MatrixBlock) or b.n != g.n:
                raise NonCommuting(f"block {i}: matrix perturbation is not aligned with {_block_name(b)}")
            M, F = b.matrix, g.matrix
            comm = M @ F - F @ M
            if comm.exact:
                ok = comm.is_zero()
            else:
                ok = comm.norm() <= tf.eps_set * (1 + M.norm()) * (1 + F.norm())
            if not ok:
                raise NonCommuting(f"block {i}: perturbation does not commute with the operator")
            out.append(MatrixBlock(M + F))
            continue
        if isinstance(g, SparseDiagonal):
            if not isinstance(b, DiagonalBlock):
                raise NonCommuting(f"block {i}: sparse diagonal is not aligned with {_block_name(b)}")
            out.append(_apply_sparse(b, g))
            continue
        raise TypeError(f"unsupported perturbation block {type(g).__name__}")
    return Operator(tuple(out))


def _apply_sparse(b: DiagonalBlock, g: SparseDiagonal) -> DiagonalBlock:
    deltas: dict = {}
    for ci, pos, delta in g.entries:
        if not 0 <= ci < len(b.components):
            raise IndexError(f"component index {ci} out of range")
        comp = b.components[ci]
        key = (ci, 0 if isinstance(comp, Atom) else pos)
        deltas[key] = deltas.get(key, ZERO) + cv(delta)
    comps = list(b.components)
    extra = []
    for (ci, pos), delta in sorted(deltas.items(), key=lambda t: t[0]):
        if delta.is_zero():
            continue
        comp = comps[ci]
        if isinstance(comp, Atom):
            if comp.multiplicity != INF:
                remaining = comp.multiplicity - 1
                comps[ci] = Atom(comp.value, remaining) if remaining else None
            extra.append(Atom(comp.value + delta, 1))
        elif isinstance(comp, Seq):
            first = 0 if comp.kind == "geometric" else 1
            if pos < first:
                raise IndexError(f"sequence position {pos} precedes the first index {first}")
            if pos in comp.skip:
                raise ValueError(f"sequence position {pos} already perturbed")
            term = comp.family().raw_term(pos)
            comps[ci] = replace(comp, skip=comp.skip | {pos})
            extra.append(Atom(term + delta, 1))
        else:
            raise IncompatibleOperands("dense components cannot carry finite-rank perturbations")
    return DiagonalBlock(tuple(c for c in comps if c is not None) + tuple(extra))
