"""Seeded generators and executable property suites.

Each trial draws from ``numpy.random.default_rng(derived_seed)`` where
``derived_seed`` is a pure function of ``(seed, trial)``; a failing trial is
replayed from its derived seed alone with :func:`reproduce`.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import NumericAmbiguity, OpspecError
from .matrix import (
    GaussianMatrix,
    JordanPresentation,
    ascent_descent,
    drazin_axioms_exact,
    drazin_inverse,
    drazin_residuals,
    index_at_zero,
)
from .multiplication import duality_report
from .operators import (
    INF,
    Atom,
    Dense,
    DiagonalBlock,
    MatrixBlock,
    Operator,
    Seq,
    ShiftBlock,
    SparseDiagonal,
    ZeroBlock,
    combine,
    diag,
    evaluate_polynomial_zero,
    is_algebraic,
    perturb_finite_rank,
    spectral_profile,
)
from .scalars import DEFAULT_TF, ONE, ZERO, ComplexValue, Polynomial, ToleranceFrame
from .spectra import (
    SpectralSet,
    boundary,
    conjugate_set,
    disjoint,
    image,
    includes,
    is_countable,
    pole_relation,
    union,
)

__all__ = [
    "GeneratorProfile",
    "Failure",
    "TrialError",
    "VerificationReport",
    "SUITES",
    "derive_seed",
    "trial_rng",
    "gen_operator",
    "gen_presentation",
    "gen_hermitian",
    "run_suite",
    "run_trial",
    "reproduce",
    "st_ts_fixture",
]

FAMILY_KEYS = ("points", "geometric", "harmonic", "segment", "matrix", "shift")
DEFAULT_MIX = {"points": 2, "geometric": 1, "harmonic": 1, "segment": 1, "matrix": 2, "shift": 1}


@dataclass(frozen=True)
class GeneratorProfile:
    seed: int = 0
    max_matrix_dim: int = 5
    max_blocks: int = 4
    family_mix: dict = field(default_factory=lambda: dict(DEFAULT_MIX))
    value_pool: int = 10

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.max_matrix_dim < 1 or self.max_blocks < 1 or self.value_pool < 1:
            raise ValueError("dimensions and pool bounds must be >= 1")
        unknown = set(self.family_mix) - set(FAMILY_KEYS)
        if unknown:
            raise ValueError(f"unknown mix keys {sorted(unknown)}")
        weights = list(self.family_mix.values())
        if any(w < 0 for w in weights) or not any(w > 0 for w in weights):
            raise ValueError("mix weights must be nonnegative and not all zero")

    def weight(self, key: str) -> float:
        return float(self.family_mix.get(key, 0))


def derive_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, np.uint64)[0])


def trial_rng(derived_seed: int) -> np.random.Generator:
    return np.random.default_rng(derived_seed)


# ---------------------------------------------------------------------------
# scalar and matrix generators


def rand_rational(rng, pool: int, nonzero: bool = False) -> Fraction:
    while True:
        num = int(rng.integers(-pool, pool + 1))
        den = int(rng.integers(1, min(pool, 4) + 1))
        if num or not nonzero:
            return Fraction(num, den)


def rand_value(rng, pool: int, complex_prob: float = 0.25, nonzero: bool = False) -> ComplexValue:
    re = rand_rational(rng, pool)
    im = rand_rational(rng, pool) if rng.random() < complex_prob else Fraction(0)
    if nonzero and re == 0 and im == 0:
        re = Fraction(1)
    return ComplexValue(re, im)


def rand_unimodular(rng, n: int) -> GaussianMatrix:
    """Product of unit-triangular integer matrices and a permutation."""
    L = [[Fraction(0)] * n for _ in range(n)]
    U = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        L[i][i] = U[i][i] = Fraction(1)
        for j in range(i):
            L[i][j] = Fraction(int(rng.integers(-1, 2)))
            U[j][i] = Fraction(int(rng.integers(-1, 2)))
    perm = rng.permutation(n)
    P = [[Fraction(int(perm[i] == j)) for j in range(n)] for i in range(n)]
    return GaussianMatrix(P) @ GaussianMatrix(L) @ GaussianMatrix(U)


def _partition(rng, n: int) -> list[int]:
    parts = []
    while n:
        s = int(rng.integers(1, n + 1))
        parts.append(s)
        n -= s
    return parts


def gen_presentation(rng, n: int, pool: int = 10, complex_prob: float = 0.25) -> JordanPresentation:
    """Random Jordan data of size n with a unimodular similarity."""
    sizes = _partition(rng, n)
    groups: list[list[int]] = []
    for s in sizes:
        if groups and rng.random() < 0.3:
            groups[int(rng.integers(len(groups)))].append(s)
        else:
            groups.append([s])
    lams: list[ComplexValue] = []
    if rng.random() < 0.5:
        lams.append(ZERO)
    while len(lams) < len(groups):
        v = rand_value(rng, pool, complex_prob)
        if v not in lams:
            lams.append(v)
    rng.shuffle(lams)
    data = tuple((lam, tuple(g)) for lam, g in zip(lams, groups))
    return JordanPresentation(data, rand_unimodular(rng, n))


def gen_hermitian(rng, n: int, pool: int = 10) -> GaussianMatrix:
    """``H D H`` with ``H`` an exact Householder reflection and ``D`` real diagonal."""
    vals = [rand_rational(rng, pool) for _ in range(n)]
    if n > 1 and rng.random() < 0.5:
        vals[1] = vals[0]
    D = GaussianMatrix.diagonal(vals)
    v = [ComplexValue(int(rng.integers(-2, 3)), int(rng.integers(-2, 3))) for _ in range(n)]
    if all(x.is_zero() for x in v):
        v[0] = ONE
    norm2 = sum((x.abs2() for x in v), Fraction(0))
    H = GaussianMatrix(
        [[(ONE if i == j else ZERO) - v[i] * v[j].conjugate() * ComplexValue(2 / norm2) for j in range(n)] for i in range(n)]
    )
    return H @ D @ H


def rand_upper(rng, n: int, pool: int) -> GaussianMatrix:
    rows = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = rand_value(rng, 4, 0.2) if rng.random() < 0.75 else ZERO
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                rows[i][j] = ComplexValue(int(rng.integers(-2, 3)))
    return GaussianMatrix(rows)


# ---------------------------------------------------------------------------
# operator generators


def _rand_ratio(rng) -> ComplexValue:
    while True:
        d = int(rng.integers(2, 6))
        a = int(rng.integers(-d + 1, d))
        b = int(rng.integers(-d + 1, d)) if rng.random() < 0.25 else 0
        if (a or b) and a * a + b * b < d * d:
            return ComplexValue(Fraction(a, d), Fraction(b, d))


def _rand_affine(rng, pool: int) -> Polynomial:
    c = rand_value(rng, 3, 0.2, nonzero=True)
    limit = rand_value(rng, pool, 0.2) if rng.random() < 0.6 else ZERO
    return Polynomial([limit, c])


def gen_component(rng, key: str, pool: int):
    if key == "points":
        mult = INF if rng.random() < 0.4 else int(rng.integers(1, 4))
        return Atom(rand_value(rng, pool), mult)
    if key == "geometric":
        return Seq("geometric", _rand_ratio(rng), _rand_affine(rng, pool))
    if key == "harmonic":
        return Seq("harmonic", int(rng.integers(1, 3)), _rand_affine(rng, pool))
    lo = rand_rational(rng, pool)
    return Dense(lo, lo + Fraction(int(rng.integers(1, 4)), int(rng.integers(1, 3))))


def _choose(rng, keys, weights):
    w = np.asarray(weights, dtype=float)
    return keys[int(rng.choice(len(keys), p=w / w.sum()))]


def gen_diagonal(rng, profile: GeneratorProfile, force_segment: bool = False) -> DiagonalBlock:
    keys = [k for k in ("points", "geometric", "harmonic", "segment") if profile.weight(k) > 0]
    if not keys:
        keys = ["points"]
    weights = [profile.weight(k) or 1.0 for k in keys]
    comps = [gen_component(rng, _choose(rng, keys, weights), profile.value_pool) for _ in range(int(rng.integers(1, 4)))]
    if force_segment and not any(isinstance(c, Dense) for c in comps):
        comps.append(gen_component(rng, "segment", profile.value_pool))
    return DiagonalBlock(tuple(comps))


def gen_shift(rng, pool: int) -> ShiftBlock:
    kind = "geometric" if rng.random() < 0.5 else "harmonic"
    params = (Fraction(1), Fraction(1, int(rng.integers(2, 5)))) if kind == "geometric" else (Fraction(1), int(rng.integers(1, 3)))
    nil = None if rng.random() < 0.6 else int(rng.integers(1, 5))
    offset = ZERO if rng.random() < 0.5 else rand_value(rng, pool, 0.2)
    return ShiftBlock(kind, params, nil, Polynomial([offset, 1]), bool(rng.random() < 0.5))


def gen_block(rng, profile: GeneratorProfile, force_segment: bool = False):
    diag_w = sum(profile.weight(k) for k in ("points", "geometric", "harmonic", "segment"))
    kinds, weights = [], []
    for k, w in (("diag", diag_w), ("matrix", profile.weight("matrix")), ("shift", profile.weight("shift"))):
        if w > 0:
            kinds.append(k)
            weights.append(w)
    kind = _choose(rng, kinds, weights)
    if kind == "matrix":
        n = int(rng.integers(1, profile.max_matrix_dim + 1))
        return MatrixBlock.of(gen_presentation(rng, n, profile.value_pool))
    if kind == "shift":
        return gen_shift(rng, profile.value_pool)
    return gen_diagonal(rng, profile, force_segment)


def _gen_operator(rng, profile: GeneratorProfile, force_segment: bool = False) -> Operator:
    blocks = [gen_block(rng, profile) for _ in range(int(rng.integers(1, profile.max_blocks + 1)))]
    if force_segment and not any(
        isinstance(b, DiagonalBlock) and any(isinstance(c, Dense) for c in b.components) for b in blocks
    ):
        blocks[int(rng.integers(len(blocks)))] = gen_diagonal(rng, profile, force_segment=True)
    return Operator(tuple(blocks))


def gen_operator(profile: GeneratorProfile, trial: int) -> Operator:
    """Deterministic in ``(profile.seed, trial)``."""
    return _gen_operator(trial_rng(derive_seed(profile.seed, trial)), profile)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class Failure:
    trial: int
    derived_seed: int
    instance: str
    assertion: str


@dataclass(frozen=True)
class TrialError:
    trial: int
    derived_seed: int
    instance: str
    message: str


@dataclass
class VerificationReport:
    suite: str
    trials: int
    failures: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    counters: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def status(self) -> str:
        if self.failures:
            return "fail"
        if self.errors:
            return "error"
        return "pass"

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "status": self.status,
            "failures": [vars(f) for f in self.failures],
            "errors": [vars(e) for e in self.errors],
            "counters": dict(sorted(self.counters.items())),
        }


class _Trial:
    """Collects the instance description, violated assertions and counters."""

    def __init__(self):
        self.instance = ""
        self.violations: list[str] = []
        self.counters: dict = {}

    def check(self, ok, message: str):
        if ok is None:
            raise NumericAmbiguity(f"undecided: {message}")
        if not ok:
            self.violations.append(message)

    def count(self, key: str, k: int = 1):
        self.counters[key] = self.counters.get(key, 0) + k


def _describe(op: Operator) -> str:
    from .analyze import operator_to_dsl

    try:
        return operator_to_dsl(op)
    except Exception:  # pragma: no cover - description must never mask a verdict
        return repr(op)


def _set_equal(a: SpectralSet, b: SpectralSet, tf) -> Optional[bool]:
    x = includes(a, b, tf)
    y = includes(b, a, tf)
    if x is False or y is False:
        return False
    if x is None or y is None:
        return None
    return True


# ---------------------------------------------------------------------------
# suite bodies


def _suite_t1(t: _Trial, rng, profile, tf):
    op = _gen_operator(rng, profile)
    t.instance = _describe(op)
    prof = spectral_profile(op, tf)
    no_dr = prof.drazin_spectrum.is_empty()
    bd = disjoint(boundary(prof.sigma), prof.drazin_spectrum, tf)
    t.check(bd is not None, "boundary test decidable")
    alg, P = is_algebraic(op, tf)
    t.check(no_dr == bool(bd), f"sigma_DR empty ({no_dr}) vs boundary in rho_DR ({bd})")
    t.check(no_dr == alg, f"sigma_DR empty ({no_dr}) vs algebraic ({alg})")
    if alg:
        t.count("algebraic")
        t.check(P is not None and not P.is_zero(), "algebraic verdict ships a nonzero polynomial")
        t.check(evaluate_polynomial_zero(P, op, tf), "P(op) = 0 structurally")


def _suite_t2(t: _Trial, rng, profile, tf):
    force = bool(rng.random() < 0.25)
    op = _gen_operator(rng, profile, force_segment=force)
    t.instance = _describe(op)
    prof = spectral_profile(op, tf)
    if prof.sigma.segments:
        t.count("segment_trials")
    a, b = is_countable(prof.sigma), is_countable(prof.drazin_spectrum)
    t.check(a == b, f"countable sigma ({a}) vs countable sigma_DR ({b})")


def _t3_pair(rng, profile):
    """A pair (a, b) whose products ab and ba are both representable."""
    a_blocks, b_blocks = [], []
    for _ in range(int(rng.integers(1, min(profile.max_blocks, 3) + 1))):
        r = rng.random()
        if r < 0.6:
            n = int(rng.integers(1, profile.max_matrix_dim + 1))
            S, R = rand_unimodular(rng, n), rand_unimodular(rng, n)
            S_inv, R_inv = _inv(S), _inv(R)
            T1, T2 = rand_upper(rng, n, profile.value_pool), rand_upper(rng, n, profile.value_pool)
            a_blocks.append(MatrixBlock(S @ T1 @ R_inv))
            b_blocks.append(MatrixBlock(R @ T2 @ S_inv))
        else:
            d1 = gen_diagonal(rng, _no_segment(profile))
            d2 = _same_skeleton(rng, d1, profile.value_pool)
            a_blocks.append(d1)
            b_blocks.append(d2)
    return Operator(tuple(a_blocks)), Operator(tuple(b_blocks))


def _inv(M: GaussianMatrix) -> GaussianMatrix:
    from .matrix import inverse

    return inverse(M)


def _no_segment(profile: GeneratorProfile) -> GeneratorProfile:
    mix = dict(profile.family_mix)
    mix["segment"] = 0
    if not any(mix.get(k, 0) > 0 for k in ("points", "geometric", "harmonic")):
        mix["points"] = 1
    return GeneratorProfile(profile.seed, profile.max_matrix_dim, profile.max_blocks, mix, profile.value_pool)


def _same_skeleton(rng, d: DiagonalBlock, pool: int) -> DiagonalBlock:
    comps = []
    for c in d.components:
        if isinstance(c, Atom):
            comps.append(Atom(rand_value(rng, pool), c.multiplicity))
        elif isinstance(c, Seq):
            comps.append(Seq(c.kind, c.param, _rand_affine(rng, pool), c.skip))
        else:
            comps.append(Dense(c.lo, c.hi, _rand_affine_real(rng)))
    return DiagonalBlock(tuple(comps))


def _rand_affine_real(rng) -> Polynomial:
    return Polynomial([rand_rational(rng, 4), rand_rational(rng, 3, nonzero=True)])


def _suite_t3(t: _Trial, rng, profile, tf):
    a, b = _t3_pair(rng, profile)
    t.instance = f"a = {_describe(a)}; b = {_describe(b)}"
    ab, ba = combine("mul", a, b), combine("mul", b, a)
    pab, pba = spectral_profile(ab, tf), spectral_profile(ba, tf)
    t.check(_set_equal(pab.drazin_spectrum, pba.drazin_spectrum, tf), "sigma_DR(ab) = sigma_DR(ba)")
    t.check(
        pole_relation(pab.poles.without(ZERO), pba.poles.without(ZERO), tf),
        f"poles(ab)\\{{0}} = poles(ba)\\{{0}}: {pab.poles} vs {pba.poles}",
    )
    t.check(pab.meromorphic == pba.meromorphic, "ab meromorphic iff ba meromorphic")
    if ab != ba:
        t.count("noncommuting_pairs")


def _suite_t5(t: _Trial, rng, profile, tf):
    n = int(rng.integers(1, min(profile.max_matrix_dim, 4) + 1))
    a = gen_presentation(rng, n, profile.value_pool).matrix()
    t.instance = f"matrix {a}"
    rep = duality_report(a, tf)
    for c in rep.failures():
        t.check(False, f"{c.quantity} at {c.eigenvalue}: {c.values}")


def _suite_t6(t: _Trial, rng, profile, tf):
    n = int(rng.integers(1, min(profile.max_matrix_dim, 4) + 1))
    a = gen_hermitian(rng, n, profile.value_pool)
    t.instance = f"matrix {a}"
    t.check(a.is_hermitian(), "instance is hermitian")
    rep = duality_report(a, tf)
    t.check(rep.hermitian, "report runs the hermitian comparisons")
    for c in rep.failures():
        t.check(False, f"{c.quantity} at {c.eigenvalue}: {c.values}")
    prof = spectral_profile(Operator((MatrixBlock(a),)), tf)
    for name in ("sigma", "iso", "acc", "drazin_spectrum", "ies", "asc_spectrum", "dsc_spectrum", "ld_spectrum", "rd_spectrum"):
        t.check(getattr(prof, name).is_real(), f"{name} is real")
    t.check(prof.poles.as_set().is_real(), "poles are real")


def _random_perturbation(rng, op: Operator, pool: int) -> Operator:
    blocks = []
    for b in op.blocks:
        if isinstance(b, MatrixBlock):
            p = Polynomial([rand_rational(rng, 3), rand_rational(rng, 3), rand_rational(rng, 2)])
            from .matrix import eval_polynomial

            blocks.append(MatrixBlock(eval_polynomial(p, b.matrix)))
        elif isinstance(b, DiagonalBlock):
            entries = []
            for _ in range(int(rng.integers(1, 4))):
                ci = int(rng.integers(len(b.components)))
                comp = b.components[ci]
                if isinstance(comp, Dense):
                    continue
                pos = 0
                if isinstance(comp, Seq):
                    first = 0 if comp.kind == "geometric" else 1
                    free = [k for k in range(first, first + 6) if k not in comp.skip]
                    pos = int(rng.choice(free))
                    if any(e[0] == ci and e[1] == pos for e in entries):
                        continue
                entries.append((ci, pos, rand_value(rng, pool, 0.2, nonzero=True)))
            blocks.append(SparseDiagonal(tuple(entries)))
        else:
            blocks.append(ZeroBlock())
    return Operator(tuple(blocks))


def _merom_fixtures(t: _Trial, tf):
    one_over_n = diag(Seq("harmonic", 1, Polynomial.x()))
    one_plus = combine("scalar_shift", one_over_n, lam=-1)
    shift = Operator((ShiftBlock("geometric", (1, Fraction(1, 2))),))
    t.check(spectral_profile(one_over_n, tf).meromorphic, "diag{1/n} is meromorphic")
    t.check(not spectral_profile(one_plus, tf).meromorphic, "diag{1+1/n} is not meromorphic")
    ps = spectral_profile(shift, tf)
    t.check(ps.meromorphic, "quasinilpotent shift is meromorphic")
    t.check(_set_equal(ps.ies, SpectralSet.of(0), tf), "shift IES = {0}")


def _suite_mero(t: _Trial, rng, profile, tf):
    op = _gen_operator(rng, profile)
    t.instance = _describe(op)
    prof = spectral_profile(op, tf)
    inside = includes(SpectralSet.of(0), prof.drazin_spectrum, tf)
    t.check(inside is not None, "sigma_DR inside {0} decidable")
    t.check(prof.meromorphic == inside, f"meromorphic ({prof.meromorphic}) vs sigma_DR in {{0}} ({inside})")
    if prof.meromorphic:
        t.count("meromorphic")
    f = _random_perturbation(rng, op, profile.value_pool)
    pert = perturb_finite_rank(op, f, tf)
    t.instance += f"; perturbed = {_describe(pert)}"
    pp = spectral_profile(pert, tf)
    t.count("perturbations")
    t.check(_set_equal(pp.drazin_spectrum, prof.drazin_spectrum, tf), "perturbation preserves sigma_DR")
    t.check(pp.meromorphic == prof.meromorphic, "perturbation preserves meromorphy")


def _rand_smt_poly(rng, real: bool) -> Polynomial:
    deg = int(rng.integers(1, 4))
    if deg == 3:
        r1, r2 = rand_rational(rng, 3), rand_rational(rng, 3)
        # derivative 3(x - r1)(x - r2) keeps critical points rational
        return Polynomial([rand_rational(rng, 3), 3 * r1 * r2, Fraction(-3, 2) * (r1 + r2), 1])
    cplx = 0.0 if real else 0.25
    coeffs = [rand_value(rng, 3, cplx) for _ in range(deg)] + [rand_value(rng, 3, cplx, nonzero=True)]
    return Polynomial(coeffs)


def _suite_smt(t: _Trial, rng, profile, tf):
    mix = dict(profile.family_mix)
    mix["shift"] = 0
    if not any(mix.get(k, 0) > 0 for k in FAMILY_KEYS):
        mix["points"] = 1
    sub = GeneratorProfile(profile.seed, profile.max_matrix_dim, profile.max_blocks, mix, profile.value_pool)
    op = _gen_operator(rng, sub)
    has_segment = any(isinstance(b, DiagonalBlock) and any(isinstance(c, Dense) for c in b.components) for b in op.blocks)
    p = _rand_smt_poly(rng, real=has_segment)
    t.instance = f"{_describe(op)}; p = {p}"
    lhs = spectral_profile(combine("poly", op, p=p), tf).drazin_spectrum
    rhs = image(spectral_profile(op, tf).drazin_spectrum, p)
    t.check(_set_equal(lhs, rhs, tf), f"sigma_DR(p(op)) = p(sigma_DR(op)): {lhs} vs {rhs}")


APPROX_AXIOM_TOL = 1e-8


def _suite_axioms(t: _Trial, rng, profile, tf):
    n = int(rng.integers(1, profile.max_matrix_dim + 1))
    pres = gen_presentation(rng, n, profile.value_pool)
    M = pres.matrix()
    t.instance = f"matrix {M}"
    res = drazin_inverse(M, tf)
    t.check(drazin_axioms_exact(M, res.inverse, res.index), "exact Drazin identities")
    t.check(res.inverse == drazin_inverse(pres, tf).inverse, "rank route agrees with the Jordan route")
    t.count("exact")
    A = M.to_approx()
    try:
        ares = drazin_inverse(A, tf)
    except NumericAmbiguity:
        t.count("approx_ambiguous")
        return
    r1, r2, r3 = drazin_residuals(A, ares.inverse, ares.index)
    bound = APPROX_AXIOM_TOL * (1 + A.norm()) ** (ares.index + 1)
    t.count("approx")
    t.check(max(r1, r2, r3) <= bound, f"approx residuals {(r1, r2, r3)} exceed {bound:.3g}")


def _suite_oracle(t: _Trial, rng, profile, tf):
    n = int(rng.integers(1, profile.max_matrix_dim + 1))
    pres = gen_presentation(rng, n, profile.value_pool)
    M = pres.matrix()
    t.instance = f"jordan {pres.eigen_data} sim {pres.similarity}"
    for lam, _ in pres.eigenvalues():
        k = pres.largest_block(lam)
        t.check(ascent_descent(M, lam, tf) == (k, k), f"ascent/descent at {lam} equal largest block {k}")
    probe = rand_value(rng, profile.value_pool)
    if all(probe != lam for lam, _ in pres.eigen_data):
        t.check(ascent_descent(M, probe, tf) == (0, 0), f"ascent/descent vanish off the spectrum at {probe}")
    zero_block = next((max(sizes) for lam, sizes in pres.eigen_data if lam.is_zero()), 0)
    t.check(index_at_zero(M, tf) == zero_block, "index at 0 equals the largest nilpotent block")


def _suite_profile(t: _Trial, rng, profile, tf):
    op = _gen_operator(rng, profile)
    t.instance = _describe(op)
    p = spectral_profile(op, tf)
    poles = p.poles.as_set()
    t.check(_set_equal(p.sigma, union(p.drazin_spectrum, poles), tf), "sigma = sigma_DR u poles")
    t.check(disjoint(p.drazin_spectrum, poles, tf), "sigma_DR and poles are disjoint")
    t.check(_set_equal(p.drazin_spectrum, union(p.acc, p.ies), tf), "sigma_DR = acc u IES")
    t.check(includes(p.iso, p.ies, tf), "IES inside iso")
    t.check(disjoint(p.ies, poles, tf), "IES and poles are disjoint")
    t.check(includes(p.ld_spectrum, p.asc_spectrum, tf), "sigma_asc inside sigma_LD")
    t.check(includes(p.drazin_spectrum, p.ld_spectrum, tf), "sigma_LD inside sigma_DR")
    t.check(includes(p.rd_spectrum, p.dsc_spectrum, tf), "sigma_dsc inside sigma_RD")
    t.check(includes(p.drazin_spectrum, p.rd_spectrum, tf), "sigma_RD inside sigma_DR")
    t.check(p.algebraic == p.drazin_spectrum.is_empty(), "algebraic iff sigma_DR empty")
    t.check(p.countable == is_countable(p.drazin_spectrum), "countable sigma iff countable sigma_DR")
    q = spectral_profile(combine("adjoint", op), tf)
    t.check(_set_equal(q.sigma, conjugate_set(p.sigma), tf), "sigma(T*) = conj sigma(T)")
    t.check(_set_equal(q.drazin_spectrum, conjugate_set(p.drazin_spectrum), tf), "sigma_DR(T*) = conj sigma_DR(T)")
    t.check(_set_equal(q.ies, conjugate_set(p.ies), tf), "IES(T*) = conj IES(T)")
    t.check(pole_relation(q.poles, p.poles.conjugate(), tf), "poles(T*) = conj poles(T)")
    t.check(_set_equal(q.ld_spectrum, conjugate_set(p.rd_spectrum), tf), "sigma_LD(T*) = conj sigma_RD(T)")


def st_ts_fixture() -> tuple[Operator, Operator]:
    return diag((0, 1), (1, INF)), diag((1, INF))


def _suite_fixtures(t: _Trial, rng, profile, tf):
    ST, TS = st_ts_fixture()
    t.instance = "ST = diag { 0: 1, 1: inf }; TS = diag { 1: inf }"
    pst, pts = spectral_profile(ST, tf), spectral_profile(TS, tf)
    t.check(pst.poles.finite == ((ZERO, 1), (ONE, 1)) and not pst.poles.families, f"poles(ST) = {pst.poles}")
    t.check(pts.poles.finite == ((ONE, 1),) and not pts.poles.families, f"poles(TS) = {pts.poles}")
    t.check(pst.drazin_spectrum.is_empty() and pts.drazin_spectrum.is_empty(), "sigma_DR(ST) = sigma_DR(TS) = {}")
    t.check(pole_relation(pst.poles.without(ZERO), pts.poles.without(ZERO), tf), "poles agree off 0")
    _merom_fixtures(t, tf)


SUITES: dict[str, Callable] = {
    "T1": _suite_t1,
    "T2": _suite_t2,
    "T3": _suite_t3,
    "T5": _suite_t5,
    "T6": _suite_t6,
    "MERO": _suite_mero,
    "SMT": _suite_smt,
    "AXIOMS": _suite_axioms,
    "FIXTURES": _suite_fixtures,
    "ORACLE": _suite_oracle,
    "PROFILE": _suite_profile,
}


def run_trial(name: str, derived_seed: int, profile: GeneratorProfile, tf: ToleranceFrame = DEFAULT_TF) -> _Trial:
    t = _Trial()
    SUITES[name](t, trial_rng(derived_seed), profile, tf)
    return t


def _one(args):
    name, trial, profile, tf = args
    seed = derive_seed(profile.seed, trial)
    try:
        t = run_trial(name, seed, profile, tf)
    except OpspecError as exc:
        return trial, seed, None, f"{type(exc).__name__}: {exc}", {}
    return trial, seed, t.instance, t.violations, t.counters


def run_suite(
    name: str,
    trials: int,
    profile: Optional[GeneratorProfile] = None,
    tf: ToleranceFrame = DEFAULT_TF,
    workers: int = 1,
) -> VerificationReport:
    """Run ``trials`` independent instances of a suite and collect a report."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    profile = profile or GeneratorProfile()
    start = time.perf_counter()
    jobs = [(name, k, profile, tf) for k in range(trials)]
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        results = [_one(j) for j in jobs]
    report = VerificationReport(name, trials)
    for trial, seed, instance, outcome, counters in sorted(results, key=lambda r: r[0]):
        if instance is None:
            report.errors.append(TrialError(trial, seed, "", outcome))
            continue
        for violation in outcome:
            report.failures.append(Failure(trial, seed, instance, violation))
        for k, v in counters.items():
            report.counters[k] = report.counters.get(k, 0) + v
    report.seconds = time.perf_counter() - start
    return report


def reproduce(name: str, derived_seed: int, profile: Optional[GeneratorProfile] = None, tf: ToleranceFrame = DEFAULT_TF):
    """Replay one trial: returns ``(instance, violated assertions)``."""
    t = run_trial(name, derived_seed, profile or GeneratorProfile(), tf)
    return t.instance, t.violations
