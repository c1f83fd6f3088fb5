"""Exact and tolerance-governed calculus for square matrices.

Exact matrices hold Gaussian-rational entries stored as a common
denominator plus integer real/imaginary parts, so products and ranks run on
the integer kernels in :mod:`opspec.kernels`.  Approx matrices are complex
numpy arrays and every rank decision goes through singular values with an
explicit ambiguity window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Sequence, Union

import mpmath
import numpy as np

from . import kernels
from .errors import IrrationalSpectrum, NumericAmbiguity
from .scalars import DEFAULT_TF, ONE, ZERO, ComplexValue, Polynomial, ToleranceFrame, cv

__all__ = [
    "GaussianMatrix",
    "JordanPresentation",
    "DrazinResult",
    "rank",
    "minimal_polynomial",
    "characteristic_polynomial",
    "ascent_descent",
    "drazin_inverse",
    "eigen_clusters",
    "matrix_poles",
    "exact_roots",
    "jordan_block",
]


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class GaussianMatrix:
    """Square matrix, uniformly exact (Gaussian rationals) or approx (complex floats)."""

    __slots__ = ("n", "exact", "_den", "_re", "_im", "_arr", "__dict__")

    def __init__(self, rows, exact=None):
        rows = [list(r) for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        entries = [cv(x) for r in rows for x in r]
        if exact is None:
            exact = all(e.exact for e in entries)
        self.n = n
        self.exact = exact
        if exact:
            if not all(e.exact for e in entries):
                raise ValueError("exact matrix needs exact entries")
            den = reduce(_lcm, (e.re.denominator for e in entries), 1)
            den = reduce(_lcm, (e.im.denominator for e in entries), den)
            self._den = den
            self._re = [int(e.re * den) for e in entries]
            self._im = [int(e.im * den) for e in entries]
            self._arr = None
        else:
            self._arr = np.array([e.to_complex() for e in entries], dtype=complex).reshape(n, n)
            if not np.all(np.isfinite(self._arr)):
                raise ValueError("approx entries must be finite")
            self._den = self._re = self._im = None

    # alternate constructors --------------------------------------------
    @classmethod
    def _from_ints(cls, n: int, den: int, re_, im_) -> "GaussianMatrix":
        obj = cls.__new__(cls)
        obj.n = n
        obj.exact = True
        g = den
        for v in re_:
            if g == 1:
                break
            g = math.gcd(g, v)
        for v in im_:
            if g == 1:
                break
            g = math.gcd(g, v)
        if g > 1:
            den //= g
            re_ = [v // g for v in re_]
            im_ = [v // g for v in im_]
        obj._den, obj._re, obj._im, obj._arr = den, list(re_), list(im_), None
        return obj

    @classmethod
    def from_numpy(cls, arr) -> "GaussianMatrix":
        arr = np.asarray(arr, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("matrix must be square")
        if not np.all(np.isfinite(arr)):
            raise ValueError("approx entries must be finite")
        obj = cls.__new__(cls)
        obj.n = arr.shape[0]
        obj.exact = False
        obj._arr = arr.copy()
        obj._den = obj._re = obj._im = None
        return obj

    @classmethod
    def identity(cls, n: int, exact: bool = True) -> "GaussianMatrix":
        if not exact:
            return cls.from_numpy(np.eye(n, dtype=complex))
        return cls._from_ints(n, 1, [int(i == j) for i in range(n) for j in range(n)], [0] * (n * n))

    @classmethod
    def zeros(cls, n: int, exact: bool = True) -> "GaussianMatrix":
        if not exact:
            return cls.from_numpy(np.zeros((n, n), dtype=complex))
        return cls._from_ints(n, 1, [0] * (n * n), [0] * (n * n))

    @classmethod
    def diagonal(cls, values: Sequence) -> "GaussianMatrix":
        values = [cv(v) for v in values]
        n = len(values)
        return cls([[values[i] if i == j else ZERO for j in range(n)] for i in range(n)])

    # element access --------------------------------------------------------
    def entry(self, i: int, j: int) -> ComplexValue:
        if self.exact:
            k = i * self.n + j
            return ComplexValue(Fraction(self._re[k], self._den), Fraction(self._im[k], self._den), True)
        z = self._arr[i, j]
        return ComplexValue.approx(z.real, z.imag)

    def rows(self) -> list[list[ComplexValue]]:
        return [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]

    def to_numpy(self) -> np.ndarray:
        if not self.exact:
            return self._arr.copy()
        n, d = self.n, self._den
        return np.array(
            [complex(r / d, i / d) for r, i in zip(self._re, self._im)], dtype=complex
        ).reshape(n, n)

    def to_approx(self) -> "GaussianMatrix":
        return self if not self.exact else GaussianMatrix.from_numpy(self.to_numpy())

    def int_form(self):
        """(denominator, real ints, imaginary ints), exact matrices only."""
        return self._den, self._re, self._im

    # arithmetic --------------------------------------------------------------
    def _check(self, other: "GaussianMatrix"):
        if not isinstance(other, GaussianMatrix):
            raise TypeError("expected GaussianMatrix")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __matmul__(self, other: "GaussianMatrix") -> "GaussianMatrix":
        self._check(other)
        if self.exact and other.exact:
            n = self.n
            cr, ci = kernels.zi_matmul(self._re, self._im, other._re, other._im, n, n, n)
            return GaussianMatrix._from_ints(n, self._den * other._den, cr, ci)
        return GaussianMatrix.from_numpy(self.to_numpy() @ other.to_numpy())

    def _lin(self, other: "GaussianMatrix", sign: int) -> "GaussianMatrix":
        self._check(other)
        if self.exact and other.exact:
            d = _lcm(self._den, other._den)
            a, b = d // self._den, d // other._den
            re_ = [a * x + sign * b * y for x, y in zip(self._re, other._re)]
            im_ = [a * x + sign * b * y for x, y in zip(self._im, other._im)]
            return GaussianMatrix._from_ints(self.n, d, re_, im_)
        return GaussianMatrix.from_numpy(self.to_numpy() + sign * other.to_numpy())

    def __add__(self, other):
        return self._lin(other, 1)

    def __sub__(self, other):
        return self._lin(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "GaussianMatrix":
        c = cv(c)
        if self.exact and c.exact:
            cd = _lcm(c.re.denominator, c.im.denominator)
            cr, ci = int(c.re * cd), int(c.im * cd)
            re_ = [cr * x - ci * y for x, y in zip(self._re, self._im)]
            im_ = [cr * y + ci * x for x, y in zip(self._re, self._im)]
            return GaussianMatrix._from_ints(self.n, self._den * cd, re_, im_)
        return GaussianMatrix.from_numpy(self.to_numpy() * c.to_complex())

    def shift(self, lam) -> "GaussianMatrix":
        """``self - lam * I``."""
        lam = cv(lam)
        base = self if (self.exact and lam.exact) else self.to_approx()
        return base - GaussianMatrix.identity(self.n, base.exact).scale(lam)

    def __pow__(self, k: int) -> "GaussianMatrix":
        if k < 0:
            raise ValueError("negative matrix powers are not supported")
        result = GaussianMatrix.identity(self.n, self.exact)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def conj_transpose(self) -> "GaussianMatrix":
        n = self.n
        if self.exact:
            re_ = [self._re[j * n + i] for i in range(n) for j in range(n)]
            im_ = [-self._im[j * n + i] for i in range(n) for j in range(n)]
            return GaussianMatrix._from_ints(n, self._den, re_, im_)
        return GaussianMatrix.from_numpy(self._arr.conj().T)

    def transpose(self) -> "GaussianMatrix":
        n = self.n
        if self.exact:
            re_ = [self._re[j * n + i] for i in range(n) for j in range(n)]
            im_ = [self._im[j * n + i] for i in range(n) for j in range(n)]
            return GaussianMatrix._from_ints(n, self._den, re_, im_)
        return GaussianMatrix.from_numpy(self._arr.T)

    def kron(self, other: "GaussianMatrix") -> "GaussianMatrix":
        """Kronecker product ``self (x) other``."""
        if self.exact and other.exact:
            n, m = self.n, other.n
            N = n * m
            re_ = [0] * (N * N)
            im_ = [0] * (N * N)
            for i in range(n):
                for j in range(n):
                    ar, ai = self._re[i * n + j], self._im[i * n + j]
                    if ar == 0 and ai == 0:
                        continue
                    for k in range(m):
                        for l in range(m):
                            br, bi = other._re[k * m + l], other._im[k * m + l]
                            idx = (i * m + k) * N + (j * m + l)
                            re_[idx] = ar * br - ai * bi
                            im_[idx] = ar * bi + ai * br
            return GaussianMatrix._from_ints(N, self._den * other._den, re_, im_)
        return GaussianMatrix.from_numpy(np.kron(self.to_numpy(), other.to_numpy()))

    def is_zero(self) -> bool:
        if self.exact:
            return not any(self._re) and not any(self._im)
        return not np.any(self._arr)

    def is_hermitian(self) -> bool:
        return self == self.conj_transpose()

    def norm(self) -> float:
        """Spectral norm (largest singular value)."""
        arr = self.to_numpy()
        if arr.size == 0:
            return 0.0
        return float(np.linalg.norm(arr, 2))

    def __eq__(self, other):
        if not isinstance(other, GaussianMatrix):
            return NotImplemented
        if self.n != other.n:
            return False
        if self.exact and other.exact:
            return (self._den, self._re, self._im) == (other._den, other._re, other._im)
        return bool(np.array_equal(self.to_numpy(), other.to_numpy()))

    def __hash__(self):
        if self.exact:
            return hash((self.n, self._den, tuple(self._re), tuple(self._im)))
        return hash((self.n, self._arr.tobytes()))

    def __reduce__(self):
        if self.exact:
            return (GaussianMatrix._from_ints, (self.n, self._den, self._re, self._im))
        return (GaussianMatrix.from_numpy, (self._arr,))

    def __repr__(self):
        return f"GaussianMatrix({format_matrix(self)})"

    def __str__(self):
        return format_matrix(self)


def format_matrix(M: GaussianMatrix) -> str:
    return "[" + ",".join("[" + ",".join(str(e) for e in row) + "]" for row in M.rows()) + "]"


def jordan_block(lam, size: int) -> GaussianMatrix:
    lam = cv(lam)
    return GaussianMatrix(
        [[lam if i == j else (ONE if j == i + 1 else ZERO) for j in range(size)] for i in range(size)]
    )


def block_diag(*blocks: GaussianMatrix) -> GaussianMatrix:
    n = sum(b.n for b in blocks)
    rows = [[ZERO] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i in range(b.n):
            for j in range(b.n):
                rows[off + i][off + j] = b.entry(i, j)
        off += b.n
    return GaussianMatrix(rows)


# ---------------------------------------------------------------------------
# exact elimination on ComplexValue rows (small dimensions)


def _rref(rows: list[list[ComplexValue]]):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    A = [list(r) for r in rows]
    m = len(A)
    ncols = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, m) if not A[i][c].is_zero()), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = ONE / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and not A[i][c].is_zero():
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def _nullspace(rows: list[list[ComplexValue]]) -> list[list[ComplexValue]]:
    ncols = len(rows[0])
    R, pivots = _rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def _inverse_exact(M: GaussianMatrix) -> GaussianMatrix:
    n = M.n
    aug = [row + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(M.rows())]
    R, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return GaussianMatrix([r[n:] for r in R])


def inverse(M: GaussianMatrix) -> GaussianMatrix:
    if M.exact:
        return _inverse_exact(M)
    return GaussianMatrix.from_numpy(np.linalg.inv(M.to_numpy()))


# ---------------------------------------------------------------------------
# rank decisions


def _approx_rank_array(arr: np.ndarray, tf: ToleranceFrame) -> int:
    if arr.size == 0:
        return 0
    s = np.linalg.svd(arr, compute_uv=False)
    smax = float(s[0]) if len(s) else 0.0
    if smax == 0.0:
        return 0
    thresh = tf.eps_rank * smax
    amb = [x for x in s if thresh / 10 < x < thresh * 10]
    if amb:
        raise NumericAmbiguity(
            f"singular value {amb[0]:.3e} within the ambiguity window around {thresh:.3e}"
        )
    return int(np.sum(s > thresh))


def rank(M: GaussianMatrix, tf: ToleranceFrame = DEFAULT_TF) -> int:
    if M.exact:
        return kernels.zi_rank(M._re, M._im, M.n, M.n)
    return _approx_rank_array(M.to_numpy(), tf)


def _rect_rank_exact(cols: list[GaussianMatrix]) -> int:
    """Rank of the n^2 x k matrix whose columns are vec(cols[i])."""
    dens = [c._den for c in cols]
    L = reduce(_lcm, dens, 1)
    N = cols[0].n ** 2
    k = len(cols)
    re_ = [0] * (N * k)
    im_ = [0] * (N * k)
    for j, c in enumerate(cols):
        f = L // c._den
        for i in range(N):
            re_[i * k + j] = c._re[i] * f
            im_[i * k + j] = c._im[i] * f
    return kernels.zi_rank(re_, im_, N, k)


# ---------------------------------------------------------------------------
# Jordan presentations


@dataclass(frozen=True)
class JordanPresentation:
    """``M = S J S^-1`` with J given by eigenvalues and Jordan block sizes."""

    eigen_data: tuple  # ((lambda, (s1, s2, ...)), ...)
    similarity: GaussianMatrix

    def __post_init__(self):
        data = tuple((cv(lam), tuple(int(s) for s in sizes)) for lam, sizes in self.eigen_data)
        object.__setattr__(self, "eigen_data", data)
        lams = [lam for lam, _ in data]
        if len(set(lams)) != len(lams):
            raise ValueError("eigenvalues in a Jordan presentation must be distinct")
        if any(not lam.exact for lam in lams):
            raise ValueError("Jordan eigenvalues must be exact")
        if any(s < 1 for _, sizes in data for s in sizes) or any(not sizes for _, sizes in data):
            raise ValueError("Jordan block sizes must be positive")
        n = sum(sum(sizes) for _, sizes in data)
        if self.similarity.n != n:
            raise ValueError(f"similarity has dimension {self.similarity.n}, blocks sum to {n}")
        if not self.similarity.exact:
            raise ValueError("similarity must be exact")
        if rank(self.similarity) != n:
            raise ValueError("similarity must be invertible")

    @classmethod
    def diagonal_form(cls, eigen_data) -> "JordanPresentation":
        n = sum(sum(sizes) for _, sizes in eigen_data)
        return cls(tuple(eigen_data), GaussianMatrix.identity(n))

    @property
    def n(self) -> int:
        return self.similarity.n

    def jordan_matrix(self) -> GaussianMatrix:
        return block_diag(*[jordan_block(lam, s) for lam, sizes in self.eigen_data for s in sizes])

    @cached_property
    def similarity_inverse(self) -> GaussianMatrix:
        return _inverse_exact(self.similarity)

    @cached_property
    def _matrix(self) -> GaussianMatrix:
        S = self.similarity
        return S @ self.jordan_matrix() @ self.similarity_inverse

    def matrix(self) -> GaussianMatrix:
        return self._matrix

    def largest_block(self, lam) -> int:
        lam = cv(lam)
        for mu, sizes in self.eigen_data:
            if mu == lam:
                return max(sizes)
        return 0

    def eigenvalues(self) -> list[tuple[ComplexValue, int]]:
        return sorted(
            ((lam, sum(sizes)) for lam, sizes in self.eigen_data), key=lambda t: t[0].sort_key()
        )

    def conj_transpose(self) -> "JordanPresentation":
        """Presentation of M* (Jordan data of the adjoint, with its similarity)."""
        # M* = S^-* J^* S^*; J^* is similar to conj(J) via the block-reversal permutation
        blocks = []
        for lam, sizes in self.eigen_data:
            blocks.extend((lam, s) for s in sizes)
        n = self.n
        perm_rows = [[ZERO] * n for _ in range(n)]
        off = 0
        for _, s in blocks:
            for i in range(s):
                perm_rows[off + i][off + s - 1 - i] = ONE
            off += s
        P = GaussianMatrix(perm_rows)
        S_adj = self.similarity_inverse.conj_transpose() @ P
        data = tuple((lam.conjugate(), sizes) for lam, sizes in self.eigen_data)
        return JordanPresentation(data, S_adj)


MatrixLike = Union[GaussianMatrix, JordanPresentation]


def as_matrix(M: MatrixLike) -> GaussianMatrix:
    return M.matrix() if isinstance(M, JordanPresentation) else M


# ---------------------------------------------------------------------------
# polynomials


def characteristic_polynomial(M: GaussianMatrix) -> Polynomial:
    """Faddeev-LeVerrier recursion; exact for exact M."""
    n = M.n
    if not M.exact:
        coeffs = np.poly(M.to_numpy())  # highest degree first
        return Polynomial([ComplexValue.from_complex(complex(c)) for c in reversed(coeffs)])
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    Mk = GaussianMatrix.zeros(n)
    I_n = GaussianMatrix.identity(n)
    c_prev = ONE
    for k in range(1, n + 1):
        Mk = M @ Mk + I_n.scale(c_prev)
        AM = M @ Mk
        tr = sum((AM.entry(i, i) for i in range(n)), ZERO)
        c_prev = -tr / k
        coeffs[n - k] = c_prev
    return Polynomial(coeffs)


def minimal_polynomial(M: MatrixLike, tf: ToleranceFrame = DEFAULT_TF) -> Polynomial:
    """Monic annihilating polynomial of least degree."""
    if isinstance(M, JordanPresentation):
        return Polynomial.from_roots([(lam, max(sizes)) for lam, sizes in M.eigen_data])
    n = M.n
    powers = [GaussianMatrix.identity(n, M.exact)]
    for k in range(1, n + 1):
        powers.append(powers[-1] @ M)
        if M.exact:
            if _rect_rank_exact(powers) == k + 1:
                continue
            cols = [[p.entry(i // n, i % n) for p in powers] for i in range(n * n)]
            null = _nullspace(cols)
            v = null[0]
            lead = v[k]
            return Polynomial([x / lead for x in v])
        A = np.stack([p.to_numpy().reshape(-1) for p in powers], axis=1)
        if _approx_rank_array(A, tf) == k + 1:
            continue
        sol, *_ = np.linalg.lstsq(A[:, :k], -A[:, k], rcond=None)
        return Polynomial([ComplexValue.from_complex(complex(c)) for c in sol] + [ONE])
    raise AssertionError("Cayley-Hamilton bound exceeded")  # pragma: no cover


def eval_polynomial(p: Polynomial, M: GaussianMatrix) -> GaussianMatrix:
    """Horner evaluation ``p(M)``."""
    n = M.n
    exact = M.exact and p.exact
    base = M if exact else M.to_approx()
    acc = GaussianMatrix.zeros(n, exact)
    I_n = GaussianMatrix.identity(n, exact)
    for c in reversed(p.coeffs):
        acc = acc @ base + I_n.scale(c)
    return acc


def exact_roots(p: Polynomial) -> list[tuple[ComplexValue, int]]:
    """All roots of an exact polynomial with multiplicities, if they are Gaussian rationals.

    Raises :class:`IrrationalSpectrum` otherwise.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    if p.degree == 0:
        return []
    g = p.divmod(p.gcd(p.derivative()))[0].monic()
    # denominators of roots divide the norm of the leading coefficient of the
    # Gaussian-integer scaled square-free part
    den = 1
    for c in g.coeffs:
        den = _lcm(den, _lcm(c.re.denominator, c.im.denominator))
    lead = g.lead() * den
    norm = int(lead.abs2())
    dps = 40 + 2 * len(str(norm)) + 2 * max(
        len(str(int(abs(c.re * den)) + int(abs(c.im * den)))) for c in g.coeffs
    )
    roots = []
    if g.degree == 1:
        candidates = [-g.coeff(0) / g.coeff(1)]
    else:
        with mpmath.workdps(dps):
            mc = [
                mpmath.mpc(mpmath.mpf(c.re.numerator) / c.re.denominator,
                           mpmath.mpf(c.im.numerator) / c.im.denominator)
                for c in reversed(g.coeffs)
            ]
            try:
                approx = mpmath.polyroots(mc, maxsteps=500, extraprec=4 * dps)
            except mpmath.libmp.NoConvergence as exc:
                raise IrrationalSpectrum("root isolation did not converge") from exc
            candidates = []
            for r in approx:
                re_ = Fraction(int(mpmath.nint(mpmath.re(r) * norm)), norm)
                im_ = Fraction(int(mpmath.nint(mpmath.im(r) * norm)), norm)
                candidates.append(ComplexValue(re_, im_, True))
    for z in candidates:
        if not g(z).is_zero():
            raise IrrationalSpectrum(f"eigenvalue near {z} is not a Gaussian rational")
        roots.append((z, p.multiplicity(z)))
    if sum(m for _, m in roots) != p.degree:
        raise IrrationalSpectrum("exact factorization over the Gaussian rationals failed")
    return sorted(roots, key=lambda t: t[0].sort_key())


# ---------------------------------------------------------------------------
# ascent, descent, Drazin inverse


def _power_ranks(A: GaussianMatrix, tf: ToleranceFrame, upto: int) -> list[int]:
    ranks = [A.n]
    P = GaussianMatrix.identity(A.n, A.exact)
    for _ in range(upto):
        P = P @ A
        ranks.append(rank(P, tf))
    return ranks


def ascent_descent(M: GaussianMatrix, lam, tf: ToleranceFrame = DEFAULT_TF) -> tuple[int, int]:
    """Least n where kernels (resp. ranges) of powers of ``M - lam`` stop changing."""
    M = as_matrix(M)
    A = M.shift(lam)
    n = A.n
    ranks = [n]
    P = GaussianMatrix.identity(n, A.exact)
    ascent = descent = None
    k = 0
    while ascent is None or descent is None:
        if k > n:
            raise AssertionError("power stabilization exceeded the dimension")  # pragma: no cover
        P = P @ A
        ranks.append(rank(P, tf))
        nullity_k, nullity_k1 = n - ranks[k], n - ranks[k + 1]
        if ascent is None and nullity_k == nullity_k1:
            ascent = k
        if descent is None and ranks[k] == ranks[k + 1]:
            descent = k
        k += 1
    return ascent, descent


def index_at_zero(M: GaussianMatrix, tf: ToleranceFrame = DEFAULT_TF) -> int:
    return ascent_descent(M, ZERO, tf)[0]


@dataclass(frozen=True)
class DrazinResult:
    inverse: GaussianMatrix
    index: int


def _jordan_block_inverse(lam: ComplexValue, s: int) -> GaussianMatrix:
    # (lam I + N)^-1 = sum_j (-1)^j lam^-(j+1) N^j
    rows = [[ZERO] * s for _ in range(s)]
    for i in range(s):
        for j in range(i, s):
            k = j - i
            rows[i][j] = ((-1) ** k) * (ONE / lam ** (k + 1))
    return GaussianMatrix(rows)


def drazin_inverse(M: MatrixLike, tf: ToleranceFrame = DEFAULT_TF) -> DrazinResult:
    """Drazin inverse by the core-nilpotent split at eigenvalue 0."""
    if isinstance(M, JordanPresentation):
        blocks = []
        for lam, sizes in M.eigen_data:
            for s in sizes:
                if lam.is_zero():
                    blocks.append(GaussianMatrix.zeros(s))
                else:
                    blocks.append(_jordan_block_inverse(lam, s))
        JD = block_diag(*blocks)
        X = M.similarity @ JD @ M.similarity_inverse
        return DrazinResult(X, M.largest_block(ZERO))
    n = M.n
    k = index_at_zero(M, tf)
    if k == 0:
        return DrazinResult(inverse(M), 0)
    Ak = M ** k
    if M.exact:
        R, pivots = _rref(Ak.rows())
        r = len(pivots)
        if r == 0:
            return DrazinResult(GaussianMatrix.zeros(n), k)
        cols = Ak.rows()
        range_basis = [[cols[i][p] for i in range(n)] for p in pivots]
        null_basis = _nullspace(Ak.rows())
        basis = range_basis + null_basis
        P = GaussianMatrix([[basis[j][i] for j in range(n)] for i in range(n)])
        Pinv = _inverse_exact(P)
        B = Pinv @ M @ P
        core = GaussianMatrix([[B.entry(i, j) for j in range(r)] for i in range(r)])
        core_inv = _inverse_exact(core)
        padded = block_diag(core_inv, GaussianMatrix.zeros(n - r))
        return DrazinResult(P @ padded @ Pinv, k)
    arr = Ak.to_numpy()
    r = _approx_rank_array(arr, tf)
    if r == 0:
        return DrazinResult(GaussianMatrix.zeros(n, False), k)
    U, s, Vh = np.linalg.svd(arr)
    P = np.concatenate([U[:, :r], Vh[r:].conj().T], axis=1)
    Pinv = np.linalg.inv(P)
    B = Pinv @ M.to_numpy() @ P
    padded = np.zeros((n, n), dtype=complex)
    padded[:r, :r] = np.linalg.inv(B[:r, :r])
    return DrazinResult(GaussianMatrix.from_numpy(P @ padded @ Pinv), k)


def drazin_residuals(M: GaussianMatrix, X: GaussianMatrix, m: int) -> tuple[float, float, float]:
    """Norms of M^m X M - M^m, X M X - X and M X - X M."""
    Mm = M ** m
    r1 = Mm @ X @ M - Mm
    r2 = X @ M @ X - X
    r3 = M @ X - X @ M
    return tuple(float(np.linalg.norm(r.to_numpy(), 2)) if r.n else 0.0 for r in (r1, r2, r3))


def drazin_axioms_exact(M: GaussianMatrix, X: GaussianMatrix, m: int) -> bool:
    Mm = M ** m
    return (Mm @ X @ M == Mm) and (X @ M @ X == X) and (M @ X == X @ M)


# ---------------------------------------------------------------------------
# spectra


def eigen_clusters(M: MatrixLike, tf: ToleranceFrame = DEFAULT_TF) -> list[tuple[ComplexValue, int]]:
    """Eigenvalues with algebraic multiplicities, sorted by (re, im)."""
    if isinstance(M, JordanPresentation):
        return M.eigenvalues()
    if M.exact:
        return exact_roots(characteristic_polynomial(M))
    vals = np.linalg.eigvals(M.to_numpy()) if M.n else np.array([])
    clusters: list[list[complex]] = []
    for v in sorted(vals, key=lambda z: (z.real, z.imag)):
        hit = [c for c in clusters if any(abs(v - w) <= tf.eps_cluster for w in c)]
        if not hit:
            clusters.append([v])
            continue
        merged = [v]
        for c in hit:
            merged.extend(c)
            clusters.remove(c)
        clusters.append(merged)
    out = [(ComplexValue.from_complex(complex(np.mean(c))), len(c)) for c in clusters]
    return sorted(out, key=lambda t: t[0].sort_key())


def matrix_poles(M: MatrixLike, tf: ToleranceFrame = DEFAULT_TF) -> list[tuple[ComplexValue, int]]:
    """Poles of the resolvent with orders (= ascent at each eigenvalue)."""
    if isinstance(M, JordanPresentation):
        return sorted(
            ((lam, max(sizes)) for lam, sizes in M.eigen_data), key=lambda t: t[0].sort_key()
        )
    return [(lam, ascent_descent(M, lam, tf)[0]) for lam, _ in eigen_clusters(M, tf)]
