"""Left and right multiplication operators on the space of n x n matrices.

Matrices ``X`` are flattened row-major (``vec(X)[i*n + j] = X[i][j]``), so
``L_a = a (x) I`` and ``R_a = I (x) a^T``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .matrix import GaussianMatrix, ascent_descent, eigen_clusters, index_at_zero
from .scalars import DEFAULT_TF, ToleranceFrame, ComplexValue

__all__ = ["MultRealization", "realize", "DualityCheck", "DualityReport", "duality_report", "vec", "unvec"]

MAX_EXACT_DIM = 6


@dataclass(frozen=True)
class MultRealization:
    base: GaussianMatrix
    left_mat: GaussianMatrix
    right_mat: GaussianMatrix


def vec(X: GaussianMatrix) -> list[ComplexValue]:
    return [x for row in X.rows() for x in row]


def unvec(v, n: int) -> GaussianMatrix:
    return GaussianMatrix([v[i * n:(i + 1) * n] for i in range(n)])


def realize(a: GaussianMatrix) -> MultRealization:
    eye = GaussianMatrix.identity(a.n, a.exact)
    return MultRealization(a, a.kron(eye), eye.kron(a.transpose()))


@dataclass(frozen=True)
class DualityCheck:
    eigenvalue: ComplexValue
    quantity: str  # e.g. "descent: L_a vs R_a*"
    values: tuple

    @property
    def holds(self) -> bool:
        return len(set(self.values)) == 1


@dataclass(frozen=True)
class DualityReport:
    base: GaussianMatrix
    hermitian: bool
    checks: tuple

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.checks)

    def failures(self) -> list[DualityCheck]:
        return [c for c in self.checks if not c.holds]


def duality_report(a: GaussianMatrix, tf: ToleranceFrame = DEFAULT_TF) -> DualityReport:
    """Compare ascents and descents of ``L_a``, ``R_{a*}`` and friends pointwise."""
    if a.exact and a.n > MAX_EXACT_DIM:
        raise ValueError(f"exact realization is capped at n <= {MAX_EXACT_DIM}")
    L = realize(a).left_mat
    star = realize(a.conj_transpose()).right_mat
    herm = a.is_hermitian()
    R = realize(a).right_mat if herm else None
    checks = []
    for lam, _ in eigen_clusters(a, tf):
        la, ld = ascent_descent(L, lam, tf)
        sa, sd = ascent_descent(star, lam.conjugate(), tf)
        checks.append(DualityCheck(lam, "descent: L_a vs R_a*", (ld, sd)))
        checks.append(DualityCheck(lam, "ascent: L_a vs R_a*", (la, sa)))
        if herm:
            ra, rd = ascent_descent(R, lam, tf)
            aa, ad = ascent_descent(a, lam, tf)
            checks.append(DualityCheck(lam, "ascent: L_a vs R_a vs a", (la, ra, aa)))
            checks.append(DualityCheck(lam, "descent: L_a vs R_a vs a", (ld, rd, ad)))
    zero = ComplexValue(0) if a.exact else ComplexValue.approx(0.0)
    checks.append(DualityCheck(zero, "index at 0: L_a vs a", (index_at_zero(L, tf), index_at_zero(a, tf))))
    return DualityReport(a, herm, tuple(checks))
