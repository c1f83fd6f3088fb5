import random

import pytest
import sympy

from opspec import _pykernels, kernels

try:
    from opspec import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels else [])


def rand_zi(rng, rows, cols, lo=-4, hi=4, zero_prob=0.3):
    re_ = [0 if rng.random() < zero_prob else rng.randint(lo, hi) for _ in range(rows * cols)]
    im_ = [0 if rng.random() < 0.6 else rng.randint(lo, hi) for _ in range(rows * cols)]
    return re_, im_


def sympy_matrix(re_, im_, rows, cols):
    return sympy.Matrix(rows, cols, [r + sympy.I * i for r, i in zip(re_, im_)])


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")
    if _ckernels is not None:
        assert kernels.BACKEND == "cython" or kernels.zi_rank is _pykernels.zi_rank


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_rank_matches_sympy(impl):
    rng = random.Random(11)
    for _ in range(60):
        rows, cols = rng.randint(1, 6), rng.randint(1, 6)
        re_, im_ = rand_zi(rng, rows, cols)
        if rng.random() < 0.4 and rows > 1:
            # force a dependent row
            k = rng.randint(-2, 2)
            re_[-cols:] = [k * v for v in re_[:cols]]
            im_[-cols:] = [k * v for v in im_[:cols]]
        assert impl.zi_rank(re_, im_, rows, cols) == sympy_matrix(re_, im_, rows, cols).rank()


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_matmul_matches_sympy(impl):
    rng = random.Random(12)
    for _ in range(40):
        n, m, p = rng.randint(1, 5), rng.randint(1, 5), rng.randint(1, 5)
        ar, ai = rand_zi(rng, n, m)
        br, bi = rand_zi(rng, m, p)
        cr, ci = impl.zi_matmul(ar, ai, br, bi, n, m, p)
        want = sympy_matrix(ar, ai, n, m) * sympy_matrix(br, bi, m, p)
        assert sympy_matrix(cr, ci, n, p) == want.applyfunc(sympy.expand)


@pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")
def test_compiled_and_pure_agree_on_big_integers():
    rng = random.Random(13)
    for _ in range(20):
        rows = cols = rng.randint(2, 7)
        re_, im_ = rand_zi(rng, rows, cols, -(10**30), 10**30)
        assert _ckernels.zi_rank(re_, im_, rows, cols) == _pykernels.zi_rank(re_, im_, rows, cols)
        a = _ckernels.zi_matmul(re_, im_, re_, im_, rows, rows, rows)
        b = _pykernels.zi_matmul(re_, im_, re_, im_, rows, rows, rows)
        assert list(a[0]) == list(b[0]) and list(a[1]) == list(b[1])


def test_pure_python_fallback_selected_by_environment(monkeypatch):
    import importlib

    monkeypatch.setenv("OPSPEC_PURE_PYTHON", "1")
    try:
        reloaded = importlib.reload(kernels)
        assert reloaded.BACKEND == "python"
        assert reloaded.zi_rank is _pykernels.zi_rank
    finally:
        monkeypatch.delenv("OPSPEC_PURE_PYTHON")
        importlib.reload(kernels)
