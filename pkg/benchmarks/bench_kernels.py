"""Compare the compiled and pure-Python Gaussian-integer kernels.

    python benchmarks/bench_kernels.py [--repeat N] [--sizes 4 8 16 32]

Reports the best-of-N wall time of ``zi_rank`` and ``zi_matmul`` for each
backend on random dense matrices with entries in [-50, 50] + [-50, 50]i.
"""

from __future__ import annotations

import argparse
import random
import timeit

from opspec import _pykernels

try:
    from opspec import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def random_zi(rng: random.Random, n: int):
    re_ = [rng.randint(-50, 50) for _ in range(n * n)]
    im_ = [rng.randint(-50, 50) for _ in range(n * n)]
    return re_, im_


def best(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05 and number < 10_000:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32])
    args = parser.parse_args(argv)

    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled extension not built; timing the pure-Python kernels only")

    rng = random.Random(0)
    print(f"{'kernel':10s} {'n':>4s} " + " ".join(f"{b:>12s}" for b in backends) + "   speedup")
    for n in args.sizes:
        re_, im_ = random_zi(rng, n)
        br, bi = random_zi(rng, n)
        cases = {
            "zi_rank": lambda m: m.zi_rank(re_, im_, n, n),
            "zi_matmul": lambda m: m.zi_matmul(re_, im_, br, bi, n, n, n),
        }
        for name, call in cases.items():
            times = {b: best(lambda m=m: call(m), args.repeat) for b, m in backends.items()}
            speedup = times["python"] / times["cython"] if "cython" in times else float("nan")
            cols = " ".join(f"{t * 1e3:10.3f}ms" for t in times.values())
            print(f"{name:10s} {n:4d} {cols}   {speedup:6.1f}x")


if __name__ == "__main__":
    main()
