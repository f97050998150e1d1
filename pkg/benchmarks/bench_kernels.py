"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are called in the same process through the ``backend`` argument;
the numba timings exclude the first (compiling) call.
"""

import argparse
import time
from itertools import combinations

import numpy as np

from biramanujan import _kernels
from biramanujan._kernels import batch_minors, charpoly_int_batch


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    mats = rng.integers(-2, 3, size=(40_000, 6, 6))
    yield "charpoly_int_batch 40000x6x6", lambda b: charpoly_int_batch(mats, backend=b)
    Q = rng.normal(size=(20_000, 5, 3))
    rows = np.array(list(combinations(range(5), 2)))
    cols = np.array(list(combinations(range(3), 2)))
    yield "batch_minors 20000x5x3 (2x2)", lambda b: batch_minors(Q, rows, cols, backend=b)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    print(f"{'kernel':32} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for name, fn in cases(np.random.default_rng(args.seed)):
        results = {}
        for b in backends:
            fn(b)  # warm-up (numba compiles here)
            results[b] = best_of(lambda: fn(b), args.repeat)
        row = f"{name:32} " + " ".join(f"{results[b] * 1e3:8.1f}ms" for b in backends)
        if "numba" in results:
            row += f"   {results['numpy'] / results['numba']:6.1f}x"
        print(row)


if __name__ == "__main__":
    main()
