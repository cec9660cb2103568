"""Time the numba kernels against the numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best time of each backend and the
speedup.  The first numba call (compilation) is excluded.
"""

import argparse
import timeit

import numpy as np

from circquad import _kernels


def cases(rng):
    coeffs = rng.standard_normal(60) + 1j * rng.standard_normal(60)
    z = np.exp(2j * np.pi * rng.random(20000))
    z_small = z[:64]
    delta = (-1.0) ** np.arange(1, 101) * 0.9 ** (np.arange(1, 101) / 2)
    angles = np.sort(2 * np.pi * rng.random(22))
    return {
        "horner (deg 59, 20000 pts)": lambda impl: impl.horner(coeffs, z),
        "szego_pair (n=100, 20000 pts)": lambda impl: impl.szego_pair(delta, z),
        "horner (deg 59, 64 pts)": lambda impl: impl.horner(coeffs, z_small),
        "szego_pair (n=100, 64 pts)": lambda impl: impl.szego_pair(delta, z_small),
        "subset_search (22 choose 5)": lambda impl: impl.subset_search(angles, 5, 2 * np.pi),
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels.numba_impl is None:
        print("numba is not installed; nothing to compare")
        return
    rng = np.random.default_rng(1)
    for name, fn in cases(rng).items():
        a, b = fn(_kernels.numpy_impl), fn(_kernels.numba_impl)  # warm-up and compile
        for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
            assert np.allclose(x, y), name
        t_np = min(timeit.repeat(lambda: fn(_kernels.numpy_impl), number=20, repeat=args.repeat)) / 20
        t_nb = min(timeit.repeat(lambda: fn(_kernels.numba_impl), number=20, repeat=args.repeat)) / 20
        print(f"{name:32s} numpy {t_np * 1e3:9.3f} ms   numba {t_nb * 1e3:9.3f} ms   x{t_np / t_nb:6.1f}")


if __name__ == "__main__":
    main()
