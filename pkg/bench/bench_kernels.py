"""Time the compiled kernels against the numpy fallback.

    python bench/bench_kernels.py [--repeat 5]

Inputs mirror the library's hot paths: the 601x601 quasi-density sum
behind the quantum characteristic function, a 1-D inversion on 4001
points, and K0 on the 800-point product-density figure grid.
"""

import argparse
import statistics
import time

import numpy as np

from spectral_rv import _kernels_py

try:
    from spectral_rv import _kernels as compiled
except ImportError:
    compiled = None


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def cases():
    rng = np.random.default_rng(0)
    g = np.linspace(-6, 6, 601)
    X, Y = np.meshgrid(g, g, indexing="ij")
    x2d = (X + Y).ravel()
    w2d = (rng.standard_normal(x2d.size) + 1j * rng.standard_normal(x2d.size)) * 1e-4
    s81 = np.linspace(-4, 4, 81)
    s1d = np.linspace(0, 10, 4001)
    w1d = np.exp(-s1d**2 / 2) + 0j
    y1d = np.linspace(-8, 8, 4001)
    k0x = np.abs(np.concatenate([np.arange(-400, 0), np.arange(1, 401)]) / 100.0) * 2
    return [
        ("fourier_sum 361201 x 81", "fourier_sum", (x2d, w2d, s81, 1.0)),
        ("fourier_sum 4001 x 4001", "fourier_sum", (s1d, w1d, y1d, -1.0)),
        ("bessel_k0 800 points", "bessel_k0", (k0x, 2.0)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; only the fallback is timed")
    print(f"{'case':<28}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}{'max |diff|':>13}")
    for label, name, inputs in cases():
        py_fn = getattr(_kernels_py, name)
        t_py, _ = best_time(lambda: py_fn(*inputs), args.repeat)
        if compiled is None:
            print(f"{label:<28}{t_py:>12.4f}{'-':>14}{'-':>10}{'-':>13}")
            continue
        c_fn = getattr(compiled, name)
        t_c, _ = best_time(lambda: c_fn(*inputs), args.repeat)
        diff = float(np.max(np.abs(np.asarray(py_fn(*inputs)) - np.asarray(c_fn(*inputs)))))
        print(f"{label:<28}{t_py:>12.4f}{t_c:>14.4f}{t_py / t_c:>10.1f}{diff:>13.2e}")


if __name__ == "__main__":
    main()
