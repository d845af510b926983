"""Time the numba kernels against their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.  The numba
column includes nothing of the JIT compilation: every kernel is warmed up
once before timing.
"""

import argparse
import time

import numpy as np

from bergop import _kernels as K
from bergop.criteria import kernel_integral
from bergop.operators import OperatorSymbol
from bergop.weights import RadialWeight


def make_inputs(n_cells, rng):
    r0 = rng.uniform(0.0, 0.9, n_cells)
    r1 = r0 + rng.uniform(1e-4, 0.09, n_cells)
    t0 = rng.uniform(-np.pi, np.pi, n_cells)
    t1 = t0 + rng.uniform(1e-3, 0.5, n_cells)
    x, y, jac = K.cell_points_numpy(0.0, 0.0, r0, r1, t0, t1)
    z = x + 1j * y
    coeffs = rng.standard_normal(41) + 1j * rng.standard_normal(41)
    return {
        "cell_points": (0.0, 0.0, r0, r1, t0, t1),
        "cell_reduce": (np.abs(z) ** 2, jac),
        "horner": (coeffs, z),
        "kernel_power": (0.95 + 0.1j, z, 8.0),
        "pseudo_disk_mask": (z, 0.5 + 0.2j, 0.5),
        "series_sum": (np.abs(z.ravel()), coeffs.real.copy()),
    }


def best_of(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def bench_end_to_end(repeat):
    w = RadialWeight.standard(0.0)
    op = OperatorSymbol.parse("identity")
    out = {}
    for name in ("numpy", "numba"):
        if name == "numba" and not K.HAVE_NUMBA:
            continue
        K.use_backend(name)
        kernel_integral(op, w, 2.0, w, 2.0, 3.0, 0.99)
        out[name] = best_of(lambda: kernel_integral(op, w, 2.0, w, 2.0, 3.0, 1 - 2.0 ** -12), (), repeat)
    K.use_backend("numba" if K.HAVE_NUMBA else "numpy")
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=1500)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        print("numba not importable; only the numpy column is timed")
    inputs = make_inputs(args.cells, np.random.default_rng(0))
    print(f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name in K.KERNELS:
        a = inputs[name]
        t_np = best_of(getattr(K, f"{name}_numpy"), a, args.repeat)
        if K.HAVE_NUMBA:
            fn = getattr(K, f"{name}_numba")
            fn(*a)
            t_nb = best_of(fn, a, args.repeat)
            print(f"{name:<18}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.2f}")
        else:
            print(f"{name:<18}{1e3 * t_np:>12.3f}{'-':>12}{'-':>10}")
    e2e = bench_end_to_end(max(1, args.repeat // 2))
    line = "  ".join(f"{k} {1e3 * v:.1f} ms" for k, v in e2e.items())
    print(f"kernel integral B(a), |a| = 1 - 2^-12: {line}")


if __name__ == "__main__":
    main()
