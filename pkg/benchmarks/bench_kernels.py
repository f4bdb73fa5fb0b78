"""Compare the numba and numpy kernel backends on representative sizes.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import time

import numpy as np

from mcf_lab.kernels import get_backend


def _best(fn, args, repeat):
    fn(*args)  # warm-up (includes JIT compilation for numba)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def cases(rng):
    n = 4096
    x = np.linspace(-1.2, 1.2, n + 1)
    u = -np.log(np.cos(x))
    ones = np.ones(n - 1)
    zeros = np.zeros(n - 1)
    yield "graph_rhs[4097]", "graph_rhs", (u, x[1] - x[0], ones, zeros, zeros)

    th = 2 * np.pi * np.arange(1024) / 1024
    pts = np.ascontiguousarray(np.column_stack([np.cos(th), np.sin(th)]))
    r = np.zeros(1024)
    yield "polyline_velocity[1024]", "polyline_velocity", (pts, True, r, r, r)
    yield "self_intersects[1024]", "self_intersects", (pts, True)

    q = np.ascontiguousarray(pts * 1.01)
    yield "point_polyline_distance[1024x1024]", "point_polyline_distance", (q, pts, True)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    np_mod, nb_mod = get_backend("numpy"), get_backend("numba")
    print(f"{'kernel':36s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speed-up':>9s}")
    for label, name, a in cases(np.random.default_rng(0)):
        t_np = _best(getattr(np_mod, name), a, args.repeat)
        t_nb = _best(getattr(nb_mod, name), a, args.repeat)
        print(f"{label:36s} {1e3 * t_np:12.3f} {1e3 * t_nb:12.3f} {t_np / t_nb:9.1f}x")


if __name__ == "__main__":
    main()
