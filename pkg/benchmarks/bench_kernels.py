"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 64 128 256 512] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from rtnrt._backend import available_backends, get_backend


def circle(n, r):
    t = 2 * np.pi * np.arange(n) / n
    x = np.ascontiguousarray(r * np.column_stack([np.cos(t), np.sin(t)]))
    nrm = np.ascontiguousarray(x / r)
    w = np.full(n, 2 * np.pi * r / n)
    return x, nrm, w


def cases(n):
    ox, on, ow = circle(n, 1.0)
    gx, gn, gw = circle(n // 2, 0.4)
    pts = np.ascontiguousarray(np.random.default_rng(0).uniform(-1, 1, (n * n, 2)))
    verts = np.array([[-0.5, -0.4], [0.6, -0.3], [0.1, 0.7]])
    return {
        "single_layer": (ox, gx, gw),
        "double_layer": (ox, gx, gn, gw),
        "double_layer_dn": (ox, on, gx, gn, gw),
        "green_disk": (ox, gx, gw),
        "green_disk_dnx_unit": (ox, gx, gw),
        "points_in_convex_polygon": (pts, verts, 1e-12),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256, 512])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    names = available_backends()
    if "cython" not in names:
        print("compiled kernels are not built; only the numpy fallback is available")
    backends = {name: get_backend(name) for name in names}
    print(f"{'kernel':<26}{'n':>6}" + "".join(f"{b + ' ms':>14}" for b in backends) + f"{'speedup':>10}")
    for n in args.sizes:
        for kernel, kargs in cases(n).items():
            times = {}
            for name, ns in backends.items():
                fn = getattr(ns, kernel)
                times[name] = min(timeit.repeat(lambda: fn(*kargs), number=1, repeat=args.repeat)) * 1e3
            row = f"{kernel:<26}{n:>6}" + "".join(f"{times[b]:>14.3f}" for b in backends)
            if len(times) == 2:
                row += f"{times['python'] / times['cython']:>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
