"""Time the numba and numpy flavours of every kernel side by side.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1]

The first numba call of each kernel is a warm-up (JIT compile) and is not
timed.  Both flavours are checked for agreement before timing.
"""
import argparse
import timeit

import numpy as np

from fredres import kernels


def cases(rng, scale):
    def c(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    g = c(40 * scale, 4, 4)
    g[0] += 8 * np.eye(4)
    ar = 0.2 * c(4, 3, 3)
    ar[0] = np.eye(3)
    return {
        "cauchy_product": (c(60 * scale, 4, 4), c(60 * scale, 4, 4), 60 * scale),
        "taylor_inverse": (g, 80 * scale),
        "horner_many": (c(12, 4, 4), c(512 * scale)),
        "inverse_many": (c(512 * scale, 4, 4) + 4 * np.eye(4),),
        "ar_recursion": (ar, c(5000 * scale, 3)),
        "fir_filter": (c(41, 3, 3), c(5000 * scale, 3)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scale", type=int, default=1)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, inputs in cases(rng, args.scale).items():
        inputs = tuple(np.ascontiguousarray(x) if isinstance(x, np.ndarray) else x for x in inputs)
        nb = kernels.IMPLEMENTATIONS["numba"][name]
        npf = kernels.IMPLEMENTATIONS["numpy"][name]
        a, b = nb(*inputs), npf(*inputs)  # warm-up + parity
        if not np.allclose(a, b, atol=1e-8 * max(1.0, np.abs(b).max())):
            raise SystemExit(f"{name}: flavours disagree")
        t_nb = min(timeit.repeat(lambda: nb(*inputs), number=1, repeat=args.repeat)) * 1e3
        t_np = min(timeit.repeat(lambda: npf(*inputs), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<16}{t_nb:>12.3f}{t_np:>12.3f}{t_np / t_nb:>10.1f}x")


if __name__ == "__main__":
    main()
