"""Compare the numba and numpy kernel backends on representative workloads.

    python benchmarks/bench_kernels.py [--repeat 5]

Each workload is checked for agreement between the backends before timing.
"""
import argparse
import time

import numpy as np
from scipy.special import gamma

from nonhered import _kernels_numba as nb
from nonhered import _kernels_numpy as npk
from nonhered.quad import ASYM_KMAX, DEFAULT_NODES, DEFAULT_U0, endpoint_rule


def workloads(rng):
    alpha = 0.5
    s, W = endpoint_rule(DEFAULT_NODES, alpha)
    ga = float(gamma(1.0 + alpha))
    near = rng.uniform(-DEFAULT_U0, DEFAULT_U0, 20000).astype(complex)
    far = rng.uniform(DEFAULT_U0, 2e8, 200000).astype(complex)
    mixed = np.concatenate([near, far, far[:20000] + 0.7j])
    za = np.round(rng.uniform(-5e4, 5e4, 200000))
    zo = rng.uniform(-0.5, 0.5, za.size) + 0j
    ca = 256.0 * 2.0 ** np.arange(12)
    co = np.full(12, 0.5)
    return {
        "master_integral (mixed |u|)": lambda k: k.master_integral(mixed, alpha, s, W, ga,
                                                                   DEFAULT_U0, ASYM_KMAX),
        "master_gj (|u| < U0)": lambda k: k.master_gj(near, s, W),
        "lacunary_product (12 factors)": lambda k: k.lacunary_product(za, zo, ca, co),
    }


def bench(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'workload':34s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, work in workloads(rng).items():
        ref = work(npk)
        got = work(nb)              # also triggers compilation before timing
        diff = float(np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1e-300)))
        t_np = bench(lambda: work(npk), args.repeat)
        t_nb = bench(lambda: work(nb), args.repeat)
        print(f"{name:34s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f} {diff:13.2e}")


if __name__ == "__main__":
    main()
