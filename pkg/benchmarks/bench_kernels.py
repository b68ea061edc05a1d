"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--frames 20000]

Times the two hot loops in isolation and one end-to-end block simulation
with each backend swapped in.
"""

import argparse
import math
import time

import numpy as np

from dcsk_relay import Scenario, TwoRayLink, _kernels_py, kernels
from dcsk_relay.schemes import simulate_block

try:
    from dcsk_relay import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_fill(impl, n, repeat):
    out = np.empty(n)
    return best_of(lambda: impl.chebyshev_fill(0.123, out, math.sqrt(2.0)), repeat)


def bench_correlate(impl, rows, beta, repeat):
    rx = np.random.default_rng(0).standard_normal((rows, 2 * beta))
    return best_of(lambda: impl.correlate_halves(rx), repeat)


def bench_block(impl, frames, repeat):
    saved = kernels.chebyshev_fill, kernels.correlate_halves
    kernels.chebyshev_fill, kernels.correlate_halves = impl.chebyshev_fill, impl.correlate_halves
    try:
        sc = Scenario("TimeMux2", 25, TwoRayLink(0.7, 0.89, 3), TwoRayLink(0.82, 0.4, 8),
                      TwoRayLink(0.83, 0.35, 5), ebn0_db=15.0)
        return best_of(lambda: simulate_block(sc, frames, np.random.default_rng(1)), repeat)
    finally:
        kernels.chebyshev_fill, kernels.correlate_halves = saved


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--frames", type=int, default=20000)
    args = ap.parse_args(argv)

    impls = [("python", _kernels_py)]
    if _compiled is not None:
        impls.insert(0, ("compiled", _compiled))
    print(f"active backend: {kernels.BACKEND}")
    cases = [
        ("chebyshev_fill 1e6 chips", lambda m: bench_fill(m, 10**6, args.repeat)),
        ("correlate_halves 20000x50", lambda m: bench_correlate(m, 20000, 25, args.repeat)),
        (f"simulate_block TimeMux2 beta=25, {args.frames} frames", lambda m: bench_block(m, args.frames, args.repeat)),
    ]
    print(f"{'case':48s}" + "".join(f"{name:>12s}" for name, _ in impls) + ("     speedup" if len(impls) > 1 else ""))
    for label, fn in cases:
        ts = [fn(m) for _, m in impls]
        row = f"{label:48s}" + "".join(f"{t * 1e3:10.2f}ms" for t in ts)
        if len(ts) > 1:
            row += f"{ts[1] / ts[0]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
