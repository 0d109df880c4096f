"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--calls 2000]
"""
import argparse
import sys
import timeit

import numpy as np

from cusp_certify import _kernels_py
from cusp_certify.isometry import random_member

try:
    from cusp_certify import _kernels as _compiled
except ImportError:
    _compiled = None


def workload(seed=0, count=32):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = 2 + i % 2
        m = random_member(n, rng, scale=0.6).matrix
        x = np.concatenate([rng.normal(size=2 * (n - 1)), rng.normal(size=2)])
        out.append((m, x))
    return out


def bench(impl, cases, calls, repeat, descents):
    def disp():
        for k in range(calls):
            m, x = cases[k % len(cases)]
            impl.displacement(m, x)

    def desc():
        for m, x in cases[:descents]:
            impl.descend(m, x, 1.0, 1e-6, 1e-12, 200)

    return (min(timeit.repeat(disp, number=1, repeat=repeat)),
            min(timeit.repeat(desc, number=1, repeat=repeat)))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--calls", type=int, default=2000)
    p.add_argument("--descents", type=int, default=8)
    args = p.parse_args(argv)
    cases = workload()
    rows = [("python", _kernels_py)]
    if _compiled is not None:
        rows.insert(0, ("compiled", _compiled))
    else:
        print("compiled kernels unavailable; timing the fallback only", file=sys.stderr)
    timings = {name: bench(impl, cases, args.calls, args.repeat, args.descents) for name, impl in rows}
    print(f"{'backend':<10}{'displacement/call':>20}{'descend/call':>16}")
    for name, (d, s) in timings.items():
        print(f"{name:<10}{d / args.calls * 1e6:>17.2f} us{s / args.descents * 1e3:>13.2f} ms")
    if len(timings) == 2:
        (d0, s0), (d1, s1) = timings["compiled"], timings["python"]
        print(f"speedup: displacement x{d1 / d0:.1f}, descend x{s1 / s0:.1f}")


if __name__ == "__main__":
    main()
