"""Compiled kernels versus the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run on identical inputs under both backends; outputs are
compared before timing so a fast wrong answer cannot win.
"""

import argparse
import math
import sys
import timeit

from afrelay import kernels
from afrelay.channel import ChannelParams
from afrelay.energy import AllocationFactors
from afrelay.geometry import LinkGeometry
from afrelay.montecarlo import TrialConfig, simulate_two_hop

CASES = {
    "grid_min n=200": ("grid_min", ((0.3, 0.3, 0.4), 1.7, 0.4, 1.3, 0.9, 200)),
    "twoway_af_counts 2^15": ("twoway_af_counts",
                              (1, 0, 1 << 15, 0.8, 1.3, 0.7, 0.7, 2.0, 3.0, 4.0, math.sqrt(0.5), False, 0.0, 0.0)),
    "twoway_af_counts LOS 2^15": ("twoway_af_counts",
                                  (1, 0, 1 << 15, 0.8, 1.3, 0.7, 0.7, 2.0, 3.0, 4.0, math.sqrt(0.5), True, 0.2, 0.2)),
    "single_hop_counts 2^15": ("single_hop_counts", (2, 0, 1 << 15, 1.0)),
}


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, float):
        return math.isclose(a, b, rel_tol=1e-12)
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if "compiled" not in kernels.available_backends():
        print("compiled extension not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    py, cc = kernels.get("python"), kernels.get("compiled")
    print(f"{'kernel':28s} {'python ms':>10s} {'compiled ms':>12s} {'speedup':>8s}")
    for label, (name, a) in CASES.items():
        fp, fc = getattr(py, name), getattr(cc, name)
        if not _same(fp(*a), fc(*a)):
            print(f"{label}: backends disagree", file=sys.stderr)
            return 1
        tp = min(timeit.repeat(lambda: fp(*a), number=1, repeat=args.repeat)) * 1e3
        tc = min(timeit.repeat(lambda: fc(*a), number=1, repeat=args.repeat)) * 1e3
        print(f"{label:28s} {tp:10.2f} {tc:12.2f} {tp / tc:7.1f}x")

    # end to end: the compiled loop releases the GIL, so threads scale
    tc_ = TrialConfig(1 << 19, 3)
    alloc = AllocationFactors(0.25, 0.25, 0.5)
    geo = LinkGeometry(1.0, 1.0, 1.0)
    params = ChannelParams(total_power=100.0)
    for threads in (1, 4):
        t = {}
        for b in ("python", "compiled"):
            t[b] = min(timeit.repeat(lambda: simulate_two_hop(tc_, alloc, geo, params, threads=threads, backend=b),
                                     number=1, repeat=max(1, args.repeat // 2))) * 1e3
        label = f"simulate_two_hop 2^19 x{threads}"
        print(f"{label:28s} {t['python']:10.2f} {t['compiled']:12.2f} {t['python'] / t['compiled']:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
