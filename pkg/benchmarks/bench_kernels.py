"""Benchmark the compiled scan/walk kernels against the NumPy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 12,16,20 --repeats 5

Each kernel is timed best-of-N on NK landscapes of growing size and the two
backends are checked for bit-identical output first, so a reported speedup
is never bought with a semantic drift.
"""

import argparse
import time

import numpy as np

from fitscape._kernels import available_backends, get_backend
from fitscape.synthetic import NKSpec, generate_nk

WALKS = 64
WALK_LENGTH = 2048


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def bench_one(n, k, repeats):
    l = generate_nk(NKSpec(n, k, seed=0))
    s = l.space
    g = l.gain
    args = (s.radices, s.place, s.kinds)
    rng = np.random.default_rng(0)
    starts = rng.integers(0, s.cardinality, size=WALKS, dtype=np.int64)
    draws = rng.integers(0, 1 << 63, size=(WALKS, WALK_LENGTH), dtype=np.uint64)

    rows = []
    for kernel, call in (
        ("scan_best", lambda b: b.scan_best(g, *args)),
        ("scan_first", lambda b: b.scan_first(g, *args, 7)),
        ("walk_paths", lambda b: b.walk_paths(*args, starts, draws)),
    ):
        outs = {name: call(get_backend(name)) for name in available_backends()}
        if "compiled" in outs:
            got, want = outs["compiled"], outs["numpy"]
            pair = (got, want) if isinstance(got, tuple) else ((got,), (want,))
            for a, b in zip(*pair):
                assert np.array_equal(a, b), f"{kernel}: backends disagree"
        timings = {name: best_of(lambda: call(get_backend(name)), repeats)
                   for name in available_backends()}
        rows.append((kernel, timings))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="12,16,20",
                        help="comma-separated NK n values (k is fixed at 5)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="repetitions per timing; the best is reported")
    opts = parser.parse_args()
    sizes = [int(v) for v in opts.sizes.split(",")]

    names = available_backends()
    print(f"backends: {', '.join(names)}")
    header = f"{'landscape':<14}{'kernel':<12}" + "".join(
        f"{name:>12}" for name in names)
    if "compiled" in names:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        for kernel, timings in bench_one(n, 5, opts.repeats):
            line = f"{f'NK n={n} k=5':<14}{kernel:<12}"
            for name in names:
                line += f"{timings[name] * 1e3:>10.2f}ms"
            if "compiled" in names:
                line += f"{timings['numpy'] / timings['compiled']:>9.1f}x"
            print(line)


if __name__ == "__main__":
    main()
