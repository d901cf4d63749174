"""Compare the compiled and pure-Python cube kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--suite]

Kernel timings call each backend module directly on the same random
masks.  ``--suite`` also times one exhaustive lemma run per backend in a
subprocess (the backend is fixed at import, so it needs a fresh process).
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from cohult import kernels

CASES = [
    # (base size, source arity, target arity): tables project the target cube onto the source
    (2, 2, 3),
    (2, 3, 5),
    (3, 2, 3),
    (4, 1, 3),
    (8, 1, 2),
]

SUITE_SNIPPET = (
    "import time; from cohult import kernels; from cohult.acceptance import lemma_report;"
    "t=time.perf_counter(); lemma_report(2, 2, 2, ['nicefull', 'duud', 'extfip']);"
    "print(kernels.BACKEND, time.perf_counter()-t)"
)


def kernel_rows(repeat: int, number: int, seed: int = 0):
    rng = random.Random(seed)
    mods = kernels.backends()
    rows = []
    for k, src, dst in CASES:
        tab = kernels.table(k, dst, tuple(range(src)))
        n_src, n_dst = k ** src, len(tab)
        masks_src = [rng.getrandbits(n_src) for _ in range(16)]
        masks_dst = [rng.getrandbits(n_dst) for _ in range(16)]
        calls = {
            "pullback": lambda m: [m.pullback(x, tab) for x in masks_src],
            "pushforward": lambda m: [m.pushforward(x, tab) for x in masks_dst],
            "fullify": lambda m: [m.fullify(x, tab) for x in masks_dst],
            "coherence_scan": lambda m: [m.coherence_scan(x, y, tab, n_src) for x, y in zip(masks_src, masks_dst)],
        }
        for name, fn in calls.items():
            times = {}
            results = {}
            for backend, mod in mods.items():
                results[backend] = fn(mod)
                best = min(timeit.repeat(lambda: fn(mod), repeat=repeat, number=number))
                times[backend] = best / (number * 16) * 1e6
            if len({repr(r) for r in results.values()}) != 1:
                raise AssertionError(f"backends disagree on {name} for {(k, src, dst)}")
            rows.append(((k, src, dst), name, times))
    return rows


def suite_times():
    out = {}
    for backend, env in (("cython", {}), ("python", {"COHULT_PURE_PYTHON": "1"})):
        proc = subprocess.run(
            [sys.executable, "-c", SUITE_SNIPPET],
            env={**os.environ, **env},
            capture_output=True,
            text=True,
            check=True,
        )
        name, secs = proc.stdout.split()
        out[name] = float(secs)
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--number", type=int, default=200)
    p.add_argument("--suite", action="store_true", help="also time a lemma-suite run per backend")
    args = p.parse_args(argv)

    print(f"default backend: {kernels.BACKEND}")
    backends = list(kernels.backends())
    header = f"{'case':>12}  {'kernel':<15}" + "".join(f"{b + ' us':>12}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for case, name, times in kernel_rows(args.repeat, args.number):
        line = f"{str(case):>12}  {name:<15}" + "".join(f"{times[b]:12.3f}" for b in backends)
        if len(backends) > 1:
            line += f"{times['python'] / times['cython']:9.1f}x"
        print(line)
    if args.suite:
        for name, secs in suite_times().items():
            print(f"lemma suites (|A|<=2, lam<=2, arity<=2) with {name}: {secs:.2f} s")


if __name__ == "__main__":
    main()
