"""Compare the compiled and pure-Python EPDA search kernels.

Usage::

    python3 benchmarks/bench_search.py            # quick instances
    python3 benchmarks/bench_search.py --full     # adds a ~10 s pure-Python case

Each row reports the best-of-``--repeat`` wall time per backend, the node
count (identical across backends) and the speedup.
"""
from __future__ import annotations

import argparse
import time

from macc2d import kernels

# (F, K, Z, L, S)
QUICK = [(4, 4, 2, 1, 4), (4, 4, 2, 2, 2), (6, 4, 3, 1, 5), (6, 4, 3, 1, 6)]
FULL = QUICK + [(6, 5, 3, 1, 7)]


def best_time(args, backend, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = kernels.search_kernel(*args, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; only the pure-Python backend is available")
    print(f"{'F K Z L S':>14} {'found':>6} {'nodes':>10} "
          + " ".join(f"{b + ' [s]':>12}" for b in backends) + "  speedup")
    for inst in FULL if args.full else QUICK:
        times, nodes, found = {}, set(), None
        for b in backends:
            times[b], (grid, n) = best_time(inst, b, 1 if b == "python" and args.full else args.repeat)
            nodes.add(n)
            found = grid is not None
        if len(nodes) != 1:
            raise SystemExit(f"backends disagree on node count for {inst}: {sorted(nodes)}")
        speed = (f"{times['python'] / times['cython']:8.1f}x" if "cython" in times
                 and times["cython"] > 0 else "       -")
        print(f"{' '.join(map(str, inst)):>14} {str(found):>6} {nodes.pop():>10} "
              + " ".join(f"{times[b]:12.5f}" for b in backends) + speed)


if __name__ == "__main__":
    main()
