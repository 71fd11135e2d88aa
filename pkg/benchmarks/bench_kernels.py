"""Compare the compiled and pure-Python kernels on fixed workloads.

    python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Both backends must return identical results; the script exits 1 otherwise.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import timeit

from xidim import kernels
from xidim.space import enumerate_x_tau, pairwise_d_xi


def _ord_workload(width: int, seed: int = 0):
    rng = random.Random(seed)
    masks = sorted({rng.randrange(1, 1 << width) for _ in range(4 * width)})
    return lambda mod: mod.ord_dp(masks, width)


def _matrix_workload():
    pts = enumerate_x_tau((2, 3), [(0, 9)] * 2)
    dist = pairwise_d_xi(pts).tolist()
    return lambda mod: mod.cover_search(dist, [4, 8], 8, 2_000_000)


def _box_workload(tau, side, radii, bound):
    coords = [p.coords for p in enumerate_x_tau(tau, [(0, side)] * len(tau))]
    return lambda mod: mod.cover_search_box(coords, radii, bound, 2_000_000)


WORKLOADS = {
    "ord_dp width 14": _ord_workload(14),
    "ord_dp width 18": _ord_workload(18),
    "cover_search tau=2,3 B=8 window 9": _matrix_workload(),
    "cover_search_box tau=2,3 B=8 window 17": _box_workload((2, 3), 17, [4, 8], 8),
    "cover_search_box tau=3,4 B=16 window 33": _box_workload((3, 4), 33, [8, 16], 16),
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="write timings to this file")
    args = ap.parse_args(argv)
    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled kernels unavailable; only the Python backend is timed")
    rows = []
    ok = True
    for name, work in WORKLOADS.items():
        results = {b: work(mod) for b, mod in backends.items()}
        same = len({repr(r) for r in results.values()}) == 1
        ok &= same
        times = {b: min(timeit.repeat(lambda: work(mod), number=1, repeat=args.repeat))
                 for b, mod in backends.items()}
        speedup = times["python"] / times["cython"] if "cython" in times and times["cython"] else None
        rows.append({"workload": name, "seconds": times, "speedup": speedup, "agree": same})
        cells = "  ".join(f"{b} {t * 1e3:9.2f} ms" for b, t in times.items())
        extra = f"  x{speedup:6.1f}" if speedup else ""
        print(f"{name:42s} {cells}{extra}{'' if same else '  MISMATCH'}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
