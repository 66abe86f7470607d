"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--vectors 2000] [--degree 8] [--repeat 5] [--json]

Both backends are imported directly, so the environment switch that
selects the default backend plays no role here.
"""

import argparse
import importlib
import json
import sys
import timeit

import numpy as np

from towernorm import _pykernels
from towernorm.shape import make_schedule


def _workloads(kern, params, rows, bases, degree):
    def solve():
        row = params[3]
        for r, u in rows:
            kern.solve_level(r, u, row, 1e-12, 200)

    def chain():
        for b, c in bases:
            kern.level_chain(b, c, params[:degree], 1e-12, 200)

    def partials():
        for b, c in bases:
            per, _ = kern.level_chain(b, c, params[:degree], 1e-12, 200)
            kern.chain_partials(per, c, params[:degree])

    def bisect():
        for b, c in bases[: len(bases) // 10]:
            hi = b + float(np.abs(c).sum())
            kern.bisect_norm(b, c, params[:degree], hi / 2.0, hi, 1e-12, 400)

    return {"solve_level": solve, "level_chain": chain,
            "chain_partials": partials, "bisect_norm (1/10 of the set)": bisect}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--vectors", type=int, default=2000)
    p.add_argument("--degree", type=int, default=8)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    args = p.parse_args(argv)

    backends = {"python": _pykernels}
    try:
        backends["cython"] = importlib.import_module("towernorm._ckernels")
    except ImportError:
        print("compiled extension not built; timing the Python backend only", file=sys.stderr)

    rng = np.random.default_rng(args.seed)
    params = make_schedule().params
    rows = [(float(r), float(u)) for r, u in 10.0 ** rng.uniform(-3, 3, (args.vectors, 2))]
    bases = [(float(np.linalg.norm(rng.uniform(-1, 1, 3))),
              np.ascontiguousarray(rng.uniform(-1, 1, args.degree)))
             for _ in range(args.vectors)]

    results = {}
    for name, kern in backends.items():
        for task, fn in _workloads(kern, params, rows, bases, args.degree).items():
            best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            results.setdefault(task, {})[name] = best

    if args.json:
        print(json.dumps({"vectors": args.vectors, "degree": args.degree, "seconds": results},
                         indent=2))
        return 0
    print(f"{args.vectors} inputs, degree {args.degree}, best of {args.repeat}")
    print(f"{'workload':32s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for task, t in results.items():
        py, cy = t["python"], t.get("cython")
        if cy is None:
            print(f"{task:32s} {1e3 * py:12.2f} {'-':>12s} {'-':>8s}")
        else:
            print(f"{task:32s} {1e3 * py:12.2f} {1e3 * cy:12.2f} {py / cy:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
