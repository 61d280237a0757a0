"""Compare the compiled and pure-Python graph kernels.

    python benchmarks/bench_kernels.py [--n 2000] [--repeat 3]

Both backends run the same breadth-first searches, component labellings and
distance-row batches on a seeded random graph; results are checked equal.
"""

import argparse
import random
import timeit

import numpy as np

from rbptools import _pykernels
from rbptools.generators import gen_tree_of_pieces

try:
    from rbptools import _kernels
except ImportError:
    _kernels = None


def workload(n, seed):
    rng = random.Random(seed)
    k = max(2, n // 25)
    g = gen_tree_of_pieces(k, ("cycle", "path", "complete"), sizes=(3, 40), seed=seed).graph
    blocked = np.zeros(g.n, dtype=np.uint8)
    blocked[rng.sample(range(g.n), g.n // 10)] = 1
    sources = rng.sample(range(g.n), min(64, g.n))
    return g, blocked, sources


def run(mod, g, blocked, sources):
    for s in sources[:16]:
        b = blocked.copy()
        b[s] = 0
        mod.bfs(g.indptr, g.indices, [s], b)
    mod.component_labels(g.indptr, g.indices, blocked)
    return mod.distance_rows(g.indptr, g.indices, sources)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000, help="approximate vertex count")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g, blocked, sources = workload(args.n, args.seed)
    print(f"graph: {g.n} vertices, {len(g.edges)} edges, {len(sources)} sources")
    backends = [("python", _pykernels)] + ([("cython", _kernels)] if _kernels else [])
    ref = None
    times = {}
    for name, mod in backends:
        out = run(mod, g, blocked, sources)
        if ref is None:
            ref = out
        elif not np.array_equal(ref, out):
            raise SystemExit(f"{name} disagrees with the python backend")
        times[name] = min(timeit.repeat(lambda: run(mod, g, blocked, sources), number=1, repeat=args.repeat))
        print(f"{name:>7}: {times[name] * 1000:9.1f} ms")
    if "cython" in times:
        print(f"speedup: {times['python'] / times['cython']:.1f}x")
    else:
        print("compiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
