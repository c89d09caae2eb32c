"""Compare the compiled kernels with the pure-Python fallback.

Each stage is timed through the public API with the kernel functions of one
backend patched in, so both backends do exactly the same work.

    python benchmarks/bench_kernels.py [--size 30] [--repeat 3]
"""

import argparse
import time

import numpy as np

from crowdlanes import _pykernels as pure
from crowdlanes import kernels
from crowdlanes.clustering import DbscanParams, dbscan_pairs
from crowdlanes.embedding import LayoutConfig, embed_graph
from crowdlanes.proximity import graph_from_trace
from crowdlanes.scenarios import build_scenario
from crowdlanes.similarity import PositionHistory, SimilarityParams, candidate_scores
from crowdlanes.simulation import SimParams, run

try:
    from crowdlanes import _kernels as compiled
except ImportError:
    compiled = None

NAMES = ("sim_step", "permutation", "grid_pairs", "pair_scores", "dbscan", "fr_layout",
         "closest_point", "resolve_move", "csr_from_pairs")


def use(module):
    for name in NAMES:
        setattr(kernels, name, getattr(module, name))


def stages(size: float):
    scen = build_scenario(size=size)
    params = SimParams(density=0.3, seed=1, max_timesteps=150)
    trace = run(scen, params)
    sim = SimilarityParams("C", 100, 100.0)
    hist = PositionHistory(trace.n_nodes, sim.window)
    for t in range(trace.n_timesteps):
        hist.push(trace.positions[t].astype(float), trace.active[t])
    nodes = np.flatnonzero(hist.full() & trace.active[-1])
    window = hist.window_array(nodes)
    pi, pj, s = candidate_scores(window, sim, 15.0)
    keep = s < 15.0
    small = graph_from_trace(run(scen, SimParams(density=0.3, seed=1, max_timesteps=20)), 25.0)
    return {
        "simulate (150 steps)": lambda: run(scen, params),
        "proximity graph": lambda: graph_from_trace(trace, 25.0),
        "similarity scores": lambda: candidate_scores(window, sim, 15.0),
        "dbscan": lambda: dbscan_pairs(len(nodes), pi[keep], pj[keep], DbscanParams(15.0, 15), 0),
        "embedding (20 steps)": lambda: embed_graph(small, seed=0, config=LayoutConfig(initial_iterations=100)),
    }


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=float, default=30.0, help="side of the crowd region")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if compiled is None:
        raise SystemExit("compiled extension not built; run pip install -e . first")
    print(f"{'stage':<24}{'compiled [s]':>14}{'python [s]':>14}{'speedup':>10}")
    for name, fn in stages(args.size).items():
        use(compiled)
        fast = best_of(fn, args.repeat)
        use(pure)
        slow = best_of(fn, args.repeat)
        print(f"{name:<24}{fast:>14.4f}{slow:>14.4f}{slow / fast:>9.1f}x", flush=True)
    use(compiled)


if __name__ == "__main__":
    main()
