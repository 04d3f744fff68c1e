"""Time the compiled kernels against the pure-Python fallback on a generated warehouse.

    python benchmarks/bench_kernels.py [--size small] [--repeat 5]

Prints one line per kernel with the best-of-N time for each backend and the speed-up.
"""

import argparse
import time

import numpy as np

from mezzopt import kernels
from mezzopt.generator import GenSpec, generate_instance
from mezzopt.picking import build_market_graph
from mezzopt.storage import AssignmentTask, FloorProblem
from mezzopt.storage.operators import random_genes


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(size, seed):
    inst = generate_instance(GenSpec(size, fill_fraction=0.2, n_orders=3), seed)
    wh = inst.warehouse
    rng = np.random.default_rng(seed)

    p = max(wh.products, key=lambda k: len(wh.rules_for(k)))
    task = AssignmentTask(p, 3 * wh.products[p].target_quantity)
    prob = FloorProblem(wh, task.product_number, wh.floors[0], task.quantity)
    counts = np.stack([prob.counts(random_genes(prob, rng)) for _ in range(100)])
    fm = prob.model
    score_args = (np.ascontiguousarray(counts, dtype=np.int64), prob.existing.astype(np.int64),
                  prob.area_of.astype(np.int64), int(prob.n_areas), fm.dist, float(prob.ideal_dist), fm.grid,
                  fm.sa_nbays, fm.sa_of, fm.bay_of, fm.win_lo, fm.win_hi, fm.sa_window, int(prob.tq),
                  prob.rule_ex, prob.rule_tq, prob.rule_conf)

    F = np.ascontiguousarray(rng.random((200, 4)))

    graph = build_market_graph(wh)
    ctx = graph.context(inst.orders[0])
    M = len(graph)
    tau = np.full((M, M), 25.0)
    walk_args = lambda s: (s % M, s, ctx.need, ctx.supply, graph.distance, tau, tau, False, 1.0, 2.0,
                           ctx.zr_start, ctx.zr_sub, ctx.zh_start, ctx.zh_line, ctx.zh_qty, graph.n_sub_aisles)
    seq = np.arange(M, dtype=np.int64)
    replay_args = (seq, ctx.need, ctx.supply, ctx.zr_start, ctx.zr_sub, ctx.zh_start, ctx.zh_line, ctx.zh_qty,
                   graph.n_sub_aisles)
    return {
        "nondominated_ranks (200x4)": lambda k: k.nondominated_ranks(F),
        "storage_scores (100 chromosomes)": lambda k: k.storage_scores(*score_args),
        "ant_walk (x50)": lambda k: [k.ant_walk(*walk_args(s)) for s in range(50)],
        "replay (x50)": lambda k: [k.replay(*replay_args) for _ in range(50)],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", default="small", choices=("small", "medium", "large"))
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    py = kernels.backend("python")
    try:
        cy = kernels.backend("compiled")
    except ImportError:
        cy = None
        print("compiled kernels not built; timing the fallback only")
    print(f"{'kernel':34s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speed-up':>9s}")
    for name, fn in workloads(args.size, args.seed).items():
        t_py = best_of(lambda: fn(py), args.repeat)
        if cy is None:
            print(f"{name:34s} {t_py * 1e3:12.2f}")
            continue
        t_cy = best_of(lambda: fn(cy), args.repeat)
        print(f"{name:34s} {t_py * 1e3:12.2f} {t_cy * 1e3:14.2f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
