"""The three-phase storage pipeline shared by NSGA-II and the reference policies."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..errors import UsageError
from ..warehouse import StorageAllocation, Warehouse
from . import baselines
from .compartments import assign_compartments
from .floors import split_across_floors
from .nsga2 import FloorFront, NsgaParams, run_nsga2, select_tradeoff, unique_front
from .problem import AssignmentTask, Chromosome, FloorProblem, ScoreConfig

STORAGE_ALGORITHMS = ("nsga2", "random", "closest", "rank")


@dataclass
class StorageResult:
    task: AssignmentTask
    algorithm: str
    floor_quantities: dict[int, int]
    fronts: dict[int, FloorFront]
    chosen: dict[int, Chromosome]
    allocation: StorageAllocation
    seconds: float


def _floor_front(algorithm: str, problem: FloorProblem, params: NsgaParams, rng) -> FloorFront:
    if algorithm == "nsga2":
        return run_nsga2(problem, params, rng)
    if algorithm == "random":
        cands = baselines.random_candidates(problem, rng)
    elif algorithm == "closest":
        cands = baselines.closest_candidates(problem)
    else:
        cands = baselines.rank_candidates(problem)
    return unique_front(problem, cands, problem.evaluate(cands))


def solve_storage(state: Warehouse, task: AssignmentTask, algorithm: str = "nsga2",
                  params: NsgaParams | None = None, config: ScoreConfig | None = None,
                  seed: int = 0) -> StorageResult:
    """Split over floors, build a front per floor, pick trade-offs, place into compartments."""
    if algorithm not in STORAGE_ALGORITHMS:
        raise UsageError(f"unknown storage algorithm {algorithm!r}")
    params = params or NsgaParams(seed=seed)
    t0 = time.perf_counter()
    streams = np.random.SeedSequence(seed).spawn(1 + len(state.floors))
    quantities = split_across_floors(state, task, np.random.default_rng(streams[0]))
    fronts, chosen, placements = {}, {}, []
    total = np.zeros(4)
    for f, stream in zip(state.floors, streams[1:]):
        qty = quantities[f]
        if qty == 0:
            continue
        problem = FloorProblem(state, task.product_number, f, qty, config)
        front = _floor_front(algorithm, problem, params, np.random.default_rng(stream))
        pick = select_tradeoff(front.scores, [c.genes for c in front.chromosomes])
        fronts[f] = front
        chosen[f] = front.chromosomes[pick]
        total += front.scores[pick]
        placements.extend(assign_compartments(state, task.product_number, chosen[f]))
    alloc = StorageAllocation(task.product_number, task.quantity, tuple(placements),
                              tuple(float(x) for x in total))
    return StorageResult(task, algorithm, quantities, fronts, chosen, alloc, time.perf_counter() - t0)
