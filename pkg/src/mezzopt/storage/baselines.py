"""Reference storage policies: random clusters, closest open location, rank based.

Each policy yields a set of candidate rack selections per floor; the
candidates are scored with the same four objectives as NSGA-II so their
fronts can be compared. Closest-open and rank-based sweep the number of
items allowed per rack before moving on (the pure policy fills each rack
completely and is always part of the sweep).
"""

from __future__ import annotations

import math

import numpy as np

from ..warehouse import relative_rank
from .problem import FloorProblem

N_RANDOM_SAMPLES = 500
N_CAP_STEPS = 20


def random_clusters(problem: FloorProblem, rng: np.random.Generator) -> np.ndarray:
    """Items in target-quantity sized clusters on random fitting racks."""
    spare = problem.capacity.copy()
    left = problem.quantity
    genes = []
    while left > 0:
        open_ = np.nonzero(spare > 0)[0]
        r = int(open_[rng.integers(len(open_))])
        take = int(min(problem.tq, spare[r], left))
        genes.extend([r] * take)
        spare[r] -= take
        left -= take
    return np.array(genes, dtype=np.int64)


def random_candidates(problem: FloorProblem, rng: np.random.Generator,
                      samples: int = N_RANDOM_SAMPLES) -> list[np.ndarray]:
    return [random_clusters(problem, rng) for _ in range(samples)]


def _first_fit(problem: FloorProblem, order, per_rack: int) -> np.ndarray:
    spare = problem.capacity.copy()
    left = problem.quantity
    genes = []
    for limit in (per_rack, None):
        for r in order:
            if left == 0:
                break
            take = int(min(spare[r], left) if limit is None else min(spare[r], left, limit))
            genes.extend([int(r)] * take)
            spare[r] -= take
            left -= take
    return np.array(genes, dtype=np.int64)


def _cap_sweep(problem: FloorProblem) -> list[int]:
    top = int(problem.capacity.max())
    steps = np.unique(np.round(np.linspace(1, top, min(N_CAP_STEPS, top))).astype(int))
    return [int(c) for c in steps]


def closest_order(problem: FloorProblem) -> list[int]:
    d = problem.model.dist
    return sorted(problem.fitting.tolist(), key=lambda r: (d[r], problem.model.rack_ids[r]))


def rank_order(problem: FloorProblem) -> list[int]:
    """Racks by distance, starting at the product's relative rank and falling back towards closer racks."""
    ordered = closest_order(problem)
    rel = relative_rank(problem.product, len(problem.state.products))
    start = min(max(int(math.floor(rel * len(ordered))), 0), len(ordered) - 1)
    return ordered[start:] + ordered[:start][::-1]


def closest_candidates(problem: FloorProblem) -> list[np.ndarray]:
    order = closest_order(problem)
    return [_first_fit(problem, order, c) for c in _cap_sweep(problem)]


def rank_candidates(problem: FloorProblem) -> list[np.ndarray]:
    order = rank_order(problem)
    return [_first_fit(problem, order, c) for c in _cap_sweep(problem)]
