"""Per-floor NSGA-II over rack selections, and trade-off selection on its front."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import UsageError
from ..moo import crowding_distance, pareto_ranks
from .operators import mutate, random_genes, repair, single_point_crossover, tournament_select
from .problem import Chromosome, FloorProblem

# (parent population, max generations) per warehouse size
SIZE_BUDGETS = {"small": (50, 200), "medium": (60, 250), "large": (70, 300)}


@dataclass(frozen=True)
class NsgaParams:
    parent_pop_size: int = 50
    mutation_probability: float = 0.95
    history_window: int = 10
    delta_lim: float = 0.01
    max_generations: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.parent_pop_size < 2 or self.parent_pop_size % 2:
            raise UsageError("parent_pop_size must be even and >= 2")
        if not 0.0 <= self.mutation_probability <= 1.0:
            raise UsageError("mutation_probability must lie in [0, 1]")
        if self.history_window < 2:
            raise UsageError("history_window must be >= 2")
        if self.max_generations < 0:
            raise UsageError("max_generations must be >= 0")

    @classmethod
    def for_size(cls, size: str, **kw) -> "NsgaParams":
        pop, gens = SIZE_BUDGETS[size]
        return cls(parent_pop_size=pop, max_generations=gens, **kw)


@dataclass
class FloorFront:
    """Rank-1 solutions of one floor; ``scores`` columns follow ``OBJECTIVES`` (all maximized)."""

    floor_id: int
    genes: list[np.ndarray]
    scores: np.ndarray
    chromosomes: list[Chromosome] = field(default_factory=list)
    generations: int = 0

    def __len__(self):
        return len(self.genes)


def _rank_and_crowd(scores: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    F = -scores
    ranks = pareto_ranks(F)
    cd = np.zeros(len(F))
    for r in np.unique(ranks):
        members = np.nonzero(ranks == r)[0]
        cd[members] = crowding_distance(F[members])
    return ranks, cd


def _survivors(scores: np.ndarray, n: int) -> np.ndarray:
    ranks, cd = _rank_and_crowd(scores)
    # lower rank first, then larger crowding distance; stable on index
    order = np.lexsort((np.arange(len(ranks)), -cd, ranks))
    return np.sort(order[:n])


def _max_finite(cd: np.ndarray) -> float | None:
    finite = cd[np.isfinite(cd)]
    return float(finite.max()) if len(finite) else None


def unique_front(problem: FloorProblem, genes: list[np.ndarray], scores: np.ndarray,
                 generations: int = 0) -> FloorFront:
    """Non-dominated members of ``genes``, one per distinct objective vector."""
    if len(genes) == 0:
        return FloorFront(problem.floor_id, [], np.zeros((0, 4)), [], generations)
    ranks = pareto_ranks(-scores)
    keep, seen = [], set()
    for i in np.nonzero(ranks == 1)[0]:
        key = tuple(np.round(scores[i], 9))
        if key not in seen:
            seen.add(key)
            keep.append(i)
    front_genes = [genes[i] for i in keep]
    return FloorFront(problem.floor_id, front_genes, scores[keep],
                      [problem.chromosome(g) for g in front_genes], generations)


def run_nsga2(problem: FloorProblem, params: NsgaParams, rng: np.random.Generator,
              on_generation: Callable[[int, np.ndarray, np.ndarray], None] | None = None) -> FloorFront:
    """Evolve rack selections for one floor; returns the final rank-1 front.

    ``on_generation(gen, scores, ranks)`` observes every kept parent population.
    """
    if problem.quantity == 0:
        return FloorFront(problem.floor_id, [], np.zeros((0, 4)))
    n = params.parent_pop_size
    pop = [random_genes(problem, rng) for _ in range(n)]
    scores = problem.evaluate(pop)
    ranks, cd = _rank_and_crowd(scores)
    if on_generation:
        on_generation(0, scores, ranks)
    history: list[float] = []
    gen = 0
    while gen < params.max_generations:
        window = history[-params.history_window:]
        if len(window) == params.history_window and np.std(window) <= params.delta_lim:
            break
        children = []
        while len(children) < n:
            a = tournament_select(ranks, cd, rng)
            b = tournament_select(ranks, cd, rng)
            for child in single_point_crossover(pop[a], pop[b], rng):
                child = repair(problem, child, rng)
                children.append(mutate(problem, child, rng, params.mutation_probability))
        children = children[:n]
        merged = pop + children
        merged_scores = np.vstack([scores, problem.evaluate(children)])
        keep = _survivors(merged_scores, n)
        pop = [merged[i] for i in keep]
        scores = merged_scores[keep]
        ranks, cd = _rank_and_crowd(scores)
        gen += 1
        if on_generation:
            on_generation(gen, scores, ranks)
        top = _max_finite(cd[ranks == 1])
        if top is not None:
            history.append(top)
    return unique_front(problem, pop, scores, gen)


def select_tradeoff(scores, genes=None) -> int:
    """Index of the front member closest to the per-objective maxima after min-max scaling.

    Ties go to the lexicographically smallest gene sequence.
    """
    S = np.atleast_2d(np.asarray(scores, dtype=float))
    if len(S) == 0:
        raise UsageError("front must not be empty")
    lo, hi = S.min(axis=0), S.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    d = np.sqrt((((hi - S) / span) ** 2).sum(axis=1))
    best = np.nonzero(d <= d.min() + 1e-12)[0]
    if len(best) == 1 or genes is None:
        return int(best[0])
    return int(min(best, key=lambda i: tuple(int(g) for g in genes[i])))


def nsga2_assign(state, task, floor_quantities: dict[int, int], params: NsgaParams,
                 config=None, rngs: dict | None = None) -> dict[int, FloorFront]:
    """Run NSGA-II independently on every floor that receives items."""
    out = {}
    for f in sorted(floor_quantities):
        qty = floor_quantities[f]
        rng = rngs[f] if rngs else np.random.default_rng([params.seed, f])
        if qty == 0:
            out[f] = FloorFront(f, [], np.zeros((0, 4)))
            continue
        problem = FloorProblem(state, task.product_number, f, qty, config)
        out[f] = run_nsga2(problem, params, rng)
    return out

