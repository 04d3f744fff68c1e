"""Ant colony search for pick routes (single-matrix and per-objective-matrix variants).

Pheromones start at ``tau_max``. Every iteration places one ant on each
market; each ant's route and its reverse are evaluated. After
``max_cons_iter_wo_impr`` iterations without a new non-dominated objective
vector, a cataclysm archives the global-best front, resets its edges to
``tau_min`` and starts a fresh global front.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import kernels
from ..errors import UsageError
from ..moo import nondominated_indices
from .graph import MarketGraph, OrderContext
from .routes import PickRoute, build_route, reverse_route

VARIANTS = ("aco3", "aco4")


@dataclass(frozen=True)
class AcoParams:
    alpha: float = 1.0
    beta: float = 2.0
    rho: float = 0.02
    tau_min: float = 1.0
    tau_max: float = 25.0
    floor_penalty: float = 50.0
    allowed_weight_difference: float = 3.0
    max_cataclysms: int = 3
    max_cons_iter_wo_impr: int = 20
    max_iter: int = 250
    variant: str = "aco3"
    iteration_reward_share: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise UsageError("rho must lie in (0, 1)")
        if not self.tau_min < self.tau_max:
            raise UsageError("tau_min must be below tau_max")
        if min(self.max_cataclysms, self.max_cons_iter_wo_impr, self.max_iter) < 1:
            raise UsageError("iteration counters must be >= 1")
        if self.variant not in VARIANTS:
            raise UsageError(f"unknown variant {self.variant!r}")


@dataclass
class Pheromones:
    tau: list[np.ndarray]   # one matrix (aco3) or one per objective (aco4)

    @classmethod
    def initial(cls, n_markets: int, params: AcoParams) -> "Pheromones":
        k = 2 if params.variant == "aco4" else 1
        return cls([np.full((n_markets, n_markets), params.tau_max) for _ in range(k)])

    def clamp(self, params: AcoParams) -> None:
        for t in self.tau:
            np.clip(t, params.tau_min, params.tau_max, out=t)


def heuristic_value(distance: float, available_share: float) -> float:
    """Attractiveness of the next market: share of missing items it offers over the distance."""
    if distance <= 0:
        raise UsageError("edge distance must be positive")
    return available_share / distance


def transition_probability(tau_row, eta, candidates, alpha: float = 1.0, beta: float = 2.0) -> np.ndarray:
    """Probabilities over ``candidates`` proportional to tau^alpha * eta^beta (uniform if all vanish)."""
    candidates = np.asarray(candidates, dtype=np.int64)
    if len(candidates) == 0:
        raise UsageError("no unvisited market left")
    w = np.power(np.asarray(tau_row, dtype=float)[candidates], alpha) * \
        np.power(np.asarray(eta, dtype=float)[candidates], beta)
    total = w.sum()
    if total <= 0:
        return np.full(len(candidates), 1.0 / len(candidates))
    return w / total


def _edge_mask(routes, n: int) -> np.ndarray:
    mask = np.zeros((n, n), dtype=bool)
    for r in routes:
        for a, b in r.edges:
            mask[a, b] = True
    return mask


def update_aco3(ph: Pheromones, iteration_front, global_front, params: AcoParams,
                rng: np.random.Generator) -> None:
    """Evaporate, then reward the edges of the iteration-best (usually) or global-best front."""
    rewarded = iteration_front if rng.random() < params.iteration_reward_share else global_front
    tau = ph.tau[0]
    tau *= 1.0 - params.rho
    tau[_edge_mask(rewarded, len(tau))] += 1.0
    ph.clamp(params)


def best_by(routes, objective: int) -> PickRoute:
    """Best route for one objective; ties by the other objective, then shorter market sequence."""
    other = 1 - objective
    return min(routes, key=lambda r: (r.objectives[objective], r.objectives[other], len(r.markets)))


def aco4_delta(of_ib: float, of_gb: float) -> float:
    return 1.0 / (1.0 + of_ib - of_gb)


def update_aco4(ph: Pheromones, iteration_routes, global_front, params: AcoParams) -> None:
    """Per objective matrix: evaporate, reward the iteration best relative to the global best."""
    for i, tau in enumerate(ph.tau):
        ib = best_by(iteration_routes, i)
        gb = best_by(global_front, i)
        tau *= 1.0 - params.rho
        tau[_edge_mask([ib], len(tau))] += aco4_delta(ib.objectives[i], gb.objectives[i])
    ph.clamp(params)


def pareto_routes(routes) -> list[PickRoute]:
    """Non-dominated routes, one per objective vector, in a deterministic order."""
    if not routes:
        return []
    F = np.array([r.objectives for r in routes], dtype=float)
    out, seen = [], set()
    for i in nondominated_indices(F):
        key = routes[i].objectives
        if key not in seen:
            seen.add(key)
            out.append(routes[i])
    out.sort(key=lambda r: (r.objectives, r.markets))
    return out


def _improved(new_front, old_front) -> bool:
    old = [r.objectives for r in old_front]
    for r in new_front:
        d, v = r.objectives
        if not any(od <= d and ov <= v for od, ov in old):
            return True
    return False


@dataclass
class AcoResult:
    front: list[PickRoute]
    iterations: int
    cataclysms: int
    seconds: float


def construct_pick_route(ctx: OrderContext, start: int, ph: Pheromones, params: AcoParams,
                         seed: int) -> PickRoute:
    graph = ctx.graph
    two = len(ph.tau) == 2
    seq, picks = kernels.ant_walk(int(start), int(seed), ctx.need, ctx.supply, graph.distance, ph.tau[0],
                                  ph.tau[1] if two else ph.tau[0], two, params.alpha, params.beta,
                                  ctx.zr_start, ctx.zr_sub, ctx.zh_start, ctx.zh_line, ctx.zh_qty,
                                  graph.n_sub_aisles)
    return build_route(ctx, seq, picks, allowed=params.allowed_weight_difference)


def aco_optimize(graph: MarketGraph, order, params: AcoParams,
                 on_iteration: Callable[[int, Pheromones, list[PickRoute]], None] | None = None) -> AcoResult:
    """Search non-dominated pick routes for one order."""
    t0 = time.perf_counter()
    ctx = order if isinstance(order, OrderContext) else graph.context(order)
    if not ctx.order.lines:
        return AcoResult([build_route(ctx, [], np.zeros((0, 4), dtype=np.int64))], 0, 0,
                         time.perf_counter() - t0)
    rng = np.random.default_rng(params.seed)
    M = len(graph)
    ph = Pheromones.initial(M, params)
    archive: list[PickRoute] = []
    best: list[PickRoute] = []
    cataclysms = it = stagnant = 0
    while cataclysms < params.max_cataclysms and it < params.max_iter:
        seeds = rng.integers(0, 2 ** 63, size=M, dtype=np.uint64)
        routes = []
        for m in range(M):
            r = construct_pick_route(ctx, m, ph, params, int(seeds[m]))
            routes.append(r)
            rev = reverse_route(ctx, r, params.allowed_weight_difference)
            if rev is not None:
                routes.append(rev)
        it_front = pareto_routes(routes)
        merged = pareto_routes(best + it_front)
        improved = _improved(merged, best)
        best = merged
        if params.variant == "aco3":
            update_aco3(ph, it_front, best, params, rng)
        else:
            update_aco4(ph, routes, best, params)
        stagnant = 0 if improved else stagnant + 1
        it += 1
        if on_iteration:
            on_iteration(it, ph, best)
        if stagnant >= params.max_cons_iter_wo_impr:
            archive.extend(best)
            mask = _edge_mask(best, M)
            for tau in ph.tau:
                tau[mask] = params.tau_min
            best = []
            cataclysms += 1
            stagnant = 0
    return AcoResult(pareto_routes(archive + best), it, cataclysms, time.perf_counter() - t0)
