"""Per-floor storage problem: chromosome encoding and the four objective scores.

A chromosome lists, for each incoming item, the rack that receives it. Internally
genes are local rack positions (0..R-1 in rack_id order); :class:`Chromosome`
carries real rack ids for output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import InfeasibleTaskError, UsageError
from ..structure import FloorModel, floor_model
from ..warehouse import Product, Warehouse, relative_rank

MASK_MODS = (1.0, 0.75, 0.5, 0.25)
OBJECTIVES = ("spread", "distance", "quantity", "correlation")


@dataclass(frozen=True)
class ScoreConfig:
    """``n_areas`` None means one spread area per block of the floor."""

    n_areas: int | None = None
    mask_mods: tuple[float, ...] = MASK_MODS

    def __post_init__(self):
        if self.n_areas is not None and self.n_areas < 1:
            raise UsageError("need at least one spread area")
        if tuple(self.mask_mods) != MASK_MODS:
            raise UsageError("mask modifiers are fixed at (1, 0.75, 0.5, 0.25)")


@dataclass(frozen=True)
class AssignmentTask:
    product_number: int
    quantity: int

    def __post_init__(self):
        if self.quantity < 1:
            raise UsageError("task quantity must be >= 1")


@dataclass(frozen=True)
class Chromosome:
    floor_id: int
    genes: tuple[int, ...]  # rack ids


class FloorProblem:
    """Everything the optimizer needs to score placements of one product on one floor."""

    def __init__(self, state: Warehouse, product_number: int, floor_id: int, quantity: int,
                 config: ScoreConfig | None = None):
        if product_number not in state.products:
            raise UsageError(f"unknown product {product_number}")
        self.state = state
        self.config = config or ScoreConfig()
        self.product: Product = state.products[product_number]
        self.floor_id = floor_id
        self.quantity = int(quantity)
        self.model: FloorModel = floor_model(state, floor_id)
        fm = self.model
        idx = state.index
        self.existing = idx.rack_quantity_of(product_number)[fm.rack_index]
        self.capacity = idx.rack_capacity_for(self.product)[fm.rack_index]
        self.fitting = np.nonzero(self.capacity > 0)[0]
        self.tq = self.product.target_quantity
        if self.config.n_areas is None:
            self.area_of, self.n_areas = fm.area_of, fm.n_areas
        else:
            self.n_areas = self.config.n_areas
            order = np.lexsort((fm.positions[:, 1], fm.positions[:, 0]))
            self.area_of = np.empty(fm.n_racks, dtype=np.int64)
            self.area_of[order] = np.arange(fm.n_racks) * self.n_areas // max(fm.n_racks, 1)
        self.ideal_dist = ideal_distance(self.product, len(state.products), fm.dist)
        rules = state.rules_for(product_number)
        self.rules = rules
        self.rule_ex = np.zeros((len(rules), fm.n_racks), dtype=np.int64)
        for k, rule in enumerate(rules):
            self.rule_ex[k] = idx.rack_quantity_of(rule.rhs)[fm.rack_index]
        self.rule_tq = np.array([state.products[r.rhs].target_quantity for r in rules], dtype=float)
        self.rule_conf = np.array([r.confidence for r in rules], dtype=float)
        if self.quantity > int(self.capacity.sum()):
            raise InfeasibleTaskError(
                f"floor {floor_id} holds {int(self.capacity.sum())} more items of product "
                f"{product_number}, {self.quantity} requested")

    @property
    def n_racks(self) -> int:
        return self.model.n_racks

    def counts(self, genes) -> np.ndarray:
        return np.bincount(np.asarray(genes, dtype=np.int64), minlength=self.n_racks)

    def evaluate(self, population) -> np.ndarray:
        """(P, 4) scores for a list of gene arrays."""
        if len(population) == 0:
            return np.zeros((0, 4))
        return self.evaluate_counts(np.stack([self.counts(g) for g in population]))

    def evaluate_counts(self, counts: np.ndarray) -> np.ndarray:
        fm = self.model
        return kernels.storage_scores(
            np.ascontiguousarray(counts, dtype=np.int64), self.existing.astype(np.int64),
            self.area_of.astype(np.int64), int(self.n_areas), fm.dist, float(self.ideal_dist),
            fm.grid, fm.sa_nbays, fm.sa_of, fm.bay_of, fm.win_lo, fm.win_hi, fm.sa_window, int(self.tq),
            self.rule_ex, self.rule_tq, self.rule_conf)

    def chromosome(self, genes) -> Chromosome:
        return Chromosome(self.floor_id, tuple(int(self.model.rack_ids[g]) for g in genes))

    def local_genes(self, chromosome: Chromosome) -> np.ndarray:
        return np.array([self.model.local(r) for r in chromosome.genes], dtype=np.int64)


def ideal_distance(product: Product, assortment_size: int, distances: np.ndarray) -> float:
    """Walk distance of the rack whose position in the distance ranking matches the product's rank."""
    ordered = np.sort(np.asarray(distances, dtype=float), kind="stable")
    if len(ordered) == 0:
        return 0.0
    idx = int(math.floor(relative_rank(product, assortment_size) * len(ordered)))
    idx = min(max(idx, 0), len(ordered) - 1)
    return float(ordered[idx])


# Reference (readable) versions of the four scores. The optimizer uses the batched
# kernel in FloorProblem.evaluate; tests keep the two in agreement.

def spread_score(problem: FloorProblem, genes) -> float:
    q = problem.existing + problem.counts(genes)
    ideal = q.sum() / problem.n_areas
    totals = [q[problem.area_of == a].sum() for a in range(problem.n_areas)]
    return -float(sum(abs(ideal - t) for t in totals))


def distance_score(problem: FloorProblem, genes) -> float:
    d = problem.model.dist
    return -float(sum(abs(problem.ideal_dist - d[g]) for g in genes))


def _mask_quantities(problem: FloorProblem, q: np.ndarray, s: int) -> list[float]:
    """Best quantity of the product under each mask within sub-aisle ``s``."""
    fm = problem.model
    nb = int(fm.sa_nbays[s])
    per_bay = []
    best_rack = 0.0
    for b in range(nb):
        tot = 0.0
        for side in (0, 1):
            r = fm.grid[s, b, side]
            if r >= 0:
                tot += q[r]
                best_rack = max(best_rack, float(q[r]))
        per_bay.append(tot)
    w = min(int(fm.sa_window[s]), nb)
    windows = [sum(per_bay[i:i + w]) for i in range(nb - w + 1)] or [0.0]
    return [best_rack, max(per_bay, default=0.0), max(windows), sum(per_bay)]


def quantity_score(problem: FloorProblem, genes) -> float:
    q = problem.existing + problem.counts(genes)
    total = 0.0
    for s in range(problem.model.n_sub_aisles):
        masks = _mask_quantities(problem, q, s)
        total += max(mod * min(1.0, m / problem.tq) for mod, m in zip(MASK_MODS, masks))
    return total


def correlation_score(problem: FloorProblem, genes) -> float:
    if not problem.rules:
        return 0.0
    fm = problem.model
    q = problem.existing + problem.counts(genes)
    tq = problem.tq
    clusters = math.floor(q.sum() / tq + 1e-9)
    score = 0.0
    for k, rule in enumerate(problem.rules):
        ideal = math.ceil(clusters * problem.rule_tq[k] * rule.confidence - 1e-9)
        corr = 0.0
        for r in np.nonzero(problem.rule_ex[k])[0]:
            s, b = fm.sa_of[r], fm.bay_of[r]
            pair = sum(q[x] for x in fm.grid[s, b] if x >= 0)
            window = sum(q[x] for bb in range(fm.win_lo[r], fm.win_hi[r]) for x in fm.grid[s, bb] if x >= 0)
            whole = sum(q[x] for x in fm.sa_racks[s])
            near = max(mod * min(1.0, m / tq) for mod, m in zip(MASK_MODS, (q[r], pair, window, whole)))
            corr += problem.rule_ex[k, r] * near
        score -= max(0.0, ideal - corr)
    return score
