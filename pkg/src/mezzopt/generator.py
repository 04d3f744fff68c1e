"""Seeded synthetic instances: layouts, assortments, correlations, initial stock, orders.

Layout geometry (per lane, ``k`` narrow aisles)::

    x0 | rack aisle rack | rack aisle rack | ... | x0 + 3k + 1
     ^ wide or periphery aisle

Cross aisles sit every ``bays + 1`` grid rows; each narrow sub-aisle holds
``bays`` facing rack pairs. All floors share the layout.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .errors import ConfigurationError, InfeasibleTaskError
from .storage.compartments import assign_compartments
from .storage.floors import split_across_floors
from .storage.baselines import random_clusters
from .storage.nsga2 import NsgaParams
from .storage.problem import AssignmentTask, FloorProblem, ScoreConfig
from .storage.solve import solve_storage
from .warehouse import (AssociationRule, FloorLayout, Order, OrderLine, Product, Rack,
                        RackConfiguration, StorageAllocation, Warehouse, apply_allocation)

# floors, lanes, cross aisles, bays per sub-aisle, assortment size
SIZES = {
    "small": (2, 2, 3, 8, 500),
    "medium": (2, 3, 3, 10, 1000),
    "large": (3, 3, 4, 12, 1500),
}
# configuration id -> (shelf levels, compartments per shelf)
RACK_CONFIGS = {1: (3, 2), 2: (6, 2), 3: (6, 4)}
BOX_SIZES = ((0.1, 0.1, 0.1), (0.12, 0.15, 0.2), (0.2, 0.15, 0.25), (0.25, 0.3, 0.3))
RACK_SIZE = (1.0, 2.0, 0.6)


@dataclass(frozen=True)
class GenSpec:
    size: str = "small"
    assortment_size: int | None = None
    floors: int | None = None
    lanes: int | None = None
    cross_aisles: int | None = None
    bays: int | None = None
    aisles_per_lane: int = 2
    config_mix: tuple[float, ...] = (1 / 3, 1 / 3, 1 / 3)
    weight_mixture: tuple[tuple[float, float, float], ...] = ((0.25, 2.0, 1.0), (0.5, 5.0, 2.0), (0.25, 8.0, 1.0))
    min_weight: float = 0.1
    correlation_probs: tuple[float, ...] = (0.3, 0.4, 0.2, 0.1)
    confidence_range: tuple[float, float] = (0.1, 0.9)
    mu_range: tuple[float, float] = (1.0, 5.0)
    sigma_range: tuple[float, float] = (0.5, 2.0)
    box_sizes: tuple[tuple[float, float, float], ...] = BOX_SIZES
    fill_fraction: float = 0.5
    fill_by: str = "volume"
    fill_policy: str = "random"
    fill_nsga: tuple[int, int] = (10, 20)  # population, generations for NSGA-II filling
    fill_areas: int | None = None          # spread areas per floor for NSGA-II filling (None: blocks)
    n_orders: int = 100
    order_lines: int = 20
    quartile_probs: tuple[float, ...] = (0.4, 0.3, 0.2, 0.1)
    seed: int = 0

    def __post_init__(self):
        if self.size not in SIZES:
            raise ConfigurationError(f"unknown size {self.size!r}")
        dims = dict(zip(("floors", "lanes", "cross_aisles", "bays", "assortment_size"), SIZES[self.size]))
        for name, default in dims.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)
        for name in ("config_mix", "correlation_probs", "quartile_probs"):
            probs = getattr(self, name)
            if abs(sum(probs) - 1.0) > 1e-9 or min(probs) < 0:
                raise ConfigurationError(f"{name} must be a probability vector")
        if abs(sum(w for w, _, _ in self.weight_mixture) - 1.0) > 1e-9:
            raise ConfigurationError("weight mixture weights must sum to 1")
        if len(self.config_mix) != len(RACK_CONFIGS):
            raise ConfigurationError(f"config_mix needs {len(RACK_CONFIGS)} entries")
        if not 0.0 < self.fill_fraction <= 1.0:
            raise ConfigurationError("fill_fraction must lie in (0, 1]")
        if self.fill_by not in ("volume", "compartments"):
            raise ConfigurationError("fill_by must be 'volume' or 'compartments'")
        if self.fill_policy not in ("random", "nsga2"):
            raise ConfigurationError("fill_policy must be 'random' or 'nsga2'")
        if self.assortment_size < 4:
            raise ConfigurationError("need at least 4 products (one per rank quartile)")
        if self.cross_aisles < 2 or self.lanes < 1 or self.bays < 1 or self.aisles_per_lane < 1:
            raise ConfigurationError("layout needs >= 2 cross aisles, >= 1 lane, aisle and bay")
        if self.order_lines > self.assortment_size:
            raise ConfigurationError("order_lines exceeds the assortment size")

    @classmethod
    def from_dict(cls, data: dict) -> "GenSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown spec keys: {sorted(unknown)}")
        conv = {}
        for k, v in data.items():
            conv[k] = _tupleize(v) if isinstance(v, list) else v
        return cls(**conv)

    @classmethod
    def load(cls, path) -> "GenSpec":
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read spec {path}: {exc}") from exc

    def to_dict(self) -> dict:
        return asdict(self)


def _tupleize(v):
    return tuple(_tupleize(x) if isinstance(x, list) else x for x in v)


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


# -- layout -------------------------------------------------------------------

def build_layout(spec: GenSpec) -> FloorLayout:
    k = spec.aisles_per_lane
    lane_w = 3 * k + 1
    width = spec.lanes * lane_w
    rows = tuple(float(s * (spec.bays + 1)) for s in range(spec.cross_aisles))
    cols = [(float(l * lane_w), "wide") for l in range(1, spec.lanes)]
    for l in range(spec.lanes):
        cols += [(float(l * lane_w + 3 * j + 2), "narrow") for j in range(k)]
    return FloorLayout(float(width), rows[-1], ((0.0, 0.0), (float(width), 0.0)), rows, tuple(sorted(cols)))


def rack_configurations() -> dict[int, RackConfiguration]:
    return {cid: RackConfiguration.uniform(cid, lv, ps, RACK_SIZE) for cid, (lv, ps) in RACK_CONFIGS.items()}


def build_racks(spec: GenSpec, rng: np.random.Generator) -> tuple[Rack, ...]:
    k, lane_w = spec.aisles_per_lane, 3 * spec.aisles_per_lane + 1
    cfg_ids = sorted(RACK_CONFIGS)
    racks = []
    for f in range(1, spec.floors + 1):
        rid = 0
        sub = block = 0
        for l in range(spec.lanes):
            for j in range(k):
                ax = float(l * lane_w + 3 * j + 2)
                for s in range(spec.cross_aisles - 1):
                    y0 = s * (spec.bays + 1)
                    blocks = {"left": block, "right": block + 1}
                    for b in range(1, spec.bays + 1):
                        for side in ("left", "right"):
                            rid += 1
                            cfg = int(cfg_ids[rng.choice(len(cfg_ids), p=spec.config_mix)])
                            racks.append(Rack(rid, f, (ax, float(y0 + b)), b, blocks[side], sub, side, cfg))
                    sub += 1
                    block += 2
    return tuple(racks)


# -- assortment ---------------------------------------------------------------

def sample_weights(n: int, rng: np.random.Generator, mixture=GenSpec.weight_mixture,
                   min_weight: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """Weights from a gaussian mixture (clipped below at ``min_weight``) and their components."""
    probs = np.array([w for w, _, _ in mixture])
    comp = rng.choice(len(mixture), size=n, p=probs)
    mu = np.array([m for _, m, _ in mixture])[comp]
    sd = np.array([s for _, _, s in mixture])[comp]
    return np.maximum(rng.normal(mu, sd), min_weight), comp


def generate_products(spec: GenSpec, rng) -> dict[int, Product]:
    rng = _rng(rng)
    n = spec.assortment_size
    weights, _ = sample_weights(n, rng, spec.weight_mixture, spec.min_weight)
    ranks = rng.permutation(n) + 1
    mus = rng.uniform(*spec.mu_range, size=n)
    sigmas = rng.uniform(*spec.sigma_range, size=n)
    boxes = rng.integers(len(spec.box_sizes), size=n)
    return {i + 1: Product(i + 1, tuple(spec.box_sizes[boxes[i]]), round(float(weights[i]), 3), int(ranks[i]),
                           round(float(mus[i]), 3), round(float(sigmas[i]), 3))
            for i in range(n)}


def generate_correlations(products: dict[int, Product], rng, probs=GenSpec.correlation_probs,
                          confidence_range=GenSpec.confidence_range) -> tuple[AssociationRule, ...]:
    rng = _rng(rng)
    numbers = np.array(sorted(products))
    counts = rng.choice(len(probs), size=len(numbers), p=probs)
    rules = []
    for i, p in enumerate(numbers):
        k = min(int(counts[i]), len(numbers) - 1)
        if k == 0:
            continue
        partners: list[int] = []
        while len(partners) < k:    # rejection keeps this linear in the assortment size
            j = int(rng.integers(len(numbers) - 1))
            j += j >= i
            if j not in partners:
                partners.append(j)
        for cp in numbers[partners]:
            conf = round(float(rng.uniform(*confidence_range)), 4)
            rules.append(AssociationRule(int(p), int(cp), conf))
    return tuple(rules)


def rank_quartiles(products: dict[int, Product]) -> list[np.ndarray]:
    """Product numbers split into four groups by rank, fastest movers first."""
    by_rank = np.array(sorted(products, key=lambda p: products[p].rank))
    return np.array_split(by_rank, 4)


def generate_orders(products: dict[int, Product], rng, n_orders: int = 100, lines: int = 20,
                    quartile_probs=GenSpec.quartile_probs, stock: dict[int, int] | None = None
                    ) -> tuple[Order, ...]:
    """Orders of distinct products; with ``stock`` given, only stocked products, capped at the stock."""
    rng = _rng(rng)
    groups = rank_quartiles(products)
    if stock is not None:
        groups = [np.array([p for p in g if stock.get(int(p), 0) > 0], dtype=np.int64) for g in groups]
        if sum(len(g) for g in groups) < lines:
            raise ConfigurationError("too few stocked products for the requested order length")
    if any(len(g) == 0 for g in groups):
        raise ConfigurationError("assortment too small for four rank quartiles")
    orders = []
    for o in range(1, n_orders + 1):
        chosen: dict[int, int] = {}
        while len(chosen) < lines:
            q = int(rng.choice(4, p=quartile_probs))
            if len(groups[q]) == 0:
                continue
            p = int(groups[q][rng.integers(len(groups[q]))])
            if p in chosen:
                continue
            prod = products[p]
            qty = max(1, int(round(float(rng.normal(prod.mu, prod.sigma)))))
            chosen[p] = qty if stock is None else min(qty, stock[p])
        orders.append(Order(o, tuple(OrderLine(p, q) for p, q in chosen.items())))
    return tuple(orders)


def stock_levels(*states: Warehouse) -> dict[int, int]:
    """Units per product; with several warehouses, the minimum over them."""
    levels = None
    for state in states:
        idx = state.index
        cur: dict[int, int] = {}
        for pn, q in zip(idx.comp_product.tolist(), idx.comp_qty.tolist()):
            if pn >= 0:
                cur[pn] = cur.get(pn, 0) + q
        levels = cur if levels is None else {p: min(q, cur.get(p, 0)) for p, q in levels.items()}
    return levels or {}


# -- initial stock ------------------------------------------------------------

def _random_allocation(state: Warehouse, task: AssignmentTask, rng: np.random.Generator) -> StorageAllocation:
    quantities = split_across_floors(state, task, rng)
    placements = []
    for f in state.floors:
        if quantities[f] == 0:
            continue
        problem = FloorProblem(state, task.product_number, f, quantities[f])
        chrom = problem.chromosome(random_clusters(problem, rng))
        placements.extend(assign_compartments(state, task.product_number, chrom))
    return StorageAllocation(task.product_number, task.quantity, tuple(placements))


def fill_warehouse(state: Warehouse, spec: GenSpec, rng, policy: str | None = None) -> Warehouse:
    """Store products until the requested share of the storage space is occupied.

    By volume, each pass gives every product a quantity proportional to its
    target quantity, scaled to close the remaining gap; by compartments, each
    product receives one target-quantity cluster per pass.
    """
    rng = _rng(rng)
    policy = policy or spec.fill_policy
    if policy not in ("random", "nsga2"):
        raise ConfigurationError(f"unknown fill policy {policy!r}")
    pop, gens = spec.fill_nsga
    params = NsgaParams(parent_pop_size=pop, max_generations=gens)
    config = ScoreConfig(n_areas=spec.fill_areas)
    by = spec.fill_by
    total_volume = float(state.index.comp_volume.sum())
    products = state.products
    numbers = sorted(products)
    unit = sum(products[p].target_quantity * products[p].volume for p in numbers)
    while state.index.fill_ratio(by) < spec.fill_fraction:
        scale = (spec.fill_fraction - state.index.fill_ratio(by)) * total_volume / unit
        progressed = False
        for p in rng.permutation(numbers):
            prod = products[int(p)]
            ratio = state.index.fill_ratio(by)
            if ratio >= spec.fill_fraction:
                break
            if by == "volume":
                left = (spec.fill_fraction - ratio) * total_volume
                qty = min(max(1, round(scale * prod.target_quantity)), max(1, math.ceil(left / prod.volume)))
            else:
                qty = prod.target_quantity
            task = AssignmentTask(int(p), qty)
            try:
                if policy == "random":
                    alloc = _random_allocation(state, task, rng)
                else:
                    seed = int(rng.integers(2 ** 31))
                    alloc = solve_storage(state, task, "nsga2", replace(params, seed=seed), config, seed=seed).allocation
            except InfeasibleTaskError:
                continue
            state = apply_allocation(state, alloc)
            progressed = True
        if not progressed:
            raise ConfigurationError(f"fill fraction {spec.fill_fraction} is unreachable")
    return state


# -- whole instance -----------------------------------------------------------

@dataclass
class Instance:
    spec: GenSpec
    warehouse: Warehouse
    orders: tuple[Order, ...]
    meta: dict = field(default_factory=dict)


def empty_warehouse(spec: GenSpec, rng) -> Warehouse:
    rng = _rng(rng)
    layout = build_layout(spec)
    racks = build_racks(spec, rng)
    products = generate_products(spec, rng)
    rules = generate_correlations(products, rng, spec.correlation_probs, spec.confidence_range)
    return Warehouse(layout, tuple(range(1, spec.floors + 1)), racks, rack_configurations(), products, rules,
                     (), {"size": spec.size})


def generate_instance(spec: GenSpec, seed: int | None = None, policy: str | None = None) -> Instance:
    """Warehouse (filled), orders, and rules from one seed; independent streams per artifact."""
    seed = spec.seed if seed is None else seed
    s_struct, s_fill, s_orders = np.random.SeedSequence(seed).spawn(3)
    wh = empty_warehouse(spec, np.random.default_rng(s_struct))
    wh = fill_warehouse(wh, spec, np.random.default_rng(s_fill), policy)
    orders = generate_orders(wh.products, np.random.default_rng(s_orders), spec.n_orders, spec.order_lines,
                             spec.quartile_probs, stock_levels(wh))
    return Instance(spec, wh, orders, {"seed": seed, "fill_policy": policy or spec.fill_policy})
