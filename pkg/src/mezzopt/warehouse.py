"""Domain model of a mezzanine warehouse.

Layout, racks, compartments, products, orders and association rules, plus the
geometry, capacity and hard-constraint checks that both optimizers rely on.
A :class:`Warehouse` is an immutable value; stock changes produce a new
instance through :func:`apply_allocation`.
"""

from __future__ import annotations

import bisect
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, UsageError

GRIP_LOW = 0.75
GRIP_HIGH = 1.25
LIGHT_MAX_KG = 3.0
MEDIUM_MAX_KG = 7.0

Point = tuple[float, ...]


def manhattan_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """Sum of absolute coordinate differences."""
    if len(p) != len(q):
        raise UsageError(f"dimension mismatch: {len(p)} vs {len(q)}")
    return sum(abs(a - b) for a, b in zip(p, q))


@dataclass(frozen=True)
class FloorLayout:
    """Top-down grid of one floor. Every floor of a warehouse shares it."""

    width: float
    height: float
    pd_points: tuple[tuple[float, float], ...]
    cross_aisle_rows: tuple[float, ...]
    pick_aisle_columns: tuple[tuple[float, str], ...]

    def __post_init__(self):
        for x, kind in self.pick_aisle_columns:
            if kind not in ("wide", "narrow"):
                raise ConfigurationError(f"unknown aisle kind {kind!r} at x={x}")
        rows = tuple(sorted(self.cross_aisle_rows))
        object.__setattr__(self, "cross_aisle_rows", rows)

    def on_periphery(self, point: Sequence[float]) -> bool:
        x, y = point
        if x in (0, self.width) and 0 <= y <= self.height:
            return True
        if self.cross_aisle_rows and y in (self.cross_aisle_rows[0], self.cross_aisle_rows[-1]):
            return 0 <= x <= self.width
        return False

    @property
    def lane_bounds(self) -> list[tuple[float, float]]:
        """Vertical lanes delimited by the periphery and the wide pick aisles."""
        cuts = [0.0] + sorted(x for x, kind in self.pick_aisle_columns if kind == "wide") + [self.width]
        return [(lo, hi) for lo, hi in zip(cuts, cuts[1:]) if hi > lo]

    def lane_of(self, x: float) -> int:
        bounds = self.lane_bounds
        for i, (lo, hi) in enumerate(bounds):
            if lo <= x < hi:
                return i
        return len(bounds) - 1

    def cross_segment(self, y: float) -> int:
        """Index of the cross aisle directly below ``y``."""
        rows = self.cross_aisle_rows
        for i in range(len(rows) - 1):
            if rows[i] <= y < rows[i + 1]:
                return i
        raise ConfigurationError(f"y={y} lies outside the cross aisles")


@dataclass(frozen=True)
class Compartment:
    compartment_id: int
    dimensions: tuple[float, float, float]  # width, height, depth in meters
    shelf_level: int
    shelf_position: int
    bottom_height: float

    def __post_init__(self):
        if min(self.dimensions) <= 0:
            raise ConfigurationError(f"compartment {self.compartment_id} has non-positive size")

    @property
    def volume(self) -> float:
        w, h, d = self.dimensions
        return w * h * d


@dataclass(frozen=True)
class RackConfiguration:
    configuration_id: int
    shelf_levels: int
    compartments_per_shelf: int
    compartments: tuple[Compartment, ...]

    def __post_init__(self):
        slots = [(c.shelf_level, c.shelf_position) for c in self.compartments]
        if len(set(slots)) != len(slots):
            raise ConfigurationError(f"configuration {self.configuration_id} reuses a shelf slot")

    @classmethod
    def uniform(cls, configuration_id: int, shelf_levels: int, per_shelf: int,
                rack_size: tuple[float, float, float] = (1.0, 2.0, 0.6)) -> "RackConfiguration":
        """Equal-sized compartments on equally spaced shelves."""
        w, h, d = rack_size
        cw, ch = w / per_shelf, h / shelf_levels
        comps = []
        for level in range(shelf_levels):
            for pos in range(per_shelf):
                comps.append(Compartment(level * per_shelf + pos + 1, (cw, ch, d), level, pos, level * ch))
        return cls(configuration_id, shelf_levels, per_shelf, tuple(comps))


@dataclass(frozen=True)
class Rack:
    rack_id: int
    floor_id: int
    access_point: tuple[float, float]
    bay_number: int
    block_id: int
    sub_aisle_id: int
    side: str  # "left" or "right" of its pick aisle
    configuration_id: int

    def __post_init__(self):
        if self.bay_number < 1:
            raise ConfigurationError(f"rack {self.rack_id}: bay_number must be >= 1")
        if self.side not in ("left", "right"):
            raise ConfigurationError(f"rack {self.rack_id}: side must be left or right")


@dataclass(frozen=True)
class Product:
    product_number: int
    dimensions: tuple[float, float, float]
    weight: float
    rank: int
    mu: float
    sigma: float

    def __post_init__(self):
        if self.weight <= 0:
            raise ConfigurationError(f"product {self.product_number}: weight must be positive")
        if self.rank < 1:
            raise ConfigurationError(f"product {self.product_number}: rank must be >= 1")
        if self.sigma < 0:
            raise ConfigurationError(f"product {self.product_number}: sigma must be >= 0")

    @property
    def target_quantity(self) -> int:
        """Quantity that should be locally available, ceil(mu + 2 sigma), at least 1."""
        return max(1, math.ceil(self.mu + 2 * self.sigma - 1e-9))

    @property
    def volume(self) -> float:
        w, h, d = self.dimensions
        return w * h * d


@dataclass(frozen=True)
class ProductAssignment:
    floor_id: int
    rack_id: int
    compartment_id: int
    product_number: int
    quantity: int


@dataclass(frozen=True)
class OrderLine:
    product_number: int
    quantity: int


@dataclass(frozen=True)
class Order:
    order_number: int
    lines: tuple[OrderLine, ...]

    def __post_init__(self):
        numbers = [ln.product_number for ln in self.lines]
        if len(set(numbers)) != len(numbers):
            raise UsageError(f"order {self.order_number} repeats a product")
        if any(ln.quantity < 1 for ln in self.lines):
            raise UsageError(f"order {self.order_number} has a non-positive quantity")


@dataclass(frozen=True)
class AssociationRule:
    lhs: int
    rhs: int
    confidence: float

    def __post_init__(self):
        if self.lhs == self.rhs:
            raise ConfigurationError(f"self rule for product {self.lhs}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ConfigurationError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class Placement:
    floor_id: int
    rack_id: int
    compartment_id: int
    quantity: int


@dataclass(frozen=True)
class StorageAllocation:
    """Where the incoming items of one product go, plus the scores of that choice."""

    product_number: int
    quantity: int
    placements: tuple[Placement, ...]
    scores: tuple[float, ...] = ()


@dataclass(frozen=True)
class Violation:
    constraint: str  # "HC1", "HC2", "HC3", "IV" (one rack per sub-aisle and visit) or "REF"
    message: str


def compartment_capacity(compartment: Compartment, product: Product) -> int:
    """Items of ``product`` that fit into an empty ``compartment`` (axis-aligned, no rotation)."""
    count = 1
    for c, i in zip(compartment.dimensions, product.dimensions):
        n = math.floor(c / i + 1e-9)
        if n < 1:
            return 0
        count *= n
    return count


def zone_of(compartment: Compartment) -> str:
    """Classify a compartment as low, grip or high by its vertical extent."""
    bottom = compartment.bottom_height
    if bottom < 0:
        raise UsageError("bottom height must be >= 0")
    top = bottom + compartment.dimensions[1]
    if top < GRIP_LOW:
        return "low"
    if bottom > GRIP_HIGH:
        return "high"
    return "grip"


def weight_class(product: Product) -> str:
    if product.weight <= LIGHT_MAX_KG:
        return "light"
    if product.weight <= MEDIUM_MAX_KG:
        return "medium"
    return "heavy"


def relative_rank(product: Product, assortment_size: int) -> float:
    if assortment_size < 1:
        raise UsageError("assortment size must be >= 1")
    return product.rank / assortment_size


def movement_class(product: Product, assortment_size: int) -> str:
    rel = relative_rank(product, assortment_size)
    if rel <= 1 / 3:
        return "fast"
    if rel <= 2 / 3:
        return "moderate"
    return "slow"


def rack_walk_distance(rack: Rack, layout: FloorLayout) -> float:
    """Manhattan distance from the rack's access point to its closest p/d-point."""
    if not layout.pd_points:
        raise ConfigurationError("floor has no p/d-point")
    return min(manhattan_distance(rack.access_point, pd) for pd in layout.pd_points)


class WarehouseIndex:
    """Array views over a warehouse, built once per (immutable) state."""

    def __init__(self, wh: "Warehouse"):
        self.racks = list(wh.racks)
        self.rack_pos = {(r.floor_id, r.rack_id): i for i, r in enumerate(self.racks)}
        self.floors = sorted({r.floor_id for r in self.racks})
        self.floor_racks = {f: np.array([i for i, r in enumerate(self.racks) if r.floor_id == f], dtype=np.int64)
                            for f in self.floors}
        comps, comp_rack = [], []
        for i, r in enumerate(self.racks):
            cfg = wh.configurations[r.configuration_id]
            for c in cfg.compartments:
                comps.append(c)
                comp_rack.append(i)
        self.compartments = comps
        self.comp_rack = np.array(comp_rack, dtype=np.int64)
        self.comp_pos = {(self.racks[ri].floor_id, self.racks[ri].rack_id, c.compartment_id): k
                         for k, (ri, c) in enumerate(zip(comp_rack, comps))}
        self.comp_dims = np.array([c.dimensions for c in comps], dtype=float).reshape(-1, 3)
        self.comp_volume = np.prod(self.comp_dims, axis=1)
        self.comp_product = np.full(len(comps), -1, dtype=np.int64)
        self.comp_qty = np.zeros(len(comps), dtype=np.int64)
        for a in wh.assignments:
            k = self.comp_pos[(a.floor_id, a.rack_id, a.compartment_id)]
            self.comp_product[k] = a.product_number
            self.comp_qty[k] += a.quantity
        self.rack_distance = np.array([rack_walk_distance(r, wh.layout) for r in self.racks])
        self.products = wh.products

    def with_placements(self, product_number: int, placements: Iterable["Placement"]) -> "WarehouseIndex":
        """Copy of this index with extra stock; structure arrays are shared."""
        new = object.__new__(WarehouseIndex)
        new.__dict__.update(self.__dict__)
        new.comp_product = self.comp_product.copy()
        new.comp_qty = self.comp_qty.copy()
        for p in placements:
            k = self.comp_pos[(p.floor_id, p.rack_id, p.compartment_id)]
            new.comp_product[k] = product_number
            new.comp_qty[k] += p.quantity
        return new

    def capacity_for(self, product: Product) -> np.ndarray:
        """Per-compartment remaining capacity for ``product`` (HC2 and HC3 applied)."""
        ratios = np.floor(self.comp_dims / np.asarray(product.dimensions) + 1e-9)
        cap = np.where((ratios >= 1).all(axis=1), ratios.prod(axis=1), 0).astype(np.int64)
        free = np.where(self.comp_product == product.product_number, cap - self.comp_qty, cap)
        free = np.where((self.comp_product == -1) | (self.comp_product == product.product_number), free, 0)
        return np.maximum(free, 0)

    def rack_capacity_for(self, product: Product) -> np.ndarray:
        return np.bincount(self.comp_rack, weights=self.capacity_for(product),
                           minlength=len(self.racks)).astype(np.int64)

    def rack_quantity_of(self, product_number: int) -> np.ndarray:
        held = np.where(self.comp_product == product_number, self.comp_qty, 0)
        return np.bincount(self.comp_rack, weights=held, minlength=len(self.racks)).astype(np.int64)

    @cached_property
    def product_volume(self) -> np.ndarray:
        """Item volume indexed by product number (0 for unknown numbers)."""
        top = max(self.products, default=0)
        vol = np.zeros(top + 1)
        for pn, prod in self.products.items():
            vol[pn] = prod.volume
        return vol

    def stored_volume(self) -> float:
        held = self.comp_product >= 0
        return float((self.comp_qty[held] * self.product_volume[self.comp_product[held]]).sum())

    def fill_ratio(self, by: str = "volume") -> float:
        if by == "compartments":
            return float((self.comp_product >= 0).mean())
        return self.stored_volume() / float(self.comp_volume.sum())


@dataclass(frozen=True)
class Warehouse:
    """Structure and state of a mezzanine warehouse (all floors share ``layout``)."""

    layout: FloorLayout
    floors: tuple[int, ...]
    racks: tuple[Rack, ...]
    configurations: dict[int, RackConfiguration]
    products: dict[int, Product]
    rules: tuple[AssociationRule, ...] = ()
    assignments: tuple[ProductAssignment, ...] = ()
    meta: dict = field(default_factory=dict, compare=False)

    @cached_property
    def index(self) -> WarehouseIndex:
        return WarehouseIndex(self)

    def rack(self, floor_id: int, rack_id: int) -> Rack:
        return self.racks[self.index.rack_pos[(floor_id, rack_id)]]

    def compartment(self, floor_id: int, rack_id: int, compartment_id: int) -> Compartment:
        return self.index.compartments[self.index.comp_pos[(floor_id, rack_id, compartment_id)]]

    def rules_for(self, product_number: int) -> list[AssociationRule]:
        return [r for r in self.rules if r.lhs == product_number]

    def quantity_on_floor(self, product_number: int) -> dict[int, int]:
        idx = self.index
        per_rack = idx.rack_quantity_of(product_number)
        return {f: int(per_rack[idx.floor_racks[f]].sum()) for f in self.floors}

    def check(self) -> list[str]:
        """Structural problems of the instance (empty list when sound)."""
        problems = []
        seen = set()
        for r in self.racks:
            key = (r.floor_id, r.rack_id)
            if key in seen:
                problems.append(f"duplicate rack id {key}")
            seen.add(key)
            if r.configuration_id not in self.configurations:
                problems.append(f"rack {key} uses unknown configuration {r.configuration_id}")
            x, y = r.access_point
            if not (0 <= x <= self.layout.width and 0 <= y <= self.layout.height):
                problems.append(f"rack {key} access point outside the floor")
            if y in self.layout.cross_aisle_rows:
                problems.append(f"rack {key} sits on a cross aisle")
        for pd in self.layout.pd_points:
            if not self.layout.on_periphery(pd):
                problems.append(f"p/d-point {pd} is not on a periphery aisle")
        for a in self.assignments:
            if a.product_number not in self.products:
                problems.append(f"assignment references unknown product {a.product_number}")
        for rule in self.rules:
            if rule.lhs not in self.products or rule.rhs not in self.products:
                problems.append(f"rule {rule.lhs}->{rule.rhs} references unknown product")
        return problems


def remaining_capacity(state: Warehouse, ref: tuple[int, int, int], product: Product) -> int:
    """Free places for ``product`` in the compartment ``ref`` = (floor, rack, compartment)."""
    k = state.index.comp_pos[ref]
    holder = int(state.index.comp_product[k])
    if holder not in (-1, product.product_number):
        return 0
    cap = compartment_capacity(state.index.compartments[k], product)
    if holder == -1:
        return cap
    return max(0, cap - int(state.index.comp_qty[k]))


def validate_storage_solution(state: Warehouse, allocation: StorageAllocation) -> list[Violation]:
    """Check HC1 (all items placed), HC2 (one product per compartment), HC3 (capacity)."""
    out: list[Violation] = []
    product = state.products.get(allocation.product_number)
    if product is None:
        return [Violation("REF", f"unknown product {allocation.product_number}")]
    placed = sum(p.quantity for p in allocation.placements)
    if placed != allocation.quantity:
        out.append(Violation("HC1", f"{placed} of {allocation.quantity} items placed"))
    per_comp: dict[tuple[int, int, int], int] = defaultdict(int)
    for p in allocation.placements:
        key = (p.floor_id, p.rack_id, p.compartment_id)
        if key not in state.index.comp_pos:
            out.append(Violation("REF", f"unknown compartment {key}"))
            continue
        if p.quantity < 1:
            out.append(Violation("HC1", f"non-positive quantity at {key}"))
        per_comp[key] += p.quantity
    for key, qty in per_comp.items():
        k = state.index.comp_pos[key]
        holder = int(state.index.comp_product[k])
        if holder not in (-1, product.product_number):
            out.append(Violation("HC2", f"compartment {key} holds product {holder}"))
            continue
        free = remaining_capacity(state, key, product)
        if qty > free:
            out.append(Violation("HC3", f"compartment {key}: {qty} items exceed free space {free}"))
    return out


def validate_state(state: Warehouse) -> list[Violation]:
    """HC2/HC3 over all stored stock."""
    out = []
    holders: dict[tuple[int, int, int], set] = defaultdict(set)
    totals: dict[tuple[int, int, int], int] = defaultdict(int)
    for a in state.assignments:
        key = (a.floor_id, a.rack_id, a.compartment_id)
        holders[key].add(a.product_number)
        totals[key] += a.quantity
        if a.quantity < 1:
            out.append(Violation("HC1", f"non-positive stock at {key}"))
    for key, prods in holders.items():
        if len(prods) > 1:
            out.append(Violation("HC2", f"compartment {key} holds {sorted(prods)}"))
            continue
        (pn,) = prods
        cap = compartment_capacity(state.compartment(*key), state.products[pn])
        if totals[key] > cap:
            out.append(Violation("HC3", f"compartment {key}: {totals[key]} > capacity {cap}"))
    return out


def _key(a: ProductAssignment) -> tuple[int, int, int]:
    return (a.floor_id, a.rack_id, a.compartment_id)


def apply_allocation(state: Warehouse, allocation: StorageAllocation) -> Warehouse:
    """New state with the allocation's items added to stock (assignments stay sorted by key)."""
    keys = state.__dict__.get("_sorted_keys")
    if keys is None:
        assignments = sorted(state.assignments, key=_key)
        keys = [_key(a) for a in assignments]
    else:
        keys, assignments = list(keys), list(state.assignments)
    for p in allocation.placements:
        key = (p.floor_id, p.rack_id, p.compartment_id)
        i = bisect.bisect_left(keys, key)
        if i < len(keys) and keys[i] == key:
            qty = p.quantity + assignments[i].quantity
            assignments[i] = ProductAssignment(*key, allocation.product_number, qty)
        else:
            keys.insert(i, key)
            assignments.insert(i, ProductAssignment(*key, allocation.product_number, p.quantity))
    new = _with_assignments(state, tuple(assignments))
    new.__dict__["_sorted_keys"] = keys
    if "index" in state.__dict__:
        new.__dict__["index"] = state.index.with_placements(allocation.product_number, allocation.placements)
    return new


def apply_allocations(state: Warehouse, allocations: Iterable[StorageAllocation]) -> Warehouse:
    for alloc in allocations:
        state = apply_allocation(state, alloc)
    return state


def _with_assignments(state: Warehouse, assignments: tuple[ProductAssignment, ...]) -> Warehouse:
    return Warehouse(state.layout, state.floors, state.racks, state.configurations,
                     state.products, state.rules, assignments, dict(state.meta))
