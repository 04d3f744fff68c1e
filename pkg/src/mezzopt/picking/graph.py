"""Market graph: one node per (floor, cross aisle, lane) with the racks it reaches.

A market's zone holds the racks whose access points lie in the sub-aisle half
next to its cross aisle; racks exactly at a sub-aisle midpoint belong to the
lower cross aisle. Edges connect every ordered pair of markets with the
Manhattan distance of their centres, plus a penalty when the floors differ.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, InfeasibleOrderError, UsageError
from ..warehouse import Order, Warehouse, manhattan_distance

FLOOR_PENALTY = 50.0


@dataclass(frozen=True)
class ZoneRack:
    floor_id: int
    rack_id: int
    sub_aisle: int        # global sub-aisle index (floor-qualified)
    depth: float          # distance from the cross lane into the sub-aisle
    rack_index: int       # position in warehouse.index.racks


@dataclass
class Market:
    market_id: int
    floor_id: int
    cross_aisle: int
    lane: int
    coordinates: tuple[float, float]
    lane_bounds: tuple[float, float]
    closest_pd: int
    pd_distance: float
    zone: list[ZoneRack] = field(default_factory=list)
    supply: dict[int, int] = field(default_factory=dict)

    @property
    def width(self) -> float:
        return self.lane_bounds[1] - self.lane_bounds[0]


@dataclass
class MarketGraph:
    state: Warehouse
    markets: list[Market]
    distance: np.ndarray      # (M, M) edge weights
    floor_penalty: float
    n_sub_aisles: int
    grid_shape: tuple[int, int]   # cross aisles, lanes (per floor)

    def __len__(self):
        return len(self.markets)

    def market_at(self, floor_id: int, cross_aisle: int, lane: int) -> Market:
        for m in self.markets:
            if (m.floor_id, m.cross_aisle, m.lane) == (floor_id, cross_aisle, lane):
                return m
        raise KeyError((floor_id, cross_aisle, lane))

    def total_supply(self, product_number: int) -> int:
        return sum(m.supply.get(product_number, 0) for m in self.markets)

    def context(self, order: Order) -> "OrderContext":
        return OrderContext.build(self, order)


def build_market_graph(state: Warehouse, floor_penalty: float = FLOOR_PENALTY) -> MarketGraph:
    layout = state.layout
    rows = layout.cross_aisle_rows
    if len(rows) < 1:
        raise ConfigurationError("floor has no cross aisles")
    if not layout.pd_points:
        raise ConfigurationError("floor has no p/d-point")
    lanes = layout.lane_bounds
    markets: list[Market] = []
    key_of = {}
    for f in state.floors:
        for c, y in enumerate(rows):
            for l, (lo, hi) in enumerate(lanes):
                centre = ((lo + hi) / 2, y)
                pd_d = [manhattan_distance(centre, pd) for pd in layout.pd_points]
                best = int(np.argmin(pd_d))
                key_of[(f, c, l)] = len(markets)
                markets.append(Market(len(markets), f, c, l, centre, (lo, hi), best, float(pd_d[best])))

    idx = state.index
    sub_keys: dict[tuple[int, int], int] = {}
    for ri, rack in enumerate(idx.racks):
        x, y = rack.access_point
        s = layout.cross_segment(y) if y < rows[-1] else len(rows) - 2
        y0, y1 = rows[s], rows[s + 1]
        if y - y0 <= y1 - y:
            c, depth = s, y - y0
        else:
            c, depth = s + 1, y1 - y
        sa = sub_keys.setdefault((rack.floor_id, rack.sub_aisle_id), len(sub_keys))
        m = markets[key_of[(rack.floor_id, c, layout.lane_of(x))]]
        m.zone.append(ZoneRack(rack.floor_id, rack.rack_id, sa, float(depth), ri))
    for m in markets:
        m.zone.sort(key=lambda z: (z.depth, z.rack_id))
        supply: dict[int, int] = {}
        for z in m.zone:
            for k in np.nonzero(idx.comp_rack == z.rack_index)[0]:
                pn = int(idx.comp_product[k])
                if pn >= 0:
                    supply[pn] = supply.get(pn, 0) + int(idx.comp_qty[k])
        m.supply = dict(sorted(supply.items()))

    M = len(markets)
    pos = np.array([m.coordinates for m in markets], dtype=float)
    floors = np.array([m.floor_id for m in markets])
    dist = np.abs(pos[:, None, :] - pos[None, :, :]).sum(axis=2)
    dist = dist + floor_penalty * (floors[:, None] != floors[None, :])
    if M > 1 and (dist + np.eye(M))[~np.eye(M, dtype=bool)].min() <= 0:
        raise ConfigurationError("markets must not share coordinates")
    return MarketGraph(state, markets, dist, floor_penalty, len(sub_keys), (len(rows), len(lanes)))


def rack_stock(state: Warehouse, rack_index: int) -> dict[int, int]:
    idx = state.index
    out: dict[int, int] = {}
    for k in np.nonzero(idx.comp_rack == rack_index)[0]:
        pn = int(idx.comp_product[k])
        if pn >= 0:
            out[pn] = out.get(pn, 0) + int(idx.comp_qty[k])
    return out


@dataclass
class OrderContext:
    """Order-specific flat arrays consumed by the route kernels.

    Zone racks (``z``) list, per market, only racks holding order products, in
    visiting priority: heavier products first, then closer to the cross lane,
    then more useful items. Holdings (``h``) list per zone rack the order lines
    it can serve, heaviest product first.
    """

    graph: MarketGraph
    order: Order
    products: list[int]
    weights: np.ndarray
    need: np.ndarray
    supply: np.ndarray          # (M, L)
    zr_start: np.ndarray
    zr_sub: np.ndarray
    zr_rack: list[ZoneRack]
    zr_market: np.ndarray
    zh_start: np.ndarray
    zh_line: np.ndarray
    zh_qty: np.ndarray

    @classmethod
    def build(cls, graph: MarketGraph, order: Order) -> "OrderContext":
        state = graph.state
        products = [ln.product_number for ln in order.lines]
        for p in products:
            if p not in state.products:
                raise UsageError(f"order {order.order_number} references unknown product {p}")
        line_of = {p: i for i, p in enumerate(products)}
        weights = np.array([state.products[p].weight for p in products], dtype=float)
        need = np.array([ln.quantity for ln in order.lines], dtype=np.int64)
        M, L = len(graph.markets), len(products)
        supply = np.zeros((M, L), dtype=np.int64)
        zr_start, zr_sub, zr_rack, zr_market = [0], [], [], []
        zh_start, zh_line, zh_qty = [0], [], []
        for mi, m in enumerate(graph.markets):
            rows = []
            for z in m.zone:
                stock = rack_stock(state, z.rack_index)
                held = [(line_of[p], q) for p, q in stock.items() if p in line_of and q > 0]
                if not held:
                    continue
                held.sort(key=lambda h: (-weights[h[0]], h[0]))
                useful = sum(min(q, need[ln]) for ln, q in held)
                rows.append(((-weights[held[0][0]], z.depth, -useful, z.rack_id), z, held))
            rows.sort(key=lambda r: r[0])
            for _, z, held in rows:
                zr_sub.append(z.sub_aisle)
                zr_rack.append(z)
                zr_market.append(mi)
                for ln, q in held:
                    zh_line.append(ln)
                    zh_qty.append(q)
                    supply[mi, ln] += q
                zh_start.append(len(zh_line))
            zr_start.append(len(zr_sub))
        short = [products[i] for i in range(L) if supply[:, i].sum() < need[i]]
        if short:
            raise InfeasibleOrderError(f"order {order.order_number}: insufficient stock of products {short}")
        i64 = lambda a: np.asarray(a, dtype=np.int64)
        return cls(graph, order, products, weights, need, supply, i64(zr_start), i64(zr_sub), zr_rack,
                   i64(zr_market), i64(zh_start), i64(zh_line), i64(zh_qty))

    @property
    def n_lines(self) -> int:
        return len(self.products)
