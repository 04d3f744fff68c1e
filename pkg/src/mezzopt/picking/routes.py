"""Pick routes: construction from market sequences, objectives, reversal, validation."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..warehouse import Violation
from .graph import MarketGraph, OrderContext, rack_stock

ALLOWED_WEIGHT_DIFFERENCE = 3.0


@dataclass(frozen=True)
class RackVisit:
    visit: int            # position in the market sequence
    floor_id: int
    rack_id: int
    depth: float
    picks: tuple[tuple[int, int], ...]   # (product, quantity), in picking order


@dataclass(frozen=True)
class PickRoute:
    order_number: int
    markets: tuple[int, ...]
    sides: tuple[tuple[str, str], ...]   # (entry, exit) per market visit
    racks: tuple[RackVisit, ...]
    start_pd: int | None
    end_pd: int | None
    distance: float
    violations: int

    @property
    def objectives(self) -> tuple[float, int]:
        return (self.distance, self.violations)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a, b in zip(self.markets, self.markets[1:]) if a != b]

    def pick_sequence(self) -> list[tuple[int, int]]:
        return [p for rv in self.racks for p in rv.picks]


def _toggle(side: str) -> str:
    return "right" if side == "left" else "left"


def route_sides(graph: MarketGraph, markets) -> tuple[tuple[str, str], ...]:
    """Entry side from the previous position, exit side towards the next one."""
    layout = graph.state.layout
    out = []
    for i, m in enumerate(markets):
        mk = graph.markets[m]
        x = mk.coordinates[0]
        prev_x = graph.markets[markets[i - 1]].coordinates[0] if i else layout.pd_points[mk.closest_pd][0]
        nxt_x = graph.markets[markets[i + 1]].coordinates[0] if i + 1 < len(markets) \
            else layout.pd_points[mk.closest_pd][0]
        entry = "left" if prev_x <= x else "right"
        if nxt_x > x:
            exit_ = "right"
        elif nxt_x < x:
            exit_ = "left"
        else:
            exit_ = entry
        out.append((entry, exit_))
    return tuple(out)


def travel_distance(graph: MarketGraph, route: PickRoute) -> float:
    """p/d to first market, sub-aisle round trips, cross-lane traversals, edges, last market to p/d."""
    if not route.markets:
        return 0.0
    ms = graph.markets
    total = ms[route.markets[0]].pd_distance + ms[route.markets[-1]].pd_distance
    for m, (entry, exit_) in zip(route.markets, route.sides):
        if entry != exit_:
            total += ms[m].width
    total += sum(2.0 * rv.depth for rv in route.racks)
    total += sum(float(graph.distance[a, b]) for a, b in zip(route.markets, route.markets[1:]))
    return float(total)


def weight_violations(weights, allowed: float = ALLOWED_WEIGHT_DIFFERENCE) -> int:
    """Picks heavier than the lightest earlier pick by more than ``allowed``."""
    count = 0
    lightest = np.inf
    for w in weights:
        if w > lightest + allowed:
            count += 1
        lightest = min(lightest, w)
    return count


def build_route(ctx: OrderContext, seq, picks, sides=None,
                allowed: float = ALLOWED_WEIGHT_DIFFERENCE) -> PickRoute:
    """Assemble a route from a kernel market sequence and its pick records."""
    graph = ctx.graph
    seq = tuple(int(m) for m in seq)
    grouped: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for visit, z, ln, qty in np.asarray(picks).reshape(-1, 4).tolist():
        grouped.setdefault((visit, z), []).append((ctx.products[ln], qty))
    racks = []
    for (visit, z), items in grouped.items():
        zr = ctx.zr_rack[z]
        racks.append(RackVisit(visit, zr.floor_id, zr.rack_id, zr.depth, tuple(items)))
    sides = sides if sides is not None else route_sides(graph, seq)
    weight = {p: w for p, w in zip(ctx.products, ctx.weights)}
    viol = weight_violations([weight[p] for rv in racks for p, _ in rv.picks], allowed)
    start = graph.markets[seq[0]].closest_pd if seq else None
    end = graph.markets[seq[-1]].closest_pd if seq else None
    route = PickRoute(ctx.order.order_number, seq, tuple(sides), tuple(racks), start, end, 0.0, viol)
    return _with_distance(graph, route)


def _with_distance(graph, route: PickRoute) -> PickRoute:
    return PickRoute(route.order_number, route.markets, route.sides, route.racks, route.start_pd,
                     route.end_pd, travel_distance(graph, route), route.violations)


def replay_route(ctx: OrderContext, markets, sides=None,
                 allowed: float = ALLOWED_WEIGHT_DIFFERENCE) -> PickRoute | None:
    """Collect greedily along a fixed market sequence; None if the order stays incomplete."""
    seq, picks, unmet = kernels.replay(np.asarray(markets, dtype=np.int64), ctx.need, ctx.supply, ctx.zr_start,
                                       ctx.zr_sub, ctx.zh_start, ctx.zh_line, ctx.zh_qty,
                                       ctx.graph.n_sub_aisles)
    if unmet:
        return None
    return build_route(ctx, seq, picks, sides, allowed)


def reverse_route(ctx: OrderContext, route: PickRoute,
                  allowed: float = ALLOWED_WEIGHT_DIFFERENCE) -> PickRoute | None:
    """Reverse the market sequence, toggle the sides and recollect in priority order."""
    markets = route.markets[::-1]
    sides = tuple((_toggle(a), _toggle(b)) for a, b in route.sides[::-1])
    return replay_route(ctx, markets, sides, allowed)


def validate_route(ctx: OrderContext, route: PickRoute) -> list[Violation]:
    """Hard constraints of a pick route (plus the one-rack-per-sub-aisle-per-visit rule)."""
    graph = ctx.graph
    out = []
    if route.markets:
        first, last = graph.markets[route.markets[0]], graph.markets[route.markets[-1]]
        n_pd = len(graph.state.layout.pd_points)
        if route.start_pd is None or not 0 <= route.start_pd < n_pd or route.end_pd is None \
                or not 0 <= route.end_pd < n_pd:
            out.append(Violation("HC1", "route does not start and end at p/d-points"))
        elif route.start_pd != first.closest_pd or route.end_pd != last.closest_pd:
            out.append(Violation("HC1", "route p/d-points are not the closest ones"))
    elif ctx.order.lines:
        out.append(Violation("HC1", "non-empty order with an empty route"))
    picked: dict[int, int] = defaultdict(int)
    taken: dict[tuple[int, int, int], int] = defaultdict(int)
    per_visit: dict[tuple[int, int], int] = defaultdict(int)
    zone_of = {}
    for mi, m in enumerate(graph.markets):
        for z in m.zone:
            zone_of[(z.floor_id, z.rack_id)] = (mi, z)
    for rv in route.racks:
        key = (rv.floor_id, rv.rack_id)
        if key not in zone_of or not 0 <= rv.visit < len(route.markets) \
                or zone_of[key][0] != route.markets[rv.visit]:
            out.append(Violation("HC2", f"rack {key} is not in the zone of visit {rv.visit}"))
            continue
        z = zone_of[key][1]
        per_visit[(rv.visit, z.sub_aisle)] += 1
        stock = rack_stock(graph.state, z.rack_index)
        for p, q in rv.picks:
            picked[p] += q
            taken[(rv.floor_id, rv.rack_id, p)] += q
            if taken[(rv.floor_id, rv.rack_id, p)] > stock.get(p, 0):
                out.append(Violation("HC2", f"rack {key} holds fewer than the picked items of {p}"))
    for (visit, sa), n in per_visit.items():
        if n > 1:
            out.append(Violation("IV", f"visit {visit} enters sub-aisle {sa} for {n} racks"))
    for ln in ctx.order.lines:
        if picked.get(ln.product_number, 0) != ln.quantity:
            out.append(Violation("HC2", f"product {ln.product_number}: picked "
                                        f"{picked.get(ln.product_number, 0)} of {ln.quantity}"))
    extra = set(picked) - {ln.product_number for ln in ctx.order.lines}
    if extra:
        out.append(Violation("HC2", f"picked products outside the order: {sorted(extra)}"))
    if abs(travel_distance(graph, route) - route.distance) > 1e-9:
        out.append(Violation("HC3", "stored travel distance disagrees with the route"))
    return out
