"""S-shape reference routes over the market grid."""

from __future__ import annotations

import numpy as np

from .. import kernels
from .graph import MarketGraph, OrderContext
from .aco import pareto_routes
from .routes import ALLOWED_WEIGHT_DIFFERENCE, PickRoute, replay_route, reverse_route

MAX_PASSES = 20


def serpentine(graph: MarketGraph) -> list[int]:
    """All markets, floor by floor, lane by lane, alternating the cross-aisle direction."""
    n_cross, n_lanes = graph.grid_shape
    order = []
    up = True
    for f in graph.state.floors:
        for lane in range(n_lanes):
            cs = range(n_cross) if up else range(n_cross - 1, -1, -1)
            order.extend(graph.market_at(f, c, lane).market_id for c in cs)
            up = not up
    return order


def _unmet(ctx: OrderContext, seq) -> int:
    return int(kernels.replay(np.asarray(seq, dtype=np.int64), ctx.need, ctx.supply, ctx.zr_start, ctx.zr_sub,
                              ctx.zh_start, ctx.zh_line, ctx.zh_qty, ctx.graph.n_sub_aisles)[2])


def s_shape_sequence(ctx: OrderContext, start: int) -> list[int]:
    """Follow the serpentine from ``start``, stopping only where something is still missing."""
    cycle = serpentine(ctx.graph)
    k = cycle.index(start)
    cycle = cycle[k:] + cycle[:k]
    seq: list[int] = []
    left = int(ctx.need.sum())
    for _ in range(MAX_PASSES):
        for i, m in enumerate(cycle):
            if left == 0:
                return seq
            back = seq and seq[-1] == m
            if back and len(cycle) == 1:
                continue
            after = _unmet(ctx, seq + [m])
            if after < left:
                if back:
                    seq.append(cycle[i - 1])    # walked through, nothing to pick there
                seq.append(m)
                left = after
    return seq


def s_shape_routes(ctx: OrderContext, allowed: float = ALLOWED_WEIGHT_DIFFERENCE) -> list[PickRoute]:
    """S-shape route from every starting market plus the reversed routes, Pareto-filtered."""
    routes = []
    for start in range(len(ctx.graph)):
        route = replay_route(ctx, s_shape_sequence(ctx, start), allowed=allowed)
        if route is None:
            continue
        routes.append(route)
        rev = reverse_route(ctx, route, allowed)
        if rev is not None:
            routes.append(rev)
    return pareto_routes(routes)
