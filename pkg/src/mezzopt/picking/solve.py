"""One entry point for all picking algorithms."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

from ..errors import UsageError
from ..warehouse import Order
from .aco import AcoParams, aco_optimize
from .graph import MarketGraph
from .routes import PickRoute
from .sshape import s_shape_routes

PICKING_ALGORITHMS = ("aco3", "aco4", "sshape")


@dataclass
class PickingResult:
    order: Order
    algorithm: str
    front: list[PickRoute]
    seconds: float
    iterations: int = 0
    cataclysms: int = 0


def solve_picking(graph: MarketGraph, order: Order, algorithm: str = "aco3",
                  params: AcoParams | None = None, seed: int = 0) -> PickingResult:
    if algorithm not in PICKING_ALGORITHMS:
        raise UsageError(f"unknown picking algorithm {algorithm!r}")
    t0 = time.perf_counter()
    ctx = graph.context(order)
    if algorithm == "sshape":
        front = s_shape_routes(ctx, (params or AcoParams()).allowed_weight_difference)
        return PickingResult(order, algorithm, front, time.perf_counter() - t0)
    params = replace(params or AcoParams(), variant=algorithm, seed=seed)
    res = aco_optimize(graph, ctx, params)
    return PickingResult(order, algorithm, res.front, time.perf_counter() - t0, res.iterations, res.cataclysms)
