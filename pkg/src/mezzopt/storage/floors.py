"""Phase 1: share the incoming quantity out over the floors."""

from __future__ import annotations

import numpy as np

from ..errors import InfeasibleTaskError, UsageError
from ..warehouse import Warehouse
from .problem import AssignmentTask


def floor_capacities(state: Warehouse, product_number: int) -> dict[int, int]:
    idx = state.index
    per_rack = idx.rack_capacity_for(state.products[product_number])
    return {f: int(per_rack[idx.floor_racks[f]].sum()) for f in state.floors}


def split_across_floors(state: Warehouse, task: AssignmentTask, rng: np.random.Generator) -> dict[int, int]:
    """Per-floor incoming quantities that level out the product's stock across floors.

    Floors are raised to a common integer level (bounded by their free
    capacity); items left over by the rounding go to distinct random floors.
    """
    if not state.floors:
        raise UsageError("warehouse has no floors")
    if task.product_number not in state.products:
        raise UsageError(f"unknown product {task.product_number}")
    floors = list(state.floors)
    held = state.quantity_on_floor(task.product_number)
    ex = np.array([held[f] for f in floors], dtype=np.int64)
    caps = floor_capacities(state, task.product_number)
    cap = np.array([caps[f] for f in floors], dtype=np.int64)
    n = task.quantity
    if n > cap.sum():
        raise InfeasibleTaskError(f"{n} items of product {task.product_number} exceed free capacity {int(cap.sum())}")

    def filled(level: int) -> np.ndarray:
        return np.clip(level - ex, 0, cap)

    lo, hi = 0, int((ex + cap).max())
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if filled(mid).sum() <= n:
            lo = mid
        else:
            hi = mid - 1
    base = filled(lo)
    left = n - int(base.sum())
    if left:
        growing = np.nonzero(filled(lo + 1) > base)[0]
        chosen = rng.choice(growing, size=left, replace=False)
        base[chosen] += 1
    return {f: int(q) for f, q in zip(floors, base)}
