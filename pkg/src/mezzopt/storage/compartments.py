"""Phase 3: place each rack's items into concrete compartments."""

from __future__ import annotations

from collections import Counter

import numpy as np

from ..warehouse import Placement, Warehouse, movement_class, weight_class, zone_of
from .problem import Chromosome

WEIGHT_PENALTY = {
    ("high", "light"): 0, ("high", "medium"): 2, ("high", "heavy"): 3,
    ("grip", "light"): 1, ("grip", "medium"): 0, ("grip", "heavy"): 0,
    ("low", "light"): 0, ("low", "medium"): 1, ("low", "heavy"): 1,
}
RANK_PENALTY = {
    ("high", "slow"): 0, ("high", "moderate"): 0, ("high", "fast"): 2,
    ("grip", "slow"): 3, ("grip", "moderate"): 1, ("grip", "fast"): 0,
    ("low", "slow"): 0, ("low", "moderate"): 0, ("low", "fast"): 2,
}


def compartment_penalty(zone: str, wclass: str, mclass: str) -> int:
    return WEIGHT_PENALTY[(zone, wclass)] + RANK_PENALTY[(zone, mclass)]


def assign_compartments(state: Warehouse, product_number: int, chromosome: Chromosome) -> list[Placement]:
    """Fill same-product compartments first, then empty ones by lowest penalty."""
    product = state.products[product_number]
    wclass = weight_class(product)
    mclass = movement_class(product, len(state.products))
    idx = state.index
    free = idx.capacity_for(product)
    out = []
    for rack_id, qty in sorted(Counter(chromosome.genes).items()):
        r = idx.rack_pos[(chromosome.floor_id, rack_id)]
        comps = np.nonzero(idx.comp_rack == r)[0]
        held = [k for k in comps if idx.comp_product[k] == product_number and free[k] > 0]
        empty = [k for k in comps if idx.comp_product[k] == -1 and free[k] > 0]
        held.sort(key=lambda k: idx.compartments[k].compartment_id)
        empty.sort(key=lambda k: (compartment_penalty(zone_of(idx.compartments[k]), wclass, mclass),
                                  idx.compartments[k].compartment_id))
        for k in held + empty:
            if qty == 0:
                break
            take = int(min(qty, free[k]))
            out.append(Placement(chromosome.floor_id, rack_id, idx.compartments[k].compartment_id, take))
            qty -= take
        if qty:
            raise RuntimeError(f"rack {rack_id} on floor {chromosome.floor_id} cannot absorb {qty} more items")
    return out
