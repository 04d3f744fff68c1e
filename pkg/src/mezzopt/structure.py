"""Per-floor structural views (sub-aisles, bays, areas, rack neighbours).

Built once per rack set and shared by every warehouse state that reuses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .warehouse import Warehouse, rack_walk_distance

_CACHE: dict[int, tuple[object, dict]] = {}


@dataclass
class FloorModel:
    floor_id: int
    rack_index: np.ndarray      # global rack positions (warehouse.index order), sorted by rack_id
    rack_ids: np.ndarray
    sa_of: np.ndarray           # local sub-aisle index per rack
    bay_of: np.ndarray          # 0-based bay slot within the sub-aisle
    side_of: np.ndarray         # 0 left, 1 right
    area_of: np.ndarray         # spread area (block) per rack
    n_areas: int
    dist: np.ndarray            # walk distance to closest p/d-point
    grid: np.ndarray            # (S, B, 2) local rack index or -1
    sa_nbays: np.ndarray
    sa_window: np.ndarray       # half-sub-aisle window length, in bays
    win_lo: np.ndarray          # centred half-sub-aisle window per rack [lo, hi)
    win_hi: np.ndarray
    sa_racks: list[np.ndarray]
    shift: dict[str, list[list[int]]]   # direction -> per rack, candidate racks in that direction
    positions: np.ndarray       # (R, 2) rack body coordinates

    @property
    def n_racks(self) -> int:
        return len(self.rack_ids)

    @property
    def n_sub_aisles(self) -> int:
        return len(self.sa_racks)

    def local(self, rack_id: int) -> int:
        return int(self._local[rack_id])

    def __post_init__(self):
        self._local = {int(r): i for i, r in enumerate(self.rack_ids)}


def floor_model(state: Warehouse, floor_id: int) -> FloorModel:
    key = id(state.racks)
    hit = _CACHE.get(key)
    if hit is None or hit[0] is not state.racks:
        hit = (state.racks, {})
        _CACHE[key] = hit
    models = hit[1]
    if floor_id not in models:
        models[floor_id] = _build(state, floor_id)
    return models[floor_id]


def _build(state: Warehouse, floor_id: int) -> FloorModel:
    index = state.index
    glob = [i for i, r in enumerate(index.racks) if r.floor_id == floor_id]
    glob.sort(key=lambda i: index.racks[i].rack_id)
    racks = [index.racks[i] for i in glob]
    R = len(racks)

    sa_keys = sorted({r.sub_aisle_id for r in racks})
    sa_pos = {k: i for i, k in enumerate(sa_keys)}
    sa_of = np.array([sa_pos[r.sub_aisle_id] for r in racks], dtype=np.int64)
    S = len(sa_keys)
    bays_per_sa = [sorted({r.bay_number for r in racks if r.sub_aisle_id == k}) for k in sa_keys]
    bay_slot = [{b: j for j, b in enumerate(bays)} for bays in bays_per_sa]
    bay_of = np.array([bay_slot[sa_pos[r.sub_aisle_id]][r.bay_number] for r in racks], dtype=np.int64)
    side_of = np.array([0 if r.side == "left" else 1 for r in racks], dtype=np.int64)
    B = max((len(b) for b in bays_per_sa), default=0)
    grid = np.full((S, max(B, 1), 2), -1, dtype=np.int64)
    for i in range(R):
        grid[sa_of[i], bay_of[i], side_of[i]] = i
    sa_nbays = np.array([len(b) for b in bays_per_sa], dtype=np.int64)
    sa_window = np.array([max(1, math.ceil(n / 2)) for n in sa_nbays], dtype=np.int64)
    win_lo = np.zeros(R, dtype=np.int64)
    win_hi = np.zeros(R, dtype=np.int64)
    for i in range(R):
        nb, w = int(sa_nbays[sa_of[i]]), int(sa_window[sa_of[i]])
        lo = min(max(0, int(bay_of[i]) - w // 2), nb - w)
        win_lo[i], win_hi[i] = lo, lo + w

    blocks = sorted({r.block_id for r in racks})
    block_pos = {b: i for i, b in enumerate(blocks)}
    area_of = np.array([block_pos[r.block_id] for r in racks], dtype=np.int64)
    dist = np.array([rack_walk_distance(r, state.layout) for r in racks], dtype=float)

    positions = np.array([(r.access_point[0] + (-0.5 if r.side == "left" else 0.5), r.access_point[1])
                          for r in racks], dtype=float).reshape(-1, 2)
    shift: dict[str, list[list[int]]] = {d: [] for d in ("left", "right", "up", "down")}
    for i in range(R):
        x, y = positions[i]
        same_row = np.nonzero(positions[:, 1] == y)[0]
        same_col = np.nonzero(positions[:, 0] == x)[0]
        right = sorted((j for j in same_row if positions[j, 0] > x), key=lambda j: positions[j, 0])
        left = sorted((j for j in same_row if positions[j, 0] < x), key=lambda j: -positions[j, 0])
        up = sorted((j for j in same_col if positions[j, 1] > y), key=lambda j: positions[j, 1])
        down = sorted((j for j in same_col if positions[j, 1] < y), key=lambda j: -positions[j, 1])
        shift["right"].append([int(j) for j in right])
        shift["left"].append([int(j) for j in left])
        shift["up"].append([int(j) for j in up])
        shift["down"].append([int(j) for j in down])

    return FloorModel(
        floor_id=floor_id,
        rack_index=np.array(glob, dtype=np.int64),
        rack_ids=np.array([r.rack_id for r in racks], dtype=np.int64),
        sa_of=sa_of, bay_of=bay_of, side_of=side_of,
        area_of=area_of, n_areas=len(blocks), dist=dist,
        grid=grid, sa_nbays=sa_nbays, sa_window=sa_window,
        win_lo=win_lo, win_hi=win_hi,
        sa_racks=[np.nonzero(sa_of == s)[0] for s in range(S)],
        shift=shift, positions=positions,
    )


def pair_distances(model: FloorModel) -> np.ndarray:
    """Manhattan distances between rack bodies of one floor (cached on the model)."""
    cached = getattr(model, "_pair_dist", None)
    if cached is None:
        pos = model.positions
        cached = np.abs(pos[:, None, :] - pos[None, :, :]).sum(axis=2)
        model._pair_dist = cached
    return cached
