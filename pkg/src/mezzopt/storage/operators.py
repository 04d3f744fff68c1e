"""Selection, crossover, the eight mutators and the capacity repair.

Operators work on local gene arrays (see :mod:`.problem`) and return new
arrays; inputs are never modified.
"""

from __future__ import annotations

import numpy as np

from ..errors import InfeasibleTaskError
from ..structure import pair_distances
from .problem import FloorProblem

SHIFT_DIRECTIONS = ("left", "right", "up", "down")


def tournament_select(ranks, crowding, rng: np.random.Generator) -> int:
    """Index of the winner of a binary tournament (rank, then crowding, then coin)."""
    n = len(ranks)
    a, b = int(rng.integers(n)), int(rng.integers(n))
    if ranks[a] != ranks[b]:
        return a if ranks[a] < ranks[b] else b
    if crowding[a] != crowding[b]:
        return a if crowding[a] > crowding[b] else b
    return a if rng.random() < 0.5 else b


def single_point_crossover(a, b, rng: np.random.Generator):
    a, b = np.asarray(a), np.asarray(b)
    if len(a) < 2:
        return a.copy(), b.copy()
    cut = int(rng.integers(1, len(a)))
    return (np.concatenate([a[:cut], b[cut:]]),
            np.concatenate([b[:cut], a[cut:]]))


def repair(problem: FloorProblem, genes, rng: np.random.Generator) -> np.ndarray:
    """Move items off over-full racks to the nearest racks with spare capacity."""
    genes = np.array(genes, dtype=np.int64)
    cap = problem.capacity
    if len(genes) > int(cap.sum()):
        raise InfeasibleTaskError(f"{len(genes)} items exceed floor capacity {int(cap.sum())}")
    counts = problem.counts(genes)
    over = np.nonzero(counts > cap)[0]
    if len(over) == 0:
        return genes
    spare = cap - counts
    dist = pair_distances(problem.model)
    for r in over:
        excess = int(counts[r] - cap[r])
        slots = np.nonzero(genes == r)[0][-excess:]
        for pos in slots:
            open_ = np.nonzero(spare > 0)[0]
            d = dist[r, open_]
            nearest = open_[d == d.min()]
            dest = int(nearest[rng.integers(len(nearest))]) if len(nearest) > 1 else int(nearest[0])
            genes[pos] = dest
            spare[dest] -= 1
    return genes


def random_genes(problem: FloorProblem, rng: np.random.Generator) -> np.ndarray:
    genes = rng.choice(problem.fitting, size=problem.quantity)
    return repair(problem, genes, rng)


# -- mutators ---------------------------------------------------------------

def fill_rack(problem, genes, rng):
    """Pull same-sub-aisle items into one rack until it is full."""
    fm = problem.model
    counts = problem.counts(genes)
    spare = problem.capacity - counts
    sa_items = np.bincount(fm.sa_of[genes], minlength=fm.n_sub_aisles)
    cand = [r for r in problem.fitting if spare[r] > 0 and sa_items[fm.sa_of[r]] > counts[r]]
    if not cand:
        return genes
    r = cand[rng.integers(len(cand))]
    movable = np.nonzero((fm.sa_of[genes] == fm.sa_of[r]) & (genes != r))[0]
    take = rng.permutation(movable)[: int(spare[r])]
    out = genes.copy()
    out[take] = r
    return out


def move_rack(problem, genes, rng):
    """Move every item of one rack to another fitting rack of the same sub-aisle."""
    fm = problem.model
    used = np.unique(genes)
    r = int(used[rng.integers(len(used))])
    others = [x for x in problem.fitting if fm.sa_of[x] == fm.sa_of[r] and x != r]
    if not others:
        return genes
    dest = others[rng.integers(len(others))]
    out = genes.copy()
    out[genes == r] = dest
    return out


def _fitting_in(problem, s):
    racks = problem.model.sa_racks[s]
    return racks[problem.capacity[racks] > 0]


def fill_sub_aisle(problem, genes, rng):
    """Bring items from other sub-aisles until one sub-aisle holds the target quantity."""
    fm = problem.model
    sas = [s for s in range(fm.n_sub_aisles) if len(_fitting_in(problem, s))]
    if not sas:
        return genes
    s = sas[rng.integers(len(sas))]
    racks = _fitting_in(problem, s)
    counts = problem.counts(genes)
    held = int(problem.existing[fm.sa_racks[s]].sum() + counts[fm.sa_racks[s]].sum())
    need = problem.tq - held
    spare = problem.capacity - counts
    outside = rng.permutation(np.nonzero(fm.sa_of[genes] != s)[0])
    out = genes.copy()
    for pos in outside[: max(need, 0)]:
        open_ = racks[spare[racks] > 0]
        if len(open_) == 0:
            break
        dest = open_[rng.integers(len(open_))]
        out[pos] = dest
        spare[dest] -= 1
    return out


def clear_sub_aisle(problem, genes, rng):
    """Move all items of one sub-aisle into another sub-aisle."""
    fm = problem.model
    used = np.unique(fm.sa_of[genes])
    s = int(used[rng.integers(len(used))])
    targets = [t for t in range(fm.n_sub_aisles) if t != s and len(_fitting_in(problem, t))]
    if not targets:
        return genes
    t = targets[rng.integers(len(targets))]
    racks = _fitting_in(problem, t)
    spare = problem.capacity - problem.counts(genes)
    out = genes.copy()
    for pos in np.nonzero(fm.sa_of[genes] == s)[0]:
        open_ = racks[spare[racks] > 0]
        pool = open_ if len(open_) else racks
        dest = pool[rng.integers(len(pool))]
        out[pos] = dest
        spare[dest] -= 1
    return out


def redistribute_exceeding(problem, genes, rng):
    """Hand items above the target quantity to racks that lack only a few."""
    counts = problem.counts(genes)
    total = problem.existing + counts
    tq = problem.tq
    donors = [r for r in np.nonzero((total > tq) & (counts > 0))[0]]
    spare = problem.capacity - counts
    receivers = [r for r in problem.fitting if 0 < total[r] < tq and spare[r] > 0]
    if not donors or not receivers:
        return genes
    receivers.sort(key=lambda r: (tq - total[r], r))
    out = genes.copy()
    pool = []
    for r in donors:
        excess = int(min(counts[r], total[r] - tq))
        pool.extend(np.nonzero(genes == r)[0][-excess:].tolist())
    pool = list(rng.permutation(pool))
    for r in receivers:
        room = int(min(tq - total[r], spare[r]))
        while room > 0 and pool:
            out[pool.pop()] = r
            room -= 1
        if not pool:
            break
    return out


def shift_racks(problem, genes, rng):
    """Shift every used rack one step in a random direction (nearest fitting rack that way)."""
    fm = problem.model
    direction = SHIFT_DIRECTIONS[rng.integers(4)]
    cands = fm.shift[direction]
    cap = problem.capacity
    target = {}
    for r in np.unique(genes):
        dest = next((c for c in cands[r] if cap[c] > 0), int(r))
        target[int(r)] = dest
    return np.array([target[int(g)] for g in genes], dtype=np.int64)


def _sa_destination(problem, s_from, r, s_to, rng):
    fm = problem.model
    b, side = fm.bay_of[r], fm.side_of[r]
    if b < fm.grid.shape[1]:
        d = fm.grid[s_to, b, side]
        if d >= 0 and problem.capacity[d] > 0:
            return int(d)
    pool = _fitting_in(problem, s_to)
    return int(pool[rng.integers(len(pool))])


def swap_sub_aisles(problem, genes, rng):
    """Pair sub-aisles at random and exchange their items, slot by slot."""
    fm = problem.model
    sas = [s for s in range(fm.n_sub_aisles) if len(_fitting_in(problem, s))]
    if len(sas) < 2:
        return genes
    order = rng.permutation(sas)
    out = genes.copy()
    sa_of_gene = fm.sa_of[genes]
    for i in range(0, len(order) - 1, 2):
        s, t = int(order[i]), int(order[i + 1])
        if rng.random() >= 0.5:
            continue
        for pos in np.nonzero(sa_of_gene == s)[0]:
            out[pos] = _sa_destination(problem, s, genes[pos], t, rng)
        for pos in np.nonzero(sa_of_gene == t)[0]:
            out[pos] = _sa_destination(problem, t, genes[pos], s, rng)
    return out


def swap_racks(problem, genes, rng):
    """Pair fitting racks at random and exchange their items."""
    racks = problem.fitting
    if len(racks) < 2:
        return genes
    order = rng.permutation(racks)
    mapping = {}
    for i in range(0, len(order) - 1, 2):
        if rng.random() < 0.5:
            a, b = int(order[i]), int(order[i + 1])
            mapping[a], mapping[b] = b, a
    return np.array([mapping.get(int(g), int(g)) for g in genes], dtype=np.int64)


MUTATORS = {
    "FillRack": fill_rack,
    "MoveRack": move_rack,
    "FillSubAisle": fill_sub_aisle,
    "ClearSubAisle": clear_sub_aisle,
    "RedistributeExceedingQuantities": redistribute_exceeding,
    "ShiftRacks": shift_racks,
    "SwapSubAisles": swap_sub_aisles,
    "SwapRacks": swap_racks,
}
_MUTATOR_LIST = tuple(MUTATORS.values())


def mutate(problem: FloorProblem, genes, rng: np.random.Generator, probability: float) -> np.ndarray:
    """With ``probability``, apply one uniformly chosen mutator and repair the result."""
    genes = np.asarray(genes, dtype=np.int64)
    if len(genes) == 0 or rng.random() >= probability:
        return genes
    op = _MUTATOR_LIST[rng.integers(len(_MUTATOR_LIST))]
    return repair(problem, op(problem, genes, rng), rng)
