"""Pareto machinery and front quality indicators.

All array-level helpers work on minimization problems. Callers with
maximized objectives pass ``maximize`` flags (or negate columns themselves
with :func:`to_minimization`).
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields
from typing import Any, Sequence

import numpy as np

from . import kernels
from .errors import UsageError

EPS = 1e-9


def to_minimization(points, maximize: Sequence[bool] | None = None) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(points, dtype=float))
    if arr.size == 0:
        return arr.reshape(0, len(maximize) if maximize is not None else 0)
    if maximize is not None:
        sign = np.where(np.asarray(maximize, dtype=bool), -1.0, 1.0)
        arr = arr * sign
    return arr


@dataclass(frozen=True)
class ObjectiveVector:
    values: tuple[float, ...]
    maximize: tuple[bool, ...]

    def __post_init__(self):
        if len(self.values) != len(self.maximize):
            raise UsageError("values and orientation differ in length")
        if not all(math.isfinite(v) for v in self.values):
            raise UsageError("objective values must be finite")

    def minimized(self) -> np.ndarray:
        return to_minimization([self.values], self.maximize)[0]


def dominates(a, b, maximize: Sequence[bool] | None = None) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and strictly better somewhere."""
    if isinstance(a, ObjectiveVector) or isinstance(b, ObjectiveVector):
        if not (isinstance(a, ObjectiveVector) and isinstance(b, ObjectiveVector)):
            raise UsageError("cannot compare ObjectiveVector with a bare sequence")
        if a.maximize != b.maximize:
            raise UsageError("orientation mismatch")
        va, vb = a.minimized(), b.minimized()
    else:
        if len(a) != len(b):
            raise UsageError(f"arity mismatch: {len(a)} vs {len(b)}")
        va, vb = to_minimization([a], maximize)[0], to_minimization([b], maximize)[0]
    if len(va) != len(vb):
        raise UsageError(f"arity mismatch: {len(va)} vs {len(vb)}")
    return bool(np.all(va <= vb) and np.any(va < vb))


def pareto_ranks(points, maximize: Sequence[bool] | None = None) -> np.ndarray:
    """Pareto rank of every point, 1 = non-dominated."""
    F = np.ascontiguousarray(to_minimization(points, maximize))
    if len(F) == 0:
        return np.zeros(0, dtype=np.int64)
    return kernels.nondominated_ranks(F)


def nondominated_sort(points, maximize: Sequence[bool] | None = None) -> list[list[int]]:
    """Indices grouped into fronts, best front first."""
    F = to_minimization(points, maximize)
    if len(F) == 0:
        raise UsageError("population must not be empty")
    ranks = pareto_ranks(F)
    return [list(np.nonzero(ranks == r)[0]) for r in range(1, int(ranks.max()) + 1)]


def crowding_distance(points, maximize: Sequence[bool] | None = None) -> np.ndarray:
    """Crowding distance per point; boundary points get ``inf``."""
    F = to_minimization(points, maximize)
    n = len(F)
    if n == 0:
        raise UsageError("front must not be empty")
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = math.inf
        return dist
    for k in range(F.shape[1]):
        order = np.argsort(F[:, k], kind="stable")
        col = F[order, k]
        dist[order[0]] = dist[order[-1]] = math.inf
        span = col[-1] - col[0]
        if span <= 0:
            continue
        dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def nondominated_indices(points, maximize: Sequence[bool] | None = None) -> np.ndarray:
    F = to_minimization(points, maximize)
    if len(F) == 0:
        return np.zeros(0, dtype=np.int64)
    return np.nonzero(pareto_ranks(F) == 1)[0]


def unique_points(points, eps: float = EPS) -> np.ndarray:
    """Rows of ``points`` with near-duplicates (within ``eps``) collapsed, sorted lexicographically."""
    F = np.atleast_2d(np.asarray(points, dtype=float))
    if F.size == 0:
        return F
    F = F[np.lexsort(F.T[::-1])]
    keep = [0]
    for i in range(1, len(F)):
        if not np.any(np.all(np.abs(F[keep] - F[i]) <= eps, axis=1)):
            keep.append(i)
    return F[keep]


def _nearest_distances(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    diff = src[:, None, :] - dst[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=2)).min(axis=1)


def _front(points, name: str, allow_empty: bool = False) -> np.ndarray:
    F = np.atleast_2d(np.asarray(points, dtype=float))
    if F.size == 0:
        if allow_empty:
            return F.reshape(0, 0)
        raise UsageError(f"{name} must not be empty")
    return unique_points(F)


def coverage(pf_c, pf_ref, eps: float = EPS) -> float:
    """Share of the reference front reproduced exactly by ``pf_c``."""
    ref = _front(pf_ref, "reference front")
    comp = _front(pf_c, "computed front", allow_empty=True)
    if comp.size == 0:
        return 0.0
    hits = sum(bool(np.any(np.all(np.abs(comp - r) <= eps, axis=1))) for r in ref)
    return hits / len(ref)


def generational_distance(pf_c, pf_ref) -> float:
    comp, ref = _front(pf_c, "computed front"), _front(pf_ref, "reference front")
    d = _nearest_distances(comp, ref)
    return float(math.sqrt((d ** 2).sum()) / len(comp))


def inverted_generational_distance(pf_c, pf_ref) -> float:
    comp, ref = _front(pf_c, "computed front"), _front(pf_ref, "reference front")
    d = _nearest_distances(ref, comp)
    return float(math.sqrt((d ** 2).sum()) / len(ref))


def euclidean_distance_indicator(pf_c, s_ref) -> float:
    """Distance from the ideal point ``s_ref`` to its closest member of ``pf_c``."""
    comp = _front(pf_c, "computed front")
    return float(_nearest_distances(np.asarray(s_ref, dtype=float)[None, :], comp)[0])


def ideal_point(points, maximize: Sequence[bool] | None = None) -> np.ndarray:
    """Per-objective best values (in minimization space)."""
    return to_minimization(points, maximize).min(axis=0)


def pareto_front_size(pf_c) -> int:
    F = np.atleast_2d(np.asarray(pf_c, dtype=float))
    if F.size == 0:
        return 0
    return len(unique_points(F))


def generated_spread(pf_c, pf_ref) -> float:
    """Spread of ``pf_c`` relative to the extremes of ``pf_ref``; NaN for fewer than two points."""
    comp, ref = _front(pf_c, "computed front", allow_empty=True), _front(pf_ref, "reference front")
    if len(comp) < 2:
        return math.nan
    m = ref.shape[1]
    extremes = []
    for k in range(m):
        others = [ref[:, j] for j in reversed(range(m)) if j != k]
        order = np.lexsort(others + [ref[:, k]])
        extremes.append(ref[order[0]])
    d_ext = _nearest_distances(np.array(extremes), comp).sum()
    diff = comp[:, None, :] - comp[None, :, :]
    pair = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(pair, np.inf)
    d_nn = pair.min(axis=1)
    d_bar = d_nn.mean()
    denom = d_ext + len(comp) * d_bar
    if denom == 0:
        return 0.0
    return float((d_ext + np.abs(d_nn - d_bar).sum()) / denom)


def hypervolume(pf_c, reference_point) -> float:
    """Volume dominated by ``pf_c`` and bounded by ``reference_point`` (minimization)."""
    ref = np.asarray(reference_point, dtype=float)
    F = np.atleast_2d(np.asarray(pf_c, dtype=float))
    if F.size == 0:
        return 0.0
    if F.shape[1] != len(ref):
        raise UsageError("reference point arity differs from the front")
    if F.shape[1] > 4:
        raise UsageError("hypervolume supports at most four objectives")
    if not np.all(F < ref):
        raise UsageError("reference point must be strictly worse than every front member")
    F = unique_points(F[nondominated_indices(F)])
    return float(_hso(F, ref))


def _hso(F: np.ndarray, ref: np.ndarray) -> float:
    # slice along the last objective, recurse on the remaining ones
    d = F.shape[1]
    if len(F) == 0:
        return 0.0
    if d == 1:
        return float(ref[0] - F[:, 0].min())
    if d == 2:
        pts = F[np.lexsort((F[:, 1], F[:, 0]))]
        vol, best_y = 0.0, ref[1]
        for x, y in pts:
            if y < best_y:
                vol += (ref[0] - x) * (best_y - y)
                best_y = y
        return vol
    order = np.argsort(F[:, -1], kind="stable")
    F = F[order]
    vol = 0.0
    for i in range(len(F)):
        upper = F[i + 1, -1] if i + 1 < len(F) else ref[-1]
        depth = upper - F[i, -1]
        if depth <= 0:
            continue
        proj = F[: i + 1, :-1]
        proj = proj[nondominated_indices(proj)]
        vol += depth * _hso(proj, ref[:-1])
    return vol


@dataclass
class ParetoFront:
    """Mutually non-dominated solutions with their (minimization-space) objectives."""

    objectives: np.ndarray
    payloads: list[Any]

    def __len__(self):
        return len(self.payloads)

    @classmethod
    def from_points(cls, points, payloads: Sequence[Any] | None = None) -> "ParetoFront":
        F = np.atleast_2d(np.asarray(points, dtype=float))
        payloads = list(payloads) if payloads is not None else [None] * len(F)
        if F.size == 0:
            return cls(F.reshape(0, F.shape[1] if F.ndim == 2 else 0), [])
        keep = nondominated_indices(F)
        F, payloads = F[keep], [payloads[i] for i in keep]
        order = np.lexsort(F.T[::-1])
        return cls(F[order], [payloads[i] for i in order])


def reference_front(fronts: Sequence) -> ParetoFront:
    """Non-dominated subset of the union of ``fronts``, sorted lexicographically, duplicates collapsed."""
    if len(fronts) == 0:
        raise UsageError("need at least one front")
    arrays, payloads = [], []
    for fr in fronts:
        if isinstance(fr, ParetoFront):
            if len(fr):
                arrays.append(fr.objectives)
                payloads.extend(fr.payloads)
        else:
            arr = np.atleast_2d(np.asarray(fr, dtype=float))
            if arr.size:
                arrays.append(arr)
                payloads.extend([None] * len(arr))
    if not arrays:
        return ParetoFront(np.zeros((0, 0)), [])
    F = np.vstack(arrays)
    front = ParetoFront.from_points(F, payloads)
    keep, seen = [], []
    for i, row in enumerate(front.objectives):
        if not any(np.all(np.abs(row - s) <= EPS) for s in seen):
            seen.append(row)
            keep.append(i)
    return ParetoFront(front.objectives[keep], [front.payloads[i] for i in keep])


@dataclass(frozen=True)
class IndicatorReport:
    C: float
    GD: float
    ED: float
    PFS: int
    GS: float
    IGD: float
    HV: float = math.nan

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_tuple(self) -> tuple:
        return astuple(self)


def indicator_report(pf_c, pf_ref, s_ref=None, hv_reference=None) -> IndicatorReport:
    """All indicators of ``pf_c`` against ``pf_ref`` (minimization space)."""
    comp = np.atleast_2d(np.asarray(pf_c, dtype=float))
    ref = np.atleast_2d(np.asarray(pf_ref, dtype=float))
    if s_ref is None:
        s_ref = ref.min(axis=0)
    if comp.size == 0:
        return IndicatorReport(0.0, math.nan, math.nan, 0, math.nan, math.nan, 0.0)
    hv = math.nan
    if hv_reference is not None:
        hv = hypervolume(comp, hv_reference)
    return IndicatorReport(
        C=coverage(comp, ref),
        GD=generational_distance(comp, ref),
        ED=euclidean_distance_indicator(comp, s_ref),
        PFS=pareto_front_size(comp),
        GS=generated_spread(comp, ref),
        IGD=inverted_generational_distance(comp, ref),
        HV=hv,
    )
