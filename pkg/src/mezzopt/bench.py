"""Experiment harness: storage, picking and interaction settings with indicator tables.

A plan names a setting, the warehouse recipe, the algorithm roster and the
repetitions. Every (policy, task, repetition) cell gets its own seed derived
from the plan seed, so results do not depend on the order in which a work pool
finishes the cells.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
import pickle
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, MezzoptError
from .generator import GenSpec, Instance, generate_instance, generate_orders, stock_levels
from .moo import indicator_report, reference_front
from .picking import AcoParams, build_market_graph, solve_picking
from .picking.solve import PICKING_ALGORITHMS
from .storage import AssignmentTask, NsgaParams, solve_storage
from .storage.solve import STORAGE_ALGORITHMS

log = logging.getLogger(__name__)

KINDS = ("storage", "picking")
DETERMINISTIC = {"closest", "rank", "sshape"}
INDICATORS = ("C", "GD", "ED", "PFS", "GS", "IGD")
RAW_HEADER = ["setting", "policy", "task", "unit", "repetition", *INDICATORS, "HV"]
SUMMARY_HEADER = ["setting", "policy", "n"] + [f"{k}_{s}" for k in INDICATORS for s in ("mean", "std")]
TIMING_HEADER = ["setting", "policy", "task", "repetition", "seconds"]


@dataclass
class ExperimentPlan:
    setting: str
    kind: str = "storage"
    size: str = "small"
    spec: dict = field(default_factory=dict)         # GenSpec overrides
    algorithms: tuple[str, ...] = ("nsga2", "random", "closest", "rank")
    warehouses: tuple[str, ...] = ("random",)         # fill policies (picking only)
    n_tasks: int = 5
    repetitions: int = 10
    seed: int = 0
    instance_seed: int = 1
    nsga: dict = field(default_factory=dict)         # NsgaParams overrides
    aco: dict = field(default_factory=dict)          # AcoParams overrides
    cache_dir: str | None = None

    def __post_init__(self):
        self.algorithms = tuple(self.algorithms)
        self.warehouses = tuple(self.warehouses)
        if self.kind not in KINDS:
            raise ConfigurationError(f"plan kind must be one of {KINDS}")
        if not self.algorithms:
            raise ConfigurationError("empty algorithm roster")
        allowed = STORAGE_ALGORITHMS if self.kind == "storage" else PICKING_ALGORITHMS
        bad = [a for a in self.algorithms if a not in allowed]
        if bad:
            raise ConfigurationError(f"unknown {self.kind} algorithms {bad}")
        if self.kind == "picking" and (not self.warehouses or
                                       any(w not in ("random", "nsga2") for w in self.warehouses)):
            raise ConfigurationError("warehouses must be fill policies 'random' or 'nsga2'")
        if self.n_tasks < 1 or self.repetitions < 1:
            raise ConfigurationError("n_tasks and repetitions must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentPlan":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ConfigurationError(f"unknown plan keys {sorted(extra)}")
        try:
            return cls(**d)
        except TypeError as e:
            raise ConfigurationError(str(e)) from e

    @classmethod
    def load(cls, path) -> "ExperimentPlan":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except FileNotFoundError as e:
            raise ConfigurationError(f"plan not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"{path}: invalid JSON ({e})") from e

    def to_dict(self) -> dict:
        d = asdict(self)
        d["algorithms"], d["warehouses"] = list(self.algorithms), list(self.warehouses)
        return d

    def gen_spec(self) -> GenSpec:
        return GenSpec.from_dict({"size": self.size, **self.spec})

    def policy_names(self) -> list[tuple[str, str, str]]:
        """(label, fill policy, algorithm) per roster entry."""
        if self.kind == "storage":
            return [(a, "", a) for a in self.algorithms]
        multi = len(self.warehouses) > 1
        return [(f"{w}+{a}" if multi else a, w, a) for w in self.warehouses for a in self.algorithms]


@dataclass
class ResultTable:
    setting: str
    rows: list[dict]       # one per (policy, task, unit, repetition)
    timings: list[dict]    # one per (policy, task, repetition)
    failures: list[str] = field(default_factory=list)

    def policies(self) -> list[str]:
        return list(dict.fromkeys(r["policy"] for r in self.rows))

    def values(self, policy: str, indicator: str) -> np.ndarray:
        return np.array([r[indicator] for r in self.rows if r["policy"] == policy], dtype=float)

    def mean(self, policy: str, indicator: str) -> float:
        v = self.values(policy, indicator)
        v = v[~np.isnan(v)]
        return float(v.mean()) if len(v) else math.nan

    def std(self, policy: str, indicator: str) -> float:
        v = self.values(policy, indicator)
        v = v[~np.isnan(v)]
        return float(v.std()) if len(v) else math.nan


# -- instances ----------------------------------------------------------------

def _cached_instance(spec: GenSpec, seed: int, policy: str, cache_dir) -> Instance:
    if not cache_dir:
        return generate_instance(spec, seed, policy)
    key = hashlib.sha256(json.dumps([spec.to_dict(), seed, policy], sort_keys=True).encode()).hexdigest()[:16]
    path = Path(cache_dir) / f"instance-{key}.pkl"
    if path.exists():
        with open(path, "rb") as fh:
            return pickle.load(fh)
    inst = generate_instance(spec, seed, policy)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        pickle.dump(inst, fh)
    tmp.replace(path)
    return inst


def prepare_instances(plan: ExperimentPlan) -> dict[str, Instance]:
    spec = plan.gen_spec()
    fills = plan.warehouses if plan.kind == "picking" else (spec.fill_policy,)
    return {w: _cached_instance(spec, plan.instance_seed, w, plan.cache_dir) for w in fills}


def storage_tasks(instance: Instance, n: int, seed: int) -> list[AssignmentTask]:
    """Random stocked products; each asks for as many items as are already stored."""
    stock = stock_levels(instance.warehouse)
    stocked = sorted(p for p, q in stock.items() if q > 0)
    if len(stocked) < n:
        raise ConfigurationError(f"only {len(stocked)} stocked products for {n} tasks")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(stocked, size=n, replace=False)
    return [AssignmentTask(int(p), stock[int(p)]) for p in chosen]


def picking_orders(instances: dict[str, Instance], n: int, seed: int):
    """Orders servable from every listed warehouse (same generator as the instance orders)."""
    first = next(iter(instances.values()))
    spec = first.spec
    stock = stock_levels(*(i.warehouse for i in instances.values()))
    return list(generate_orders(first.warehouse.products, np.random.default_rng(seed), n, spec.order_lines,
                                spec.quartile_probs, stock))


def cell_seed(plan_seed: int, task: int, rep: int) -> int:
    ss = np.random.SeedSequence(plan_seed, spawn_key=(task, rep))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


# -- cells ----------------------------------------------------------------------

_CTX: dict = {}


def _init_worker(ctx):
    _CTX.clear()
    _CTX.update(ctx)


def _run_cell(cell):
    """Returns (cell, {unit: objective matrix (minimization)}, seconds) or (cell, error, None)."""
    label, fill, algo, task_i, rep, seed = cell
    plan: ExperimentPlan = _CTX["plan"]
    try:
        if plan.kind == "storage":
            state = _CTX["instances"][next(iter(_CTX["instances"]))].warehouse
            size_params = NsgaParams.for_size(plan.size, seed=seed)
            params = NsgaParams(**{**asdict(size_params), **plan.nsga, "seed": seed})
            res = solve_storage(state, _CTX["tasks"][task_i], algo, params, seed=seed)
            fronts = {f"floor{f}": -np.asarray(fr.scores, dtype=float) for f, fr in sorted(res.fronts.items())}
            return cell, fronts, res.seconds
        graph = _CTX["graphs"][fill]
        params = AcoParams(**{**plan.aco, "seed": seed}) if algo == "sshape" else \
            AcoParams(**{**plan.aco, "variant": algo, "seed": seed})
        res = solve_picking(graph, _CTX["orders"][task_i], algo, params, seed)
        return cell, {"route": np.array([r.objectives for r in res.front], dtype=float).reshape(-1, 2)}, res.seconds
    except MezzoptError as e:
        return cell, f"{type(e).__name__}: {e}", None


def pool_size(n_cells: int) -> int:
    env = os.environ.get("MEZZOPT_THREADS")
    try:
        cap = int(env) if env else (os.cpu_count() or 1)
    except ValueError as e:
        raise ConfigurationError(f"MEZZOPT_THREADS must be an integer, got {env!r}") from e
    return max(1, min(cap, n_cells))


def _cells(plan: ExperimentPlan) -> list[tuple]:
    out = []
    for label, fill, algo in plan.policy_names():
        reps = 1 if algo in DETERMINISTIC else plan.repetitions
        for t in range(plan.n_tasks):
            for rep in range(reps):
                out.append((label, fill, algo, t, rep, cell_seed(plan.seed, t, rep)))
    return out


def _execute(cells, ctx) -> list:
    workers = pool_size(len(cells))
    if workers == 1:
        _init_worker(ctx)
        return [_run_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(ctx,)) as ex:
        return list(ex.map(_run_cell, cells))


def run_setting(plan: ExperimentPlan, instances: dict[str, Instance] | None = None) -> ResultTable:
    """Run the roster on every task and repetition, then score against per-task reference fronts."""
    instances = instances or prepare_instances(plan)
    ctx: dict = {"plan": plan, "instances": instances}
    if plan.kind == "storage":
        ctx["tasks"] = storage_tasks(next(iter(instances.values())), plan.n_tasks, plan.seed)
    else:
        ctx["orders"] = picking_orders(instances, plan.n_tasks, plan.seed)
        ctx["graphs"] = {w: build_market_graph(i.warehouse, AcoParams(**plan.aco).floor_penalty)
                         for w, i in instances.items()}
    results = sorted(_execute(_cells(plan), ctx), key=lambda r: r[0])
    return score_results(plan, results)


def run_interaction(plan: ExperimentPlan, instances: dict[str, Instance] | None = None) -> ResultTable:
    """Same orders on several filled warehouses; one joint reference front per order."""
    if plan.kind != "picking" or len(plan.warehouses) < 2:
        raise ConfigurationError("an interaction plan needs kind 'picking' and two warehouses")
    return run_setting(plan, instances)


def score_results(plan: ExperimentPlan, results) -> ResultTable:
    fronts: dict[tuple, dict] = {}
    timings, failures = [], []
    order = {lab: i for i, (lab, _, _) in enumerate(plan.policy_names())}
    for (label, fill, algo, t, rep, seed), out, secs in results:
        if isinstance(out, str):
            failures.append(f"{label} task {t} rep {rep}: {out}")
            log.warning("cell failed: %s", failures[-1])
            continue
        timings.append({"setting": plan.setting, "policy": label, "task": t, "repetition": rep, "seconds": secs})
        for unit, F in out.items():
            fronts.setdefault((t, unit), {})[(label, rep)] = F
    rows = []
    for (t, unit), per in sorted(fronts.items()):
        nonempty = [F for F in per.values() if len(F)]
        if not nonempty:
            continue
        ref = reference_front(nonempty).objectives
        allF = np.vstack(nonempty)
        worst, span = allF.max(axis=0), allF.max(axis=0) - allF.min(axis=0)
        hv_ref = worst + 0.1 * np.maximum(np.maximum(span, np.abs(worst)), 1.0)
        reports = {k: indicator_report(F, ref, hv_reference=hv_ref) for k, F in per.items()}
        for label, _, algo in plan.policy_names():
            reps = range(plan.repetitions)
            for rep in reps:
                # deterministic policies ran once; their front stands for every repetition
                key = (label, 0 if algo in DETERMINISTIC else rep)
                if key not in reports:
                    continue
                rows.append({"setting": plan.setting, "policy": label, "task": t, "unit": unit,
                             "repetition": rep, **asdict(reports[key])})
    rows.sort(key=lambda r: (order[r["policy"]], r["task"], r["unit"], r["repetition"]))
    timings.sort(key=lambda r: (order[r["policy"]], r["task"], r["repetition"]))
    return ResultTable(plan.setting, rows, timings, failures)


# -- output -------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return "" if math.isnan(x) else repr(round(float(x), 10))
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r[h]) for h in header])


def summary_rows(table: ResultTable) -> list[dict]:
    out = []
    for p in table.policies():
        row = {"setting": table.setting, "policy": p, "n": int(sum(r["policy"] == p for r in table.rows))}
        for k in INDICATORS:
            row[f"{k}_mean"], row[f"{k}_std"] = table.mean(p, k), table.std(p, k)
        out.append(row)
    return out


def summarize(tables, out_dir) -> dict[str, Path]:
    """Write summary (mean/std), raw per-repetition and timing CSVs; returns their paths."""
    tables = [tables] if isinstance(tables, ResultTable) else list(tables)
    if not tables:
        raise ConfigurationError("nothing to summarize")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"summary": out / "summary.csv", "raw": out / "raw.csv", "timing": out / "timing.csv"}
    _write_csv(paths["summary"], SUMMARY_HEADER, [r for t in tables for r in summary_rows(t)])
    _write_csv(paths["raw"], RAW_HEADER, [r for t in tables for r in t.rows])
    _write_csv(paths["timing"], TIMING_HEADER, [r for t in tables for r in t.timings])
    fails = [f for t in tables for f in t.failures]
    if fails:
        paths["failures"] = out / "failures.txt"
        paths["failures"].write_text("\n".join(fails) + "\n")
    return paths

