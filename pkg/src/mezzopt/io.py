"""JSON documents and CSV dumps for warehouses, orders, tasks, allocations and routes.

Every document is a JSON object with ``format`` and ``version`` keys. Floats
are written with ``repr`` precision, so loading a saved warehouse gives back an
equal object. See ``docs/formats.md`` for the field lists.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any

from .errors import ConfigurationError
from .storage.problem import OBJECTIVES as SCORE_COLUMNS
from .warehouse import (AssociationRule, Compartment, FloorLayout, Order, OrderLine, Placement, Product,
                        ProductAssignment, Rack, RackConfiguration, StorageAllocation, Warehouse)

VERSION = 1


def _tuple(x):
    return tuple(_tuple(v) for v in x) if isinstance(x, list) else x


def _header(kind: str) -> dict:
    return {"format": f"mezzopt-{kind}", "version": VERSION}


def _check(doc: dict, kind: str) -> None:
    if not isinstance(doc, dict) or doc.get("format") != f"mezzopt-{kind}":
        raise ConfigurationError(f"not a mezzopt {kind} document")
    if doc.get("version") != VERSION:
        raise ConfigurationError(f"unsupported {kind} document version {doc.get('version')!r}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def write_json(path, doc: dict) -> None:
    Path(path).write_text(dumps(doc))


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as e:
        raise ConfigurationError(f"file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path}: invalid JSON ({e})") from e


# -- warehouse ----------------------------------------------------------------

def warehouse_to_dict(state: Warehouse) -> dict:
    lay = state.layout
    return {
        **_header("warehouse"),
        "layout": {"width": lay.width, "height": lay.height, "pd_points": lay.pd_points,
                   "cross_aisle_rows": lay.cross_aisle_rows, "pick_aisle_columns": lay.pick_aisle_columns},
        "floors": state.floors,
        "configurations": [
            {"configuration_id": c.configuration_id, "shelf_levels": c.shelf_levels,
             "compartments_per_shelf": c.compartments_per_shelf,
             "compartments": [[k.compartment_id, k.dimensions, k.shelf_level, k.shelf_position, k.bottom_height]
                              for k in c.compartments]}
            for c in state.configurations.values()],
        "racks": [[r.rack_id, r.floor_id, r.access_point, r.bay_number, r.block_id, r.sub_aisle_id, r.side,
                   r.configuration_id] for r in state.racks],
        "products": [[p.product_number, p.dimensions, p.weight, p.rank, p.mu, p.sigma]
                     for p in state.products.values()],
        "rules": [[r.lhs, r.rhs, r.confidence] for r in state.rules],
        "assignments": [[a.floor_id, a.rack_id, a.compartment_id, a.product_number, a.quantity]
                        for a in state.assignments],
        "meta": state.meta,
    }


def warehouse_from_dict(doc: dict) -> Warehouse:
    _check(doc, "warehouse")
    try:
        lay = doc["layout"]
        layout = FloorLayout(lay["width"], lay["height"], _tuple(lay["pd_points"]), _tuple(lay["cross_aisle_rows"]),
                             _tuple(lay["pick_aisle_columns"]))
        configs = {}
        for c in doc["configurations"]:
            comps = tuple(Compartment(k[0], _tuple(k[1]), k[2], k[3], k[4]) for k in c["compartments"])
            configs[c["configuration_id"]] = RackConfiguration(c["configuration_id"], c["shelf_levels"],
                                                               c["compartments_per_shelf"], comps)
        racks = tuple(Rack(r[0], r[1], _tuple(r[2]), r[3], r[4], r[5], r[6], r[7]) for r in doc["racks"])
        products = {p[0]: Product(p[0], _tuple(p[1]), p[2], p[3], p[4], p[5]) for p in doc["products"]}
        rules = tuple(AssociationRule(*r) for r in doc.get("rules", []))
        assignments = tuple(ProductAssignment(*a) for a in doc.get("assignments", []))
        state = Warehouse(layout, _tuple(doc["floors"]), racks, configs, products, rules, assignments,
                          dict(doc.get("meta", {})))
    except (KeyError, TypeError, IndexError) as e:
        raise ConfigurationError(f"malformed warehouse document: {e!r}") from e
    problems = state.check()
    if problems:
        raise ConfigurationError("; ".join(problems[:5]))
    return state


def save_warehouse(state: Warehouse, path) -> None:
    write_json(path, warehouse_to_dict(state))


def load_warehouse(path) -> Warehouse:
    return warehouse_from_dict(read_json(path))


# -- orders, rules, tasks -----------------------------------------------------

def order_to_dict(order: Order) -> dict:
    return {"order_number": order.order_number, "lines": [[ln.product_number, ln.quantity] for ln in order.lines]}


def order_from_dict(d: dict) -> Order:
    try:
        return Order(int(d["order_number"]), tuple(OrderLine(int(p), int(q)) for p, q in d["lines"]))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigurationError(f"malformed order: {e!r}") from e


def orders_to_dict(orders) -> dict:
    return {**_header("orders"), "orders": [order_to_dict(o) for o in orders]}


def load_orders(path) -> tuple[Order, ...]:
    """An orders file, or a single order document (with or without the header)."""
    doc = read_json(path)
    if isinstance(doc, dict) and doc.get("format") == "mezzopt-order":
        _check(doc, "order")
        return (order_from_dict(doc),)
    if isinstance(doc, dict) and "order_number" in doc:
        return (order_from_dict(doc),)
    _check(doc, "orders")
    return tuple(order_from_dict(o) for o in doc["orders"])


def rules_to_dict(rules) -> dict:
    return {**_header("rules"), "rules": [[r.lhs, r.rhs, r.confidence] for r in rules]}


def load_rules(path) -> tuple[AssociationRule, ...]:
    doc = read_json(path)
    _check(doc, "rules")
    return tuple(AssociationRule(*r) for r in doc["rules"])


def load_task(path):
    """Task file: ``{"product_number": P, "quantity": Q}`` (header optional)."""
    from .storage import AssignmentTask
    doc = read_json(path)
    if isinstance(doc, dict) and "format" in doc:
        _check(doc, "task")
    try:
        return AssignmentTask(int(doc["product_number"]), int(doc["quantity"]))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigurationError(f"malformed task document: {e!r}") from e


def task_to_dict(task) -> dict:
    return {**_header("task"), "product_number": task.product_number, "quantity": task.quantity}


# -- results ------------------------------------------------------------------

def allocation_to_dict(alloc: StorageAllocation) -> dict:
    return {"product_number": alloc.product_number, "quantity": alloc.quantity,
            "scores": dict(zip(SCORE_COLUMNS, alloc.scores)),
            "placements": [[p.floor_id, p.rack_id, p.compartment_id, p.quantity] for p in alloc.placements]}


def allocation_from_dict(d: dict) -> StorageAllocation:
    return StorageAllocation(d["product_number"], d["quantity"], tuple(Placement(*p) for p in d["placements"]),
                             tuple(d["scores"][c] for c in SCORE_COLUMNS if c in d["scores"]))


def storage_result_to_dict(result) -> dict:
    return {**_header("allocation"), "algorithm": result.algorithm,
            "task": {"product_number": result.task.product_number, "quantity": result.task.quantity},
            "floor_quantities": {str(f): q for f, q in result.floor_quantities.items()},
            "allocation": allocation_to_dict(result.allocation)}


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def storage_front_csv(result) -> str:
    """One row per front member and floor: four objectives and the items per rack id (rack:count)."""
    rows = []
    for f, front in sorted(result.fronts.items()):
        for i, (chrom, scores) in enumerate(zip(front.chromosomes, front.scores)):
            counts: dict[int, int] = {}
            for g in chrom.genes:
                counts[int(g)] = counts.get(int(g), 0) + 1
            summary = " ".join(f"{r}:{n}" for r, n in sorted(counts.items()))
            rows.append([f, i, *(_num(float(s)) for s in scores), summary])
    return _csv(rows, ["floor", "solution", *SCORE_COLUMNS, "racks"])


def route_to_dict(route) -> dict:
    return {"order_number": route.order_number, "distance": route.distance, "violations": route.violations,
            "start_pd": route.start_pd, "end_pd": route.end_pd,
            "markets": [{"market": m, "entry": s[0], "exit": s[1]} for m, s in zip(route.markets, route.sides)],
            "racks": [{"visit": rv.visit, "floor": rv.floor_id, "rack": rv.rack_id, "depth": rv.depth,
                       "picks": [list(p) for p in rv.picks]} for rv in route.racks]}


def picking_result_to_dict(result) -> dict:
    return {**_header("routes"), "algorithm": result.algorithm, "order": order_to_dict(result.order),
            "routes": [route_to_dict(r) for r in result.front]}


def route_front_csv(routes) -> str:
    return _csv([[i, _num(float(r.distance)), r.violations] for i, r in enumerate(routes)],
                ["route", "distance", "violations"])


def read_front_csv(path) -> tuple[list[str], list[list[float]]]:
    """Objective columns of a storage or route front CSV."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigurationError(f"{path}: empty front file")
    header = rows[0]
    if header[:3] == ["route", "distance", "violations"]:
        cols = [1, 2]
    elif header[2:6] == list(SCORE_COLUMNS):
        cols = [2, 3, 4, 5]
    else:
        raise ConfigurationError(f"{path}: unknown front CSV header")
    return [header[c] for c in cols], [[float(r[c]) for c in cols] for r in rows[1:]]
