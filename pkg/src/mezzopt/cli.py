"""Command-line entry point: ``mezzopt {generate,assign,pick,indicators,experiment}``.

Exit codes: 0 success, 2 infeasible input, 3 configuration or usage error.
"""

from __future__ import annotations

import argparse
import csv
import glob
import io as _io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .bench import _fmt
from .errors import ConfigurationError, InfeasibleError, MezzoptError, UsageError

EXIT_OK, EXIT_INFEASIBLE, EXIT_CONFIG = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    from .generator import GenSpec, generate_instance
    spec = GenSpec.load(args.spec)
    inst = generate_instance(spec, args.seed, args.policy)
    out = _out_dir(args.out)
    io.save_warehouse(inst.warehouse, out / "warehouse.json")
    io.write_json(out / "orders.json", io.orders_to_dict(inst.orders))
    io.write_json(out / "rules.json", io.rules_to_dict(inst.warehouse.rules))
    print(f"wrote {out / 'warehouse.json'}, {out / 'orders.json'}, {out / 'rules.json'}")
    return EXIT_OK


def _nsga_params(args):
    from .storage import NsgaParams
    base = NsgaParams.for_size(args.size, seed=args.seed)
    if args.params:
        over = io.read_json(args.params)
        try:
            base = NsgaParams(**{**base.__dict__, **over, "seed": args.seed})
        except TypeError as e:
            raise ConfigurationError(f"bad NSGA-II parameters: {e}") from e
    return base


def cmd_assign(args) -> int:
    from .storage import solve_storage
    from .warehouse import apply_allocation
    state = io.load_warehouse(args.warehouse)
    task = io.load_task(args.task)
    res = solve_storage(state, task, args.algo, _nsga_params(args), seed=args.seed)
    out = _out_dir(args.out)
    io.write_json(out / "allocation.json", io.storage_result_to_dict(res))
    (out / "front.csv").write_text(io.storage_front_csv(res))
    if args.save_warehouse:
        io.save_warehouse(apply_allocation(state, res.allocation), args.save_warehouse)
    scores = ", ".join(f"{k}={v:.4g}" for k, v in zip(io.SCORE_COLUMNS, res.allocation.scores))
    print(f"{args.algo}: stored {task.quantity} x product {task.product_number} ({scores})")
    return EXIT_OK


def cmd_pick(args) -> int:
    from .picking import AcoParams, build_market_graph, solve_picking
    state = io.load_warehouse(args.warehouse)
    orders = io.load_orders(args.order)
    if args.order_number is not None:
        orders = [o for o in orders if o.order_number == args.order_number]
        if not orders:
            raise ConfigurationError(f"order {args.order_number} not in {args.order}")
    order = orders[0]
    over = io.read_json(args.params) if args.params else {}
    try:
        params = AcoParams(**{**over, "variant": args.algo if args.algo != "sshape" else "aco3",
                              "seed": args.seed})
    except TypeError as e:
        raise ConfigurationError(f"bad ACO parameters: {e}") from e
    graph = build_market_graph(state, params.floor_penalty)
    res = solve_picking(graph, order, args.algo, params, args.seed)
    out = _out_dir(args.out)
    io.write_json(out / "routes.json", io.picking_result_to_dict(res))
    (out / "route_front.csv").write_text(io.route_front_csv(res.front))
    best = min(r.distance for r in res.front) if res.front else float("nan")
    print(f"{args.algo}: order {order.order_number}, {len(res.front)} routes, shortest {best:g}")
    return EXIT_OK


def _load_fronts(pattern: str):
    files = sorted(glob.glob(pattern))
    if not files:
        raise ConfigurationError(f"no front files match {pattern!r}")
    fronts, names = {}, None
    for f in files:
        cols, rows = io.read_front_csv(f)
        if names is not None and cols != names:
            raise ConfigurationError(f"{f}: objectives {cols} differ from {names}")
        names = cols
        F = np.array(rows, dtype=float).reshape(-1, len(cols))
        if len(cols) == 4:
            F = -F      # storage scores are maximized
        fronts[f] = F
    return names, fronts


def cmd_indicators(args) -> int:
    from .moo import indicator_report, reference_front
    names, fronts = _load_fronts(args.fronts)
    if args.ref == "auto":
        ref = reference_front([F for F in fronts.values() if len(F)]).objectives
    else:
        rcols, rrows = io.read_front_csv(args.ref)
        if rcols != names:
            raise ConfigurationError("reference front has different objectives")
        ref = np.array(rrows, dtype=float).reshape(-1, len(rcols))
        ref = -ref if len(rcols) == 4 else ref
    if len(ref) == 0:
        raise ConfigurationError("empty reference front")
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["front", "C", "GD", "ED", "PFS", "GS", "IGD"])
    for f, F in fronts.items():
        rep = indicator_report(F, ref)
        w.writerow([f, *(_fmt(v) for v in rep.as_tuple()[:6])])
    text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_experiment(args) -> int:
    from .bench import ExperimentPlan, run_setting, summarize
    plan = ExperimentPlan.load(args.plan)
    out = _out_dir(args.out)
    table = run_setting(plan)
    paths = summarize(table, out)
    (out / "plan.json").write_text(json.dumps(plan.to_dict(), indent=1) + "\n")
    for row in open(paths["summary"]).read().splitlines():
        print(row)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mezzopt", description="Storage assignment and order picking for mezzanine warehouses.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="generate a warehouse, orders and rules")
    g.add_argument("--spec", required=True)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--policy", choices=("random", "nsga2"), default=None, help="initial fill policy")
    g.add_argument("--out", default=".")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("assign", help="store one product")
    a.add_argument("--warehouse", required=True)
    a.add_argument("--task", required=True)
    a.add_argument("--algo", choices=("nsga2", "random", "closest", "rank"), default="nsga2")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--size", choices=("small", "medium", "large"), default="small",
                   help="NSGA-II population and generation defaults")
    a.add_argument("--params", help="JSON file overriding NSGA-II parameters")
    a.add_argument("--save-warehouse", help="also write the warehouse with the allocation applied")
    a.add_argument("--out", default=".")
    a.set_defaults(func=cmd_assign)

    k = sub.add_parser("pick", help="route one order")
    k.add_argument("--warehouse", required=True)
    k.add_argument("--order", required=True)
    k.add_argument("--order-number", type=int, default=None)
    k.add_argument("--algo", choices=("aco3", "aco4", "sshape"), default="aco3")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--params", help="JSON file overriding ACO parameters")
    k.add_argument("--out", default=".")
    k.set_defaults(func=cmd_pick)

    i = sub.add_parser("indicators", help="quality indicators of front CSVs")
    i.add_argument("--fronts", required=True, help="glob of front CSV files")
    i.add_argument("--ref", default="auto", help="'auto' (union of all fronts) or a front CSV")
    i.add_argument("--out", default=None)
    i.set_defaults(func=cmd_indicators)

    e = sub.add_parser("experiment", help="run an experiment plan")
    e.add_argument("--plan", required=True)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InfeasibleError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigurationError, UsageError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except MezzoptError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
