import json
import subprocess
import sys
from pathlib import Path

import pytest

from mezzopt.cli import main

from conftest import TINY

ACO = {"max_iter": 10, "max_cons_iter_wo_impr": 3}
NSGA = {"parent_pop_size": 8, "max_generations": 4}


def run(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "mezzopt.cli", *map(str, args)], capture_output=True, text=True,
                          cwd=cwd)


def cli(args):
    return main([str(a) for a in args])


def outputs(d: Path, skip=("timing.csv",)) -> dict:
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.is_file() and p.name not in skip}


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    (d / "spec.json").write_text(json.dumps(TINY))
    (d / "aco.json").write_text(json.dumps(ACO))
    (d / "nsga.json").write_text(json.dumps(NSGA))
    assert cli(["generate", "--spec", d / "spec.json", "--seed", "4", "--out", d / "inst"]) == 0
    orders = json.loads((d / "inst" / "orders.json").read_text())
    line = orders["orders"][0]["lines"][0]
    (d / "task.json").write_text(json.dumps({"product_number": line[0], "quantity": 3}))
    return d


def commands(d: Path, out: Path):
    inst = d / "inst"
    return [
        ["generate", "--spec", d / "spec.json", "--seed", "7", "--out", out],
        ["assign", "--warehouse", inst / "warehouse.json", "--task", d / "task.json", "--algo", "nsga2",
         "--seed", "3", "--params", d / "nsga.json", "--out", out],
        ["assign", "--warehouse", inst / "warehouse.json", "--task", d / "task.json", "--algo", "random",
         "--seed", "3", "--out", out],
        ["pick", "--warehouse", inst / "warehouse.json", "--order", inst / "orders.json", "--algo", "aco4",
         "--seed", "5", "--params", d / "aco.json", "--out", out],
        ["pick", "--warehouse", inst / "warehouse.json", "--order", inst / "orders.json", "--algo", "sshape",
         "--order-number", "2", "--out", out],
    ]


def test_repeat_runs_are_byte_identical(files):
    for i, template in enumerate(commands(files, files / "x")):
        outs = []
        for rep in range(2):
            out = files / f"run{i}_{rep}"
            assert cli([out if c == files / "x" else c for c in template]) == 0
            outs.append(outputs(out))
        assert outs[0] == outs[1] and outs[0]


def test_indicators_and_experiment(files, capsys, monkeypatch):
    monkeypatch.setenv("MEZZOPT_THREADS", "1")
    for algo in ("random", "closest"):
        assert cli(["assign", "--warehouse", files / "inst" / "warehouse.json", "--task", files / "task.json",
                     "--algo", algo, "--out", files / f"ind_{algo}"]) == 0
    capsys.readouterr()
    assert cli(["indicators", "--fronts", str(files / "ind_*" / "front.csv"), "--ref", "auto"]) == 0
    first = capsys.readouterr().out
    assert first.splitlines()[0] == "front,C,GD,ED,PFS,GS,IGD" and len(first.splitlines()) == 3
    cli(["indicators", "--fronts", str(files / "ind_*" / "front.csv")])
    assert capsys.readouterr().out == first

    plan = {"setting": "2.t", "kind": "picking", "spec": {k: v for k, v in TINY.items() if k != "size"},
            "algorithms": ["aco3", "sshape"], "n_tasks": 2, "repetitions": 2, "aco": ACO}
    (files / "plan.json").write_text(json.dumps(plan))
    got = []
    for rep in range(2):
        assert cli(["experiment", "--plan", files / "plan.json", "--out", files / f"exp{rep}"]) == 0
        got.append(outputs(files / f"exp{rep}"))
    assert got[0] == got[1]
    assert {"summary.csv", "raw.csv", "plan.json"} <= set(got[0])


def test_exit_codes(files, tmp_path):
    inst = files / "inst"
    assert run("generate", "--spec", tmp_path / "nope.json").returncode == 3
    assert run("pick", "--warehouse", inst / "warehouse.json", "--order", inst / "orders.json",
               "--algo", "aco9").returncode == 3
    assert run("frobnicate").returncode == 3
    big = tmp_path / "big.json"
    big.write_text(json.dumps({"product_number": 1, "quantity": 10 ** 7}))
    r = run("assign", "--warehouse", inst / "warehouse.json", "--task", big, "--algo", "closest",
            "--out", tmp_path)
    assert r.returncode == 2, r.stderr
    wh = json.loads((inst / "warehouse.json").read_text())
    stock = {}
    for a in wh["assignments"]:
        stock[a[0]] = stock.get(a[0], 0) + a[-1]
    p = max(stock)
    order = tmp_path / "order.json"
    order.write_text(json.dumps({"order_number": 1, "lines": [[p, stock[p] + 1]]}))
    r = run("pick", "--warehouse", inst / "warehouse.json", "--order", order, "--algo", "sshape", "--out", tmp_path)
    assert r.returncode == 2, r.stderr
    bad_plan = tmp_path / "plan.json"
    bad_plan.write_text(json.dumps({"setting": "x", "algorithms": []}))
    assert run("experiment", "--plan", bad_plan, "--out", tmp_path / "e").returncode == 3
