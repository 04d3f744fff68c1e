import numpy as np
import pytest

from mezzopt import io
from mezzopt.errors import ConfigurationError
from mezzopt.picking import build_market_graph, solve_picking
from mezzopt.storage import AssignmentTask, NsgaParams, solve_storage


def test_warehouse_round_trip(tmp_path, mini):
    path = tmp_path / "wh.json"
    io.save_warehouse(mini.warehouse, path)
    back = io.load_warehouse(path)
    assert back.assignments == mini.warehouse.assignments
    assert back.products == mini.warehouse.products
    assert back.racks == mini.warehouse.racks
    assert back.rules == mini.warehouse.rules
    io.save_warehouse(back, tmp_path / "again.json")
    assert (tmp_path / "again.json").read_bytes() == path.read_bytes()


def test_orders_rules_task_round_trip(tmp_path, mini):
    io.write_json(tmp_path / "o.json", io.orders_to_dict(mini.orders))
    assert io.load_orders(tmp_path / "o.json") == tuple(mini.orders)
    io.write_json(tmp_path / "r.json", io.rules_to_dict(mini.warehouse.rules))
    assert io.load_rules(tmp_path / "r.json") == mini.warehouse.rules
    task = AssignmentTask(3, 7)
    io.write_json(tmp_path / "t.json", io.task_to_dict(task))
    assert io.load_task(tmp_path / "t.json") == task
    io.write_json(tmp_path / "bare.json", {"product_number": 3, "quantity": 7})
    assert io.load_task(tmp_path / "bare.json") == task


def test_bad_documents(tmp_path):
    (tmp_path / "x.json").write_text("{not json")
    with pytest.raises(ConfigurationError):
        io.read_json(tmp_path / "x.json")
    with pytest.raises(ConfigurationError):
        io.read_json(tmp_path / "missing.json")
    io.write_json(tmp_path / "w.json", {"format": "mezzopt-warehouse", "version": 99})
    with pytest.raises(ConfigurationError):
        io.load_warehouse(tmp_path / "w.json")
    io.write_json(tmp_path / "t.json", {"product_number": 1})
    with pytest.raises(ConfigurationError):
        io.load_task(tmp_path / "t.json")


def test_front_csvs(tmp_path, mini):
    res = solve_storage(mini.warehouse, AssignmentTask(5, 4), "closest", NsgaParams(), seed=0)
    alloc = io.allocation_from_dict(io.allocation_to_dict(res.allocation))
    assert alloc.placements == res.allocation.placements
    (tmp_path / "s.csv").write_text(io.storage_front_csv(res))
    cols, rows = io.read_front_csv(tmp_path / "s.csv")
    assert cols == ["spread", "distance", "quantity", "correlation"]
    assert len(rows) == sum(len(f) for f in res.fronts.values())
    g = build_market_graph(mini.warehouse)
    pr = solve_picking(g, mini.orders[0], "sshape")
    (tmp_path / "p.csv").write_text(io.route_front_csv(pr.front))
    cols, rows = io.read_front_csv(tmp_path / "p.csv")
    assert cols == ["distance", "violations"]
    assert np.allclose(rows, [r.objectives for r in pr.front])
