import numpy as np
import pytest

from mezzopt.errors import ConfigurationError
from mezzopt.generator import (GenSpec, generate_correlations, generate_instance, generate_orders,
                               generate_products, rank_quartiles, sample_weights, stock_levels)
from mezzopt.warehouse import validate_state

from conftest import TINY

N = 10 ** 5


def weight_shares(seed=0):
    _, comp = sample_weights(N, np.random.default_rng(seed))
    return np.bincount(comp, minlength=3) / N


def correlation_shares(seed=0):
    products = generate_products(GenSpec(assortment_size=N), np.random.default_rng(seed))
    rules = generate_correlations(products, np.random.default_rng(seed + 1))
    per = np.bincount([r.lhs for r in rules], minlength=N + 1)[1:]
    return np.bincount(per, minlength=4) / N, rules


def quartile_shares(seed=0):
    products = generate_products(GenSpec(assortment_size=2000), np.random.default_rng(seed))
    orders = generate_orders(products, np.random.default_rng(seed + 1), n_orders=N // 20, lines=20)
    quart = {int(p): q for q, g in enumerate(rank_quartiles(products)) for p in g}
    lines = [quart[ln.product_number] for o in orders for ln in o.lines]
    return np.bincount(lines, minlength=4) / len(lines), orders, products


def test_weight_mixture():
    assert np.allclose(weight_shares(), (0.25, 0.5, 0.25), atol=0.01)
    w, _ = sample_weights(1000, np.random.default_rng(1))
    assert w.min() >= 0.1


def test_correlation_counts():
    shares, rules = correlation_shares()
    assert np.allclose(shares, (0.3, 0.4, 0.2, 0.1), atol=0.01)
    assert all(0.1 <= r.confidence <= 0.9 and r.lhs != r.rhs for r in rules)
    pairs = [(r.lhs, r.rhs) for r in rules]
    assert len(set(pairs)) == len(pairs)


def test_order_quartiles():
    shares, orders, products = quartile_shares()
    assert np.allclose(shares, (0.4, 0.3, 0.2, 0.1), atol=0.02)
    assert len(orders) == N // 20 and all(len(o.lines) == 20 for o in orders)
    assert all(ln.quantity >= 1 for o in orders for ln in o.lines)
    counts = np.bincount([ln.product_number for o in orders for ln in o.lines])
    top = min(products, key=lambda p: products[p].rank)
    bottom = max(products, key=lambda p: products[p].rank)
    assert counts[top] > counts[bottom]


def test_spec_defaults_and_validation():
    assert GenSpec("small").assortment_size == 500
    assert GenSpec("medium").assortment_size == 1000
    assert GenSpec("large").assortment_size == 1500
    with pytest.raises(ConfigurationError):
        GenSpec("huge")
    with pytest.raises(ConfigurationError):
        GenSpec(fill_fraction=0)
    with pytest.raises(ConfigurationError):
        GenSpec.from_dict({"colour": "red"})


def test_reproducible():
    a = generate_instance(GenSpec(**TINY), 5)
    b = generate_instance(GenSpec(**TINY), 5)
    assert a.warehouse.assignments == b.warehouse.assignments
    assert a.orders == b.orders
    assert a.warehouse.rules == b.warehouse.rules


@pytest.mark.parametrize("by", ["volume", "compartments"])
def test_fill_band(by):
    inst = generate_instance(GenSpec(**{**TINY, "fill_fraction": 0.5, "fill_by": by}), 3)
    assert 0.5 <= inst.warehouse.index.fill_ratio(by) <= 0.55
    assert validate_state(inst.warehouse) == []


def test_nsga_fill_band():
    inst = generate_instance(GenSpec(**{**TINY, "fill_fraction": 0.5}), 3, "nsga2")
    assert 0.5 <= inst.warehouse.index.fill_ratio("volume") <= 0.55
    assert validate_state(inst.warehouse) == []


def test_orders_respect_stock(tiny):
    stock = stock_levels(tiny.warehouse)
    for o in tiny.orders:
        assert all(ln.quantity <= stock.get(ln.product_number, 0) for ln in o.lines)


def test_unreachable_fill():
    with pytest.raises(ConfigurationError):
        generate_instance(GenSpec(**{**TINY, "fill_fraction": 1.0}), 3)
