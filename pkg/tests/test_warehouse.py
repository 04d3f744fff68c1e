import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mezzopt.errors import ConfigurationError, UsageError
from mezzopt.warehouse import (AssociationRule, Compartment, FloorLayout, Order, OrderLine, Placement, Product,
                               Rack, StorageAllocation, apply_allocation, compartment_capacity,
                               manhattan_distance, movement_class, rack_walk_distance, remaining_capacity,
                               validate_state, validate_storage_solution, weight_class, zone_of)


def product(weight=2.0, rank=1, dims=(0.5, 0.5, 0.5), number=1):
    return Product(number, dims, weight, rank, 2.0, 1.0)


def layout(pds):
    return FloorLayout(4.0, 4.0, tuple(pds), (0.0, 4.0), ((2.0, "narrow"),))


def rack_at(x, y):
    return Rack(1, 1, (x, y), 1, 0, 0, "left", 1)


def test_manhattan_examples():
    assert manhattan_distance((1, 2), (1, 2)) == 0
    assert manhattan_distance((1, 2), (3, 5)) == 5
    assert manhattan_distance((0, 0), (4, 7)) == 11
    with pytest.raises(UsageError):
        manhattan_distance((0, 0), (1, 2, 3))


coords = st.tuples(st.integers(-50, 50), st.integers(-50, 50))


@given(coords, coords, coords)
def test_manhattan_is_metric(p, q, r):
    assert manhattan_distance(p, q) >= 0
    assert manhattan_distance(p, q) == manhattan_distance(q, p)
    assert (manhattan_distance(p, q) == 0) == (p == q)
    assert manhattan_distance(p, r) <= manhattan_distance(p, q) + manhattan_distance(q, r)


def test_rack_walk_distance_examples():
    assert rack_walk_distance(rack_at(1, 2), layout([(2, 0)])) == 3
    assert rack_walk_distance(rack_at(2, 0), layout([(2, 0)])) == 0
    assert rack_walk_distance(rack_at(1, 1), layout([(2, 0), (0, 2)])) == 2
    with pytest.raises(ConfigurationError):
        rack_walk_distance(rack_at(1, 1), layout([]))


@given(st.lists(coords, min_size=1, max_size=4), coords)
def test_rack_walk_distance_is_min(pds, ap):
    lay = FloorLayout(200.0, 200.0, tuple(pds), (0.0, 4.0), ())
    d = rack_walk_distance(Rack(1, 1, ap, 1, 0, 0, "left", 1), lay)
    assert all(d <= manhattan_distance(ap, pd) for pd in pds)


def test_compartment_capacity_examples():
    comp = lambda dims: Compartment(1, dims, 0, 0, 0.0)
    assert compartment_capacity(comp((1, 1, 1)), product(dims=(1, 1, 1))) == 1
    assert compartment_capacity(comp((1, 0.5, 0.5)), product(dims=(0.5, 0.5, 0.5))) == 2
    assert compartment_capacity(comp((1, 0.4, 1)), product(dims=(0.5, 0.5, 0.5))) == 0


def test_zone_examples():
    assert zone_of(Compartment(1, (1, 0.3, 1), 0, 0, 0.8)) == "grip"
    assert zone_of(Compartment(1, (1, 0.5, 1), 0, 0, 0.0)) == "low"
    assert zone_of(Compartment(1, (1, 0.4, 1), 0, 0, 1.5)) == "high"
    assert zone_of(Compartment(1, (1, 0.75, 1), 0, 0, 0.0)) == "grip"  # touching the band counts


@given(st.floats(0, 3), st.floats(0.01, 1))
def test_zone_partition(bottom, height):
    z = zone_of(Compartment(1, (1, height, 1), 0, 0, bottom))
    top = bottom + height
    assert z == ("low" if top < 0.75 else "high" if bottom > 1.25 else "grip")


def test_classes():
    assert weight_class(product(2.0)) == "light"
    assert weight_class(product(3.0)) == "light"
    assert weight_class(product(7.0)) == "medium"
    assert weight_class(product(7.5)) == "heavy"
    assert movement_class(product(rank=10), 100) == "fast"
    assert movement_class(product(rank=50), 100) == "moderate"
    assert movement_class(product(rank=90), 100) == "slow"


def test_type_invariants():
    with pytest.raises(ConfigurationError):
        product(weight=0)
    with pytest.raises(ConfigurationError):
        Product(1, (1, 1, 1), 1.0, 0, 1.0, 1.0)
    with pytest.raises(ConfigurationError):
        AssociationRule(1, 1, 0.5)
    with pytest.raises(ConfigurationError):
        AssociationRule(1, 2, 1.5)
    with pytest.raises(UsageError):
        Order(1, (OrderLine(1, 1), OrderLine(1, 2)))
    with pytest.raises(ConfigurationError):
        Rack(1, 1, (0, 1), 0, 0, 0, "left", 1)
    with pytest.raises(ConfigurationError):
        Compartment(1, (0, 1, 1), 0, 0, 0.0)


def _empty_and_held(state):
    idx = state.index
    empty = int(np.nonzero(idx.comp_product < 0)[0][0])
    held = int(np.nonzero(idx.comp_product >= 0)[0][0])
    return empty, held


def _ref(state, k):
    idx = state.index
    r = idx.racks[idx.comp_rack[k]]
    return (r.floor_id, r.rack_id, idx.compartments[k].compartment_id)


def test_remaining_capacity_examples(tiny):
    state = tiny.warehouse
    idx = state.index
    empty, held = _empty_and_held(state)
    p = state.products[1]
    cap = compartment_capacity(idx.compartments[empty], p)
    assert remaining_capacity(state, _ref(state, empty), p) == cap
    owner = state.products[int(idx.comp_product[held])]
    stored = int(idx.comp_qty[held])
    full = compartment_capacity(idx.compartments[held], owner)
    assert remaining_capacity(state, _ref(state, held), owner) == full - stored
    other = next(q for q in state.products.values() if q.product_number != owner.product_number)
    assert remaining_capacity(state, _ref(state, held), other) == 0


def test_validate_storage_examples(tiny):
    state = tiny.warehouse
    idx = state.index
    empty, held = _empty_and_held(state)
    owner = int(idx.comp_product[held])
    other = next(q for q in state.products if q != owner and
                 compartment_capacity(idx.compartments[held], state.products[q]) > 0)
    f, r, c = _ref(state, empty)
    ok = StorageAllocation(other, 1, (Placement(f, r, c, 1),))
    assert validate_storage_solution(state, ok) == []
    f, r, c = _ref(state, held)
    bad = StorageAllocation(other, 1, (Placement(f, r, c, 1),))
    assert [v.constraint for v in validate_storage_solution(state, bad)] == ["HC2"]
    f, r, c = _ref(state, empty)
    cap = compartment_capacity(idx.compartments[empty], state.products[other])
    over = StorageAllocation(other, cap + 1, (Placement(f, r, c, cap + 1),))
    assert "HC3" in [v.constraint for v in validate_storage_solution(state, over)]
    short = StorageAllocation(other, 3, (Placement(f, r, c, 1),))
    assert "HC1" in [v.constraint for v in validate_storage_solution(state, short)]


def test_apply_then_validate(tiny):
    state = tiny.warehouse
    idx = state.index
    empty, _ = _empty_and_held(state)
    f, r, c = _ref(state, empty)
    alloc = StorageAllocation(3, 1, (Placement(f, r, c, 1),))
    assert validate_storage_solution(state, alloc) == []
    new = apply_allocation(state, alloc)
    assert validate_state(new) == []
    assert new.quantity_on_floor(3)[f] == state.quantity_on_floor(3)[f] + 1
    assert np.all(new.index.comp_qty >= 0)


def test_generated_state_is_valid(tiny, mini):
    for inst in (tiny, mini):
        assert validate_state(inst.warehouse) == []
        assert inst.warehouse.check() == []
