"""Compiled and pure-Python kernels must agree bit for bit."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mezzopt import kernels
from mezzopt.picking import build_market_graph
from mezzopt.storage import FloorProblem
from mezzopt.storage.operators import random_genes

py = kernels.backend("python")
try:
    cy = kernels.backend("compiled")
except ImportError:
    cy = None

needs_compiled = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


def test_backend_flag():
    assert kernels.BACKEND in ("compiled", "python")


@needs_compiled
@given(st.lists(st.tuples(*[st.integers(0, 6)] * 3), min_size=0, max_size=40))
@settings(deadline=None)
def test_ranks_agree(F):
    A = np.array(F, dtype=float).reshape(-1, 3)
    assert np.array_equal(py.nondominated_ranks(A), cy.nondominated_ranks(A))


def _score_args(prob, counts):
    fm = prob.model
    return (np.ascontiguousarray(counts, dtype=np.int64), prob.existing.astype(np.int64),
            prob.area_of.astype(np.int64), int(prob.n_areas), fm.dist, float(prob.ideal_dist), fm.grid,
            fm.sa_nbays, fm.sa_of, fm.bay_of, fm.win_lo, fm.win_hi, fm.sa_window, int(prob.tq),
            prob.rule_ex, prob.rule_tq, prob.rule_conf)


@needs_compiled
def test_storage_scores_agree(mini):
    state = mini.warehouse
    rng = np.random.default_rng(0)
    for p in sorted(state.products)[:15]:
        for f in state.floors:
            prob = FloorProblem(state, p, f, state.products[p].target_quantity * 2)
            counts = np.stack([prob.counts(random_genes(prob, rng)) for _ in range(8)])
            a = py.storage_scores(*_score_args(prob, counts))
            b = cy.storage_scores(*_score_args(prob, counts))
            assert np.allclose(a, b, rtol=0, atol=1e-9)


@needs_compiled
def test_walk_and_replay_agree(mini):
    g = build_market_graph(mini.warehouse)
    M = len(g)
    rng = np.random.default_rng(1)
    for order in mini.orders[:8]:
        ctx = g.context(order)
        tau1, tau2 = rng.uniform(1, 25, (M, M)), rng.uniform(1, 25, (M, M))
        arrays = (ctx.zr_start, ctx.zr_sub, ctx.zh_start, ctx.zh_line, ctx.zh_qty, g.n_sub_aisles)
        for seed, two in ((3, False), (4, True), (2 ** 62 + 5, True)):
            start = seed % M
            a = py.ant_walk(start, seed, ctx.need, ctx.supply, g.distance, tau1, tau2, two, 1.0, 2.0, *arrays)
            b = cy.ant_walk(start, seed, ctx.need, ctx.supply, g.distance, tau1, tau2, two, 1.0, 2.0, *arrays)
            assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
            seq = np.asarray(a[0], dtype=np.int64)[::-1].copy()
            ra = py.replay(seq, ctx.need, ctx.supply, *arrays)
            rb = cy.replay(seq, ctx.need, ctx.supply, *arrays)
            assert all(np.array_equal(x, y) for x, y in zip(ra[:2], rb[:2])) and ra[2] == rb[2]


def test_env_forces_fallback():
    import os
    import subprocess
    import sys
    env = {**os.environ, "MEZZOPT_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", "import mezzopt.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
