import itertools
import random
import subprocess
import sys

import numpy as np
import pytest

import gcb._kernels as kernels
from gcb._kernels import build_plan, perm_tables, pyref
from gcb.covers import build_cover, count_covers, enumerate_covers
from gcb.gibbs import gibbs_partition, valid_tuples
from gcb.nfg import Factor, Nfg

from conftest import make_dumbbell, make_fig1, make_loopy_positive

HAS_COMPILED = kernels.BACKEND == "compiled"

pytestmark = pytest.mark.skipif(
    not HAS_COMPILED, reason="compiled kernels unavailable; nothing to compare"
)


def _random_nfg(rng):
    """Random small graph mixing alphabet sizes, half-edges, and table values."""
    n_factors = rng.randrange(2, 5)
    sizes = {}
    half = []
    factors = []
    prev = None
    for i in range(n_factors):
        edges = []
        if prev is not None:
            edges.append(prev)
        leaf = f"h{i}"
        sizes[leaf] = rng.choice([2, 3])
        half.append(leaf)
        edges.append(leaf)
        if i < n_factors - 1:
            link = f"t{i}"
            sizes[link] = rng.choice([2, 3])
            edges.append(link)
            prev = link
        table = {}
        for key in itertools.product(*(range(sizes[e]) for e in edges)):
            if rng.random() < 0.75:
                table[key] = rng.uniform(0.1, 2.0)
        if not table:
            table[tuple(0 for _ in edges)] = 1.0
        factors.append(Factor(f"g{i}", tuple(edges), table))
    return Nfg(sizes, half, factors)


def test_count_and_zsum_matches_pure():
    rng = random.Random(5)
    for _ in range(25):
        nfg = _random_nfg(rng)
        plan = build_plan(nfg)
        for inv_t in (1.0, 0.5):
            fast = kernels.count_and_zsum(plan, inv_t)
            slow = pyref.count_and_zsum(plan, inv_t)
            assert fast[0] == slow[0]
            assert fast[1] == pytest.approx(slow[1], rel=1e-12)


def test_count_matches_enumeration():
    for nfg in (make_fig1(), make_dumbbell()):
        plan = build_plan(nfg)
        count, zsum = kernels.count_and_zsum(plan, 1.0)
        tuples = valid_tuples(nfg)
        assert count == len(tuples)
        assert zsum == pytest.approx(float(sum(v for _, v in tuples)), rel=1e-12)


def test_cover_sweep_matches_pure_and_percover():
    dumbbell = make_dumbbell()
    plan = build_plan(dumbbell)
    fidx = np.array([dumbbell.edge_index(e) for e in dumbbell.full_edge_order])
    n = count_covers(dumbbell, 2)
    fast = kernels.cover_sweep(plan, fidx, 2, 1.0, 0, n)
    slow = pyref.cover_sweep(plan, fidx, 2, 1.0, 0, n)
    assert fast[0] == pytest.approx(slow[0], rel=1e-12)
    assert fast[1] == slow[1]
    assert fast[2] == slow[2] == n
    direct = sum(
        float(gibbs_partition(build_cover(spec))) for spec in enumerate_covers(dumbbell, 2)
    )
    assert fast[0] == pytest.approx(direct, rel=1e-12)


def test_cover_sweep_range_split():
    fig1 = make_fig1()
    plan = build_plan(fig1)
    fidx = np.array([fig1.edge_index(e) for e in fig1.full_edge_order])
    n = count_covers(fig1, 2)
    whole = kernels.cover_sweep(plan, fidx, 2, 1.0, 0, n)
    parts = [
        kernels.cover_sweep(plan, fidx, 2, 1.0, a, b)
        for a, b in ((0, 20), (20, 50), (50, n))
    ]
    assert whole[0] == pytest.approx(sum(p[0] for p in parts), rel=1e-12)
    assert whole[1] == sum(p[1] for p in parts)


def test_cover_sweep_positive_tables():
    rng = random.Random(11)
    nfg = make_loopy_positive(rng)
    plan = build_plan(nfg)
    fidx = np.array([nfg.edge_index(e) for e in nfg.full_edge_order])
    fast = kernels.cover_sweep(plan, fidx, 2, 1.0, 0, 64)
    slow = pyref.cover_sweep(plan, fidx, 2, 1.0, 0, 64)
    assert fast[0] == pytest.approx(slow[0], rel=1e-10)


def test_cycle_histogram_matches_pure():
    dumbbell = make_dumbbell()
    order = sorted(dumbbell.factors)
    u = np.array([order.index(dumbbell.incidence[e][0]) for e in dumbbell.full_edge_order])
    v = np.array([order.index(dumbbell.incidence[e][1]) for e in dumbbell.full_edge_order])
    for m in (1, 2, 3):
        n = count_covers(dumbbell, m)
        fast = kernels.cycle_component_histogram(len(order), u, v, m, 0, n)
        slow = pyref.cycle_component_histogram(len(order), u, v, m, 0, n)
        assert np.array_equal(fast, slow)
        assert int(fast.sum()) == n


def test_cycle_histogram_reproduces_z_multiset():
    dumbbell = make_dumbbell()
    order = sorted(dumbbell.factors)
    u = np.array([order.index(dumbbell.incidence[e][0]) for e in dumbbell.full_edge_order])
    v = np.array([order.index(dumbbell.incidence[e][1]) for e in dumbbell.full_edge_order])
    hist = kernels.cycle_component_histogram(len(order), u, v, 2, 0, 128)
    # Z = 2^{M + #components}: 96 covers at Z=8, 32 at Z=16
    assert hist[1] == 96 and hist[2] == 32


def test_perm_tables_lehmer_order():
    perms, inv = perm_tables(3)
    assert [tuple(p) for p in perms] == [
        (0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0),
    ]
    for p, q in zip(perms, inv):
        assert all(q[p[i]] == i for i in range(3))


def test_env_override_selects_pure_backend():
    code = (
        "import os; os.environ['GCB_PURE_KERNELS']='1'; "
        "import gcb._kernels as k; print(k.BACKEND)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "pure"
