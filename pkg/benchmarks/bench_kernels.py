"""Benchmark: compiled kernels vs the pure-Python fallback.

Times the three hot loops on representative workloads and checks that both
backends produce identical results.  Run from the repository root:

    python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np


def _get_backends():
    import gcb._kernels.pyref as pyref

    try:
        import gcb._kernels._fast as fast
    except ImportError:
        fast = None
    return fast, pyref


def _fig1():
    from gcb.nfg import Factor, Nfg, parity_table

    factors = [
        Factor("f1", ("e1", "e2", "e5"), parity_table(3)),
        Factor("f2", ("e2", "e3", "e6"), parity_table(3)),
        Factor("f3", ("e3", "e4", "e7"), parity_table(3)),
        Factor("f4", ("e5", "e6", "e8"), parity_table(3)),
        Factor("f5", ("e7", "e8"), parity_table(2)),
    ]
    return Nfg({f"e{i}": 2 for i in range(1, 9)}, ["e1", "e4"], factors)


def _dumbbell():
    from gcb.nfg import Factor, Nfg, parity_table

    factors = [
        Factor("fA", ("e1", "e3"), parity_table(2)),
        Factor("fB", ("e1", "e2"), parity_table(2)),
        Factor("fC", ("e2", "e3", "e7"), parity_table(3)),
        Factor("fD", ("e4", "e6", "e7"), parity_table(3)),
        Factor("fE", ("e4", "e5"), parity_table(2)),
        Factor("fF", ("e5", "e6"), parity_table(2)),
    ]
    return Nfg({f"e{i}": 2 for i in range(1, 8)}, [], factors)


def _big_cycle_code(n_nodes=12, seed=7):
    """Random 4-regular multigraph-free cycle code: a dense DFS workload."""
    import random

    from gcb.nfg import Factor, Nfg, parity_table

    rng = random.Random(seed)
    while True:
        sockets = [v for v in range(n_nodes) for _ in range(4)]
        rng.shuffle(sockets)
        pairs = list(zip(sockets[::2], sockets[1::2]))
        if all(a != b for a, b in pairs) and len({tuple(sorted(p)) for p in pairs}) == len(pairs):
            break
    sizes = {}
    incident = {v: [] for v in range(n_nodes)}
    for k, (a, b) in enumerate(pairs):
        e = f"e{k:02d}"
        sizes[e] = 2
        incident[a].append(e)
        incident[b].append(e)
    factors = [
        Factor(f"v{v:02d}", tuple(incident[v]), parity_table(len(incident[v])))
        for v in range(n_nodes)
    ]
    return Nfg(sizes, [], factors)


def timeit(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller sweeps")
    args = parser.parse_args()

    from gcb._kernels import build_plan

    fast, pyref = _get_backends()
    if fast is None:
        print("compiled kernels unavailable; timing the fallback only")

    rows = []

    big = _big_cycle_code()
    plan = build_plan(big)
    label = f"single-graph DFS ({len(big.alphabet_sizes)} edges, {2**big.circuit_rank()} valid configs)"
    slow, t_py = timeit(pyref.count_and_zsum, plan, 1.0)
    if fast is not None:
        got, t_c = timeit(fast.count_and_zsum, plan, 1.0)
        assert got[0] == slow[0], (got, slow)
        rows.append((label, t_py, t_c))
    else:
        rows.append((label, t_py, None))

    fig1 = _fig1()
    plan = build_plan(fig1)
    fidx = np.array([fig1.edge_index(e) for e in fig1.full_edge_order])
    m = 2 if args.quick else 3
    n_covers = (2 if m == 2 else 6) ** 6  # (m!)^|full edges|
    label = f"cover Z-sum sweep (degree {m}, {n_covers} covers)"
    if fast is not None:
        got, t_c = timeit(fast.cover_sweep, plan, fidx, m, 1.0, 0, n_covers)
        cap = n_covers if args.quick else 2000
        slow_part, t_py_part = timeit(pyref.cover_sweep, plan, fidx, m, 1.0, 0, cap)
        t_py = t_py_part * (n_covers / cap)
        if cap == n_covers:
            assert got[1] == slow_part[1]
        rows.append((label, t_py, t_c))
    else:
        slow, t_py = timeit(pyref.cover_sweep, plan, fidx, m, 1.0, 0, min(n_covers, 2000))
        rows.append((label, t_py * (n_covers / min(n_covers, 2000)), None))

    dumbbell = _dumbbell()
    order = sorted(dumbbell.factors)
    u = np.array([order.index(dumbbell.incidence[e][0]) for e in dumbbell.full_edge_order])
    v = np.array([order.index(dumbbell.incidence[e][1]) for e in dumbbell.full_edge_order])
    m = 3
    n_covers = 6**7
    label = f"cycle component histogram (degree {m}, {n_covers} covers)"
    if fast is not None:
        got, t_c = timeit(fast.cycle_component_histogram, len(order), u, v, m, 0, n_covers)
        cap = 20000 if args.quick else n_covers
        slow, t_py_part = timeit(pyref.cycle_component_histogram, len(order), u, v, m, 0, cap)
        t_py = t_py_part * (n_covers / cap)
        if cap == n_covers:
            assert np.array_equal(got, slow)
        rows.append((label, t_py, t_c))
    else:
        slow, t_py = timeit(pyref.cycle_component_histogram, len(order), u, v, m, 0, 20000)
        rows.append((label, t_py * (n_covers / 20000), None))

    width = max(len(r[0]) for r in rows)
    print(f"{'workload':<{width}}  {'pure (s)':>10}  {'compiled (s)':>12}  {'speedup':>8}")
    for label, t_py, t_c in rows:
        if t_c is None:
            print(f"{label:<{width}}  {t_py:>10.3f}  {'n/a':>12}  {'n/a':>8}")
        else:
            print(f"{label:<{width}}  {t_py:>10.3f}  {t_c:>12.3f}  {t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
