"""Pure-Python reference kernels.

Semantics match the compiled kernels in ``_fast.pyx`` exactly; these run
everywhere and serve as the import-time fallback and as the oracle in the
kernel equivalence tests.
"""

from __future__ import annotations

import numpy as np

from .plan import Plan, perm_tables

IS_COMPILED = False


def count_and_zsum(plan: Plan, inv_t: float) -> tuple:
    """(number of valid configurations, sum of global value ** inv_t)."""
    assign = np.full(len(plan.sizes), -1, dtype=np.int64)
    return _walk_rec(plan, assign, 0, 1.0, inv_t, None, 0, len(plan.factors))


def _walk_rec(plan, assign, step, prod, inv_t, perm_inv_by_edge, m_stride, total):
    """DFS over factor supports; shared by the base and cover walks.

    For cover walks, ``assign`` holds one slot per (edge, copy) pair,
    ``m_stride`` is the cover degree, and the walk runs over (factor, copy)
    pairs in factor-major order.
    """
    if step == total:
        return 1, prod if inv_t == 1.0 else prod**inv_t
    if m_stride == 0:
        fp = plan.factors[step]
        slots = fp.edge_idx
    else:
        fp = plan.factors[step // m_stride]
        m = step % m_stride
        slots = np.empty(len(fp.edge_idx), dtype=np.int64)
        for p in range(len(fp.edge_idx)):
            base = fp.edge_idx[p]
            if fp.twist[p]:
                m_eff = perm_inv_by_edge[base][m]
            else:
                m_eff = m
            slots[p] = base * m_stride + m_eff

    key = 0
    for j, p in enumerate(fp.bound_sel):
        key += assign[slots[p]] * fp.bound_radix[j]
    lo = fp.group_offset[key]
    hi = fp.group_offset[key + 1]
    count = 0
    zsum = 0.0
    for r in range(lo, hi):
        row = fp.rows[r]
        ok = True
        for p in fp.bound_sel:
            if assign[slots[p]] != row[p]:
                ok = False
                break
        if not ok:
            continue
        for p in fp.free_sel:
            assign[slots[p]] = row[p]
        c, z = _walk_rec(
            plan, assign, step + 1, prod * fp.values[r], inv_t, perm_inv_by_edge,
            m_stride, total,
        )
        count += c
        zsum += z
        for p in fp.free_sel:
            assign[slots[p]] = -1
    return count, zsum


def cover_sweep(plan: Plan, full_edge_idx, m: int, inv_t: float, start: int, stop: int):
    """Sweep covers [start, stop) in odometer order over per-edge permutations.

    Returns (sum over covers of Z, sum over covers of |valid configs|,
    number of covers visited).  Z is the sum of global value ** inv_t of the
    cover; permutation digits use lexicographic (Lehmer) order with the last
    full edge's digit moving fastest.
    """
    perms, inv = perm_tables(m)
    n_fact = len(perms)
    n_edges = len(plan.sizes)
    full_edge_idx = list(full_edge_idx)
    digits = [0] * len(full_edge_idx)
    zsum_total = 0.0
    count_total = 0
    n = 0
    for index in range(start, stop):
        rem = index
        for j in range(len(digits) - 1, -1, -1):
            digits[j] = rem % n_fact
            rem //= n_fact
        perm_inv_by_edge = {}
        for j, e in enumerate(full_edge_idx):
            perm_inv_by_edge[e] = inv[digits[j]]
        assign = np.full(n_edges * m, -1, dtype=np.int64)
        c, z = _walk_rec(plan, assign, 0, 1.0, inv_t, perm_inv_by_edge, m, len(plan.factors) * m)
        zsum_total += z
        count_total += c
        n += 1
    return zsum_total, count_total, n


def cycle_component_histogram(n_nodes: int, edges_u, edges_v, m: int, start: int, stop: int):
    """Histogram of connected-component counts over covers [start, stop).

    The base graph is given by parallel endpoint arrays; covers are indexed
    the same odometer way as in ``cover_sweep``.  Entry k of the returned
    array counts covers whose lift has k components.
    """
    perms, _ = perm_tables(m)
    n_fact = len(perms)
    n_edges = len(edges_u)
    hist = np.zeros(n_nodes * m + 1, dtype=np.int64)
    parent = np.zeros(n_nodes * m, dtype=np.int64)
    digits = [0] * n_edges

    for index in range(start, stop):
        rem = index
        for j in range(n_edges - 1, -1, -1):
            digits[j] = rem % n_fact
            rem //= n_fact
        for i in range(n_nodes * m):
            parent[i] = i
        comp = n_nodes * m
        for j in range(n_edges):
            u = edges_u[j] * m
            v = edges_v[j] * m
            p = perms[digits[j]]
            for k in range(m):
                a = u + k
                b = v + p[k]
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                while parent[b] != b:
                    parent[b] = parent[parent[b]]
                    b = parent[b]
                if a != b:
                    parent[a] = b
                    comp -= 1
        hist[comp] += 1
    return hist
