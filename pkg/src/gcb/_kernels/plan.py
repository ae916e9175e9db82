"""Array-level evaluation plan shared by the compiled and pure kernels.

The plan flattens a factor graph into contiguous arrays so the valid
configuration space can be walked by depth-first search over factor
supports: factors are visited in a fixed order, each factor's support rows
are grouped by their projection onto edges bound by earlier factors, and
free edges are assigned as rows are chosen.  The same plan drives both the
single-graph walk and the sweep over all degree-M covers (edge instances of
a cover are index-remapped copies of the base edges, so boundness and row
grouping carry over unchanged).
"""

from __future__ import annotations

import numpy as np

MAX_GROUP_TABLE = 1 << 20


class FactorPlan:
    __slots__ = (
        "edge_idx",
        "twist",
        "bound_sel",
        "free_sel",
        "bound_radix",
        "rows",
        "values",
        "group_offset",
        "n_groups",
    )


class Plan:
    __slots__ = ("sizes", "factors", "product_size", "all_unit", "edge_order")

    def __init__(self, nfg):
        order = nfg.edge_order
        self.edge_order = order
        self.sizes = np.array([nfg.alphabet_sizes[e] for e in order], dtype=np.int64)
        if self.sizes.size and int(self.sizes.max()) > 127:
            raise ValueError("kernel plans support alphabet sizes up to 127")
        self.product_size = int(np.prod(self.sizes)) if len(order) else 1

        # Greedy factor order: start from the smallest support, then keep
        # picking the factor sharing the most already-bound edges.
        remaining = set(nfg.factors)
        bound_edges: set[str] = set()
        ordered = []
        while remaining:
            def score(fid):
                f = nfg.factors[fid]
                shared = sum(1 for e in f.edges if e in bound_edges)
                return (-shared, len(f.table), fid)

            pick = min(remaining, key=score)
            remaining.discard(pick)
            ordered.append(pick)
            bound_edges.update(nfg.factors[pick].edges)

        self.all_unit = True
        self.factors = []
        bound_edges = set()
        for fid in ordered:
            f = nfg.factors[fid]
            fp = FactorPlan()
            if len(f.edges) > 64:
                raise ValueError("kernel plans support factor arity up to 64")
            fp.edge_idx = np.array([nfg.edge_index(e) for e in f.edges], dtype=np.int64)
            twist = []
            for e in f.edges:
                if e in nfg.half_edges:
                    twist.append(0)
                else:
                    twist.append(1 if nfg.incidence[e][1] == fid and nfg.incidence[e][0] != fid else 0)
            fp.twist = np.array(twist, dtype=np.int64)
            arity = len(f.edges)
            bound_sel = [p for p, e in enumerate(f.edges) if e in bound_edges]
            free_sel = [p for p in range(arity) if p not in bound_sel]
            fp.bound_sel = np.array(bound_sel, dtype=np.int64)
            fp.free_sel = np.array(free_sel, dtype=np.int64)

            support = sorted(f.table)
            values = np.array([float(f.table[k]) for k in support], dtype=np.float64)
            if not np.all(values == 1.0):
                self.all_unit = False
            rows = np.array(support, dtype=np.int8).reshape(len(support), arity)

            bound_sizes = [nfg.alphabet_sizes[f.edges[p]] for p in bound_sel]
            n_groups = 1
            for s in bound_sizes:
                n_groups *= s
            if n_groups > MAX_GROUP_TABLE:
                raise ValueError("bound-edge group table too large for kernel plan")
            radix = np.zeros(len(bound_sel), dtype=np.int64)
            mult = 1
            for j in range(len(bound_sel) - 1, -1, -1):
                radix[j] = mult
                mult *= bound_sizes[j]

            keys = np.zeros(len(support), dtype=np.int64)
            for j, p in enumerate(bound_sel):
                keys += rows[:, p].astype(np.int64) * radix[j]
            perm = np.lexsort((np.arange(len(support)), keys))
            rows = rows[perm]
            values = values[perm]
            keys = keys[perm]
            offset = np.zeros(n_groups + 1, dtype=np.int64)
            np.add.at(offset, keys + 1, 1)
            offset = np.cumsum(offset)

            fp.rows = np.ascontiguousarray(rows)
            fp.values = np.ascontiguousarray(values)
            fp.group_offset = np.ascontiguousarray(offset)
            fp.bound_radix = radix
            fp.n_groups = n_groups
            bound_edges.update(f.edges)
            self.factors.append(fp)


def build_plan(nfg) -> Plan:
    return Plan(nfg)


def perm_tables(m: int):
    """All permutations of range(m) in lexicographic order, plus inverses."""
    import itertools

    perms = np.array(list(itertools.permutations(range(m))), dtype=np.int64)
    inv = np.empty_like(perms)
    for i, p in enumerate(perms):
        inv[i, p] = np.arange(m, dtype=np.int64)
    return perms, inv
