"""Sum-product algorithm on normal factor graphs, flooding schedule.

Messages live on (factor, edge) pairs and are normalized to sum to one
after every sweep, so fixed points are well defined.  At temperature T the
local values are raised to 1/T first; fixed points then correspond to
stationary points of the Bethe free energy at that temperature.
"""

from __future__ import annotations

import numpy as np

from .covers import PseudoMarginals
from .nfg import Nfg


class SpaState:
    """Messages plus convergence bookkeeping for one run."""

    __slots__ = ("messages", "iterations", "damping", "residual", "converged", "trace")

    def __init__(self, messages, iterations, damping, residual, converged, trace=None):
        self.messages = messages
        self.iterations = iterations
        self.damping = damping
        self.residual = residual
        self.converged = converged
        self.trace = trace

    def trace_csv(self) -> str:
        lines = ["iteration,residual,f_bethe"]
        for it, res, f in self.trace or []:
            f_txt = "" if f is None else f"{f:.12g}"
            lines.append(f"{it},{res:.12g},{f_txt}")
        return "\n".join(lines) + "\n"


def _factor_weights(nfg: Nfg, temperature: float):
    inv_t = 1.0 / float(temperature)
    weights = {}
    for fid, f in nfg.factors.items():
        rows = sorted(f.table)
        vals = np.array([float(f.table[k]) for k in rows], dtype=float)
        if inv_t != 1.0:
            vals = vals**inv_t
        weights[fid] = (rows, vals)
    return weights


def _initial_messages(nfg: Nfg, rng=None):
    msgs = {}
    for fid, f in nfg.factors.items():
        for e in f.edges:
            size = nfg.alphabet_sizes[e]
            if rng is None:
                v = np.full(size, 1.0 / size)
            else:
                v = rng.uniform(0.2, 1.0, size)
                v /= v.sum()
            msgs[(fid, e)] = v
    return msgs


def _incoming(nfg: Nfg, msgs, fid, e):
    ends = nfg.incidence[e]
    if len(ends) == 1:
        return np.full(nfg.alphabet_sizes[e], 1.0)
    other = ends[0] if ends[1] == fid else ends[1]
    return msgs[(other, e)]


def sum_product(
    nfg: Nfg,
    max_iters: int = 1000,
    damping: float = 0.0,
    tol: float = 1e-12,
    temperature: float = 1.0,
    init_rng=None,
    collect_trace: bool = False,
):
    """Run flooding sum-product; returns (SpaState, beliefs).

    Beliefs are assembled from the final messages; edge beliefs use the
    product of the two directed messages on full edges.  Non-convergence is
    reported in the state, never raised.  ``collect_trace`` records
    (iteration, residual, free energy) per sweep for convergence studies.
    """
    if not 0.0 <= damping < 1.0:
        raise ValueError("damping must be in [0, 1)")
    weights = _factor_weights(nfg, temperature)
    msgs = _initial_messages(nfg, init_rng)
    residual = float("inf")
    iterations = 0
    trace = [] if collect_trace else None
    for iterations in range(1, max_iters + 1):
        incoming = {
            (fid, e): _incoming(nfg, msgs, fid, e)
            for fid, f in nfg.factors.items()
            for e in f.edges
        }
        new_msgs = {}
        residual = 0.0
        for fid, f in nfg.factors.items():
            rows, vals = weights[fid]
            ins = [incoming[(fid, e)] for e in f.edges]
            outs = [np.zeros(nfg.alphabet_sizes[e]) for e in f.edges]
            for row, w in zip(rows, vals):
                if w == 0.0:
                    continue
                prods = [m[s] for m, s in zip(ins, row)]
                total = w
                for p in prods:
                    total *= p
                for pos, s in enumerate(row):
                    p = prods[pos]
                    if p > 0.0:
                        outs[pos][s] += total / p
                    else:
                        rest = w
                        for q, other in enumerate(prods):
                            if q != pos:
                                rest *= other
                        outs[pos][s] += rest
            for pos, e in enumerate(f.edges):
                v = outs[pos]
                total = v.sum()
                if total > 0:
                    v = v / total
                else:
                    v = np.full_like(v, 1.0 / len(v))
                old = msgs[(fid, e)]
                residual = max(residual, float(np.max(np.abs(v - old))))
                if damping > 0.0:
                    v = (1.0 - damping) * v + damping * old
                new_msgs[(fid, e)] = v
        msgs = new_msgs
        if trace is not None:
            trace.append((iterations, residual, _trace_free_energy(nfg, msgs, temperature)))
        if residual <= tol:
            break
    state = SpaState(msgs, iterations, damping, residual, residual <= tol, trace)
    return state, beliefs_from_messages(nfg, msgs, temperature)


def _trace_free_energy(nfg, msgs, temperature):
    from .bethe import bethe_terms
    from .errors import GcbError

    try:
        beliefs = beliefs_from_messages(nfg, msgs, temperature)
        # mid-run beliefs are only approximately consistent; skip that gate
        return bethe_terms(nfg, beliefs, temperature, tol=1.0).f_bethe
    except GcbError:
        return None


def beliefs_from_messages(nfg: Nfg, msgs, temperature: float = 1.0) -> PseudoMarginals:
    """Factor and edge beliefs induced by a message set."""
    weights = _factor_weights(nfg, temperature)
    factor_dists = {}
    for fid, f in nfg.factors.items():
        rows, vals = weights[fid]
        ins = [_incoming(nfg, msgs, fid, e) for e in f.edges]
        scores = []
        for row, w in zip(rows, vals):
            total = w
            for m, s in zip(ins, row):
                total *= m[s]
            scores.append(total)
        total = sum(scores)
        if total <= 0:
            scores = [1.0] * len(rows)
            total = float(len(rows))
        factor_dists[fid] = {row: s / total for row, s in zip(rows, scores) if s > 0}
    edge_dists = {}
    for e in nfg.edge_order:
        ends = nfg.incidence[e]
        if len(ends) == 1:
            v = np.array(msgs[(ends[0], e)], dtype=float)
        else:
            v = np.array(msgs[(ends[0], e)], dtype=float) * np.array(
                msgs[(ends[1], e)], dtype=float
            )
        total = v.sum()
        if total <= 0:
            v = np.full_like(v, 1.0)
            total = v.sum()
        edge_dists[e] = {s: v[s] / total for s in range(len(v)) if v[s] > 0}
    return PseudoMarginals(factor_dists, edge_dists)
