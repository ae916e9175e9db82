"""Max-entropy completion of half-edge marginals to full pseudo-marginals.

For parity-check-shaped code graphs the completion decouples: every full
edge touches a repetition factor whose block is pinned by the half-edge
marginal, so the remaining entropy maximization splits into one
exponential-family tilt per check factor.  The induced entropy of the
half-edge marginal vector is the Bethe entropy of the completed vector.
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np

from .bethe import bethe_terms, tilt_factor_block
from .covers import PseudoMarginals
from .errors import GcbError, InfeasibleOmega, NonBinaryAlphabet, ShapeMismatch
from .nfg import Nfg


class BmeResult:
    """Completed pseudo-marginals plus the solve diagnostics."""

    __slots__ = ("beta", "h_induced", "check_duals", "iterations")

    def __init__(self, beta, h_induced, check_duals, iterations):
        self.beta = beta
        self.h_induced = h_induced
        self.check_duals = check_duals
        self.iterations = iterations


def _split_variable_check(nfg: Nfg):
    """Variable factors pin their edges; every full edge must touch one."""
    variable = {}
    for e in nfg.half_edges:
        (fid,) = nfg.incidence[e]
        fac = nfg.factors[fid]
        arity = len(fac.edges)
        want = {(0,) * arity, (1,) * arity}
        if set(fac.table) != want or not fac.is_indicator():
            raise GcbError(
                f"factor {fid} on half-edge {e} is not a repetition indicator; "
                "max-entropy completion needs parity-check form"
            )
        variable[fid] = e
    checks = [f for f in sorted(nfg.factors) if f not in variable]
    for f in checks:
        for e in nfg.factors[f].edges:
            ends = nfg.incidence[e]
            if len(ends) != 2 or not any(x in variable for x in ends):
                raise GcbError(
                    f"check factor {f}: edge {e} is not pinned by a repetition factor"
                )
    return variable, checks


def bme_completion(nfg: Nfg, omega: Mapping[str, object], tol: float = 1e-12, max_iters: int = 200) -> BmeResult:
    """argmax of the Bethe entropy over completions matching the half-edge marginals.

    ``omega`` maps each half-edge to its probability of symbol one.  Check
    blocks are solved by damped Newton on the marginal-matching conditions
    of the entropy tilt; an unmatchable marginal vector raises
    InfeasibleOmega.
    """
    for e in nfg.alphabet_sizes:
        if nfg.alphabet_sizes[e] != 2:
            raise NonBinaryAlphabet(f"edge {e} has alphabet size {nfg.alphabet_sizes[e]}")
    if set(omega) != set(nfg.half_edges):
        raise ShapeMismatch("omega must assign exactly the half-edges")
    for e, w in omega.items():
        if not 0 <= float(w) <= 1:
            raise InfeasibleOmega(f"omega[{e}] = {w} outside [0, 1]")

    variable, checks = _split_variable_check(nfg)
    edge_target = {}
    factor_dists = {}
    edge_dists = {}
    for fid, half in variable.items():
        w = float(omega[half])
        fac = nfg.factors[fid]
        arity = len(fac.edges)
        block = {}
        if w < 1:
            block[(0,) * arity] = 1 - w
        if w > 0:
            block[(1,) * arity] = w
        factor_dists[fid] = block
        for e in fac.edges:
            edge_target[e] = w
            edge_dists[e] = {s: v for s, v in ((0, 1 - w), (1, w)) if v > 0}

    check_duals = {}
    iterations = 0
    for fid in checks:
        fac = nfg.factors[fid]
        forced = {}
        free_edges = []
        for pos, e in enumerate(fac.edges):
            w = edge_target[e]
            if w == 0.0:
                forced[pos] = 0
            elif w == 1.0:
                forced[pos] = 1
            else:
                free_edges.append(e)
        rows = [
            row
            for row in fac.support
            if all(row[pos] == s for pos, s in forced.items())
        ]
        if not rows:
            raise InfeasibleOmega(f"check {fid}: no support row matches the forced symbols")
        if not free_edges:
            if len(rows) != 1:
                raise GcbError(f"check {fid}: forced symbols leave {len(rows)} rows")
            factor_dists[fid] = {rows[0]: 1.0}
            check_duals[fid] = {}
            continue
        positions = {e: fac.edges.index(e) for e in free_edges}
        targets = {
            e: np.array([1 - edge_target[e], edge_target[e]]) for e in free_edges
        }
        log_w = np.array([math.log(fac.table[row]) for row in rows])
        res = tilt_factor_block(rows, log_w, positions, targets, tol=tol, max_iters=max_iters)
        iterations = max(iterations, res.iterations)
        if not res.converged:
            raise InfeasibleOmega(
                f"check {fid}: marginal matching did not converge; omega is outside "
                "the fundamental polytope or at its boundary"
            )
        factor_dists[fid] = {k: v for k, v in res.dist.items() if v > 0}
        check_duals[fid] = {e: res.duals[(e, 1)] for e in free_edges}

    beta = PseudoMarginals(factor_dists, edge_dists)
    h_induced = bethe_terms(nfg, beta, tol=1e-8).h_bethe
    return BmeResult(beta, h_induced, check_duals, iterations)


def induced_bethe_entropy(nfg: Nfg, omega: Mapping[str, object]) -> float:
    return bme_completion(nfg, omega).h_induced
