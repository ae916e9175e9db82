"""Channel-coding layer: code graphs, channels, and the four decoders.

Parity-check matrices become graphs with one repetition factor per column
(carrying the observable half-edge) and one parity factor per row.
Attaching a channel converts each half-edge into a full edge terminated by
a unary likelihood factor, after which blockwise/symbolwise MAP decoding
work on the exact enumeration and their graph-cover analogues reduce to
Bethe free-energy minimization at temperatures zero and one.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Mapping, Sequence

from .bethe import minimize_bethe
from .covers import (
    PseudoMarginals,
    beta_from_configuration,
    build_cover_with_map,
    enumerate_covers,
    phi_m,
)
from .errors import (
    GcbError,
    LengthMismatch,
    NonBinaryAlphabet,
    NotCycleCode,
    ParseError,
)
from .gibbs import valid_tuples
from .nfg import Factor, Nfg, parity_table, parse_number, repetition_table


# -- parity-check matrices ----------------------------------------------------


class ParityCheckMatrix:
    """Dense binary matrix with row index set J and column index set I."""

    def __init__(self, rows: Sequence[Sequence[int]]):
        self.h = [tuple(int(x) for x in row) for row in rows]
        if not self.h:
            raise GcbError("empty parity-check matrix")
        width = len(self.h[0])
        for row in self.h:
            if len(row) != width:
                raise GcbError("ragged parity-check matrix")
            if any(x not in (0, 1) for x in row):
                raise GcbError("entries must be 0 or 1")
        for i in range(width):
            if all(row[i] == 0 for row in self.h):
                raise GcbError(f"column {i} is all-zero")
        self.n_rows = len(self.h)
        self.n_cols = width

    def column_weight(self, i: int) -> int:
        return sum(row[i] for row in self.h)

    def row_weight(self, j: int) -> int:
        return sum(self.h[j])

    def regularity(self):
        """(d_L, d_R) when column and row weights are constant, else None."""
        d_l = {self.column_weight(i) for i in range(self.n_cols)}
        d_r = {self.row_weight(j) for j in range(self.n_rows)}
        if len(d_l) == 1 and len(d_r) == 1:
            return d_l.pop(), d_r.pop()
        return None

    def codewords(self):
        """All codewords by direct enumeration; desk scale only."""
        out = []
        for x in itertools.product((0, 1), repeat=self.n_cols):
            if all(sum(h * s for h, s in zip(row, x)) % 2 == 0 for row in self.h):
                out.append(x)
        return out

    @classmethod
    def from_dense_text(cls, text: str) -> "ParityCheckMatrix":
        rows = []
        for ln, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                rows.append([int(t) for t in line.split()])
            except ValueError:
                raise ParseError(f"bad matrix row {line!r}", ln) from None
        return cls(rows)

    @classmethod
    def from_alist_text(cls, text: str) -> "ParityCheckMatrix":
        tokens = text.split()
        if len(tokens) < 4:
            raise ParseError("alist too short")
        it = iter(tokens)
        try:
            n = int(next(it))
            m = int(next(it))
            next(it), next(it)  # max degrees
            col_deg = [int(next(it)) for _ in range(n)]
            [int(next(it)) for _ in range(m)]
            h = [[0] * n for _ in range(m)]
            for i in range(n):
                for _ in range(col_deg[i]):
                    j = int(next(it))
                    if j > 0:
                        h[j - 1][i] = 1
        except StopIteration:
            raise ParseError("alist truncated") from None
        return cls(h)


def _pad(i: int, total: int) -> str:
    return f"{i:0{len(str(total))}d}"


def nfg_from_parity_check(h: ParityCheckMatrix) -> Nfg:
    """Code graph: repetition factor per column, parity factor per row.

    Half-edges are the n symbol positions; each one-entry h_{j,i}
    contributes a full edge between variable factor i and check factor j.
    """
    n, m = h.n_cols, h.n_rows
    alphabet = {}
    half = []
    factors = []
    for i in range(n):
        xi = f"x{_pad(i + 1, n)}"
        alphabet[xi] = 2
        half.append(xi)
    edge_of = {}
    for j in range(m):
        for i in range(n):
            if h.h[j][i]:
                name = f"x{_pad(i + 1, n)}_c{_pad(j + 1, m)}"
                alphabet[name] = 2
                edge_of[(j, i)] = name
    for i in range(n):
        edges = [f"x{_pad(i + 1, n)}"] + [
            edge_of[(j, i)] for j in range(m) if h.h[j][i]
        ]
        factors.append(Factor(f"v{_pad(i + 1, n)}", edges, repetition_table(len(edges))))
    for j in range(m):
        edges = [edge_of[(j, i)] for i in range(n) if h.h[j][i]]
        factors.append(Factor(f"c{_pad(j + 1, m)}", edges, parity_table(len(edges))))
    return Nfg(alphabet, half, factors)


def check_represents_code(nfg: Nfg, code, cap=None):
    """Verify the four code-representation conditions.

    Returns (ok, t_N, reason): all factors are indicators, half-edge
    alphabets agree, the half-edge projection equals the code, and every
    codeword has the same number t_N of full-behavior pre-images.
    """
    code = {tuple(int(s) for s in x) for x in code}
    for fid, f in nfg.factors.items():
        if not f.is_indicator():
            return False, None, f"factor {fid} is not an indicator"
    half = nfg.half_edge_order
    sizes = {nfg.alphabet_sizes[e] for e in half}
    if len(sizes) > 1:
        return False, None, "half-edge alphabets differ"
    positions = [nfg.edge_index(e) for e in half]
    fibers: dict[tuple, int] = {}
    for tup, _ in valid_tuples(nfg, cap=cap):
        x = tuple(tup[p] for p in positions)
        fibers[x] = fibers.get(x, 0) + 1
    if set(fibers) != code:
        return False, None, "half-edge projection differs from the code"
    t_values = set(fibers.values())
    if len(t_values) != 1:
        return False, None, f"fiber sizes vary: {sorted(t_values)}"
    return True, t_values.pop(), ""


# -- channels -----------------------------------------------------------------


class Channel:
    """Discrete memoryless channel: likelihood table W(y|x) over finite alphabets."""

    def __init__(self, input_size: int, w: Mapping[tuple, object], tol: float = 1e-12):
        self.input_size = int(input_size)
        self.w = {(str(y), int(x)): v for (y, x), v in w.items()}
        self.output_symbols = sorted({y for y, _ in self.w})
        for x in range(self.input_size):
            total = sum(float(v) for (y, xx), v in self.w.items() if xx == x)
            if abs(total - 1.0) > tol:
                raise GcbError(f"channel row for input {x} sums to {total}")
            for (y, xx), v in self.w.items():
                if xx == x and float(v) < 0:
                    raise GcbError("negative channel likelihood")

    def likelihood(self, y, x) -> object:
        return self.w.get((str(y), int(x)), Fraction(0))

    @classmethod
    def bsc(cls, p) -> "Channel":
        p = Fraction(p) if not isinstance(p, float) else p
        q = 1 - p
        return cls(2, {("0", 0): q, ("1", 0): p, ("0", 1): p, ("1", 1): q})

    @classmethod
    def from_table_text(cls, text: str, input_size: int = 2) -> "Channel":
        w = {}
        for ln, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4 or parts[0] != "W":
                raise ParseError("expected 'W <y> <x> <prob>'", ln)
            w[(parts[1], int(parts[2]))] = parse_number(parts[3])
        return cls(input_size, w)


class DecodingNfg:
    """A code graph with a received vector attached.

    ``symbol_edges`` are the former half-edges carrying the code symbols,
    in position order; ``gamma`` is the constant relating the global
    function to the joint input/output probability.
    """

    __slots__ = ("nfg", "symbol_edges", "gamma", "y", "code_nfg")

    def __init__(self, nfg, symbol_edges, gamma, y, code_nfg):
        self.nfg = nfg
        self.symbol_edges = tuple(symbol_edges)
        self.gamma = gamma
        self.y = tuple(y)
        self.code_nfg = code_nfg


def attach_channel(
    nfg_code: Nfg,
    channel: Channel,
    y: Sequence,
    prior: Sequence | None = None,
    cap=None,
) -> DecodingNfg:
    """Terminate each half-edge with a unary likelihood factor for y_i.

    Requires a single-pre-image representation (t_N = 1).  With the default
    uniform codeword prior the global function equals |code| times the
    joint probability of (x, y); a per-symbol product prior is absorbed
    into the channel factors.
    """
    half = nfg_code.half_edge_order
    if len(y) != len(half):
        raise LengthMismatch(f"received vector length {len(y)}, code length {len(half)}")
    positions = [nfg_code.edge_index(e) for e in half]
    fibers: dict[tuple, int] = {}
    for tup, _ in valid_tuples(nfg_code, cap=cap):
        x = tuple(tup[p] for p in positions)
        fibers[x] = fibers.get(x, 0) + 1
    if not fibers:
        raise GcbError("code graph has no valid configurations")
    t_values = set(fibers.values())
    if t_values != {1}:
        raise GcbError(
            f"attach_channel requires t_N = 1, found fiber sizes {sorted(t_values)}"
        )

    factors = list(nfg_code.factors.values())
    for i, e in enumerate(half):
        size = nfg_code.alphabet_sizes[e]
        table = {}
        for x in range(size):
            v = channel.likelihood(y[i], x)
            if prior is not None:
                v = v * prior[i][x]
            if v != 0:
                table[(x,)] = v
        if not table:
            raise GcbError(f"received symbol {y[i]!r} has zero likelihood everywhere")
        factors.append(Factor(f"ch_{e}", (e,), table))
    nfg_y = Nfg(nfg_code.alphabet_sizes, [], factors)

    if prior is None:
        gamma = Fraction(len(fibers))
    else:
        kappa = sum(
            math.prod(float(prior[i][x[i]]) for i in range(len(half)))
            for x in fibers
        )
        gamma = 1.0 / kappa
    return DecodingNfg(nfg_y, half, gamma, [str(v) for v in y], nfg_code)


# -- decoders -----------------------------------------------------------------


class DecodeResult:
    __slots__ = ("decisions", "beliefs", "symbol_beliefs", "tie", "objective", "diagnostics")

    def __init__(self, decisions, beliefs, symbol_beliefs, tie, objective, diagnostics=None):
        self.decisions = tuple(decisions)
        self.beliefs = beliefs
        self.symbol_beliefs = symbol_beliefs
        self.tie = tie
        self.objective = objective
        self.diagnostics = diagnostics or {}


def _symbol_argmax(dist: Mapping[int, object]):
    """Lexicographic tie-break: the smallest maximizing symbol wins."""
    best = max(float(v) for v in dist.values())
    winners = sorted(s for s, v in dist.items() if float(v) >= best * (1 - 1e-12))
    return winners[0], len(winners) > 1


def bmapd(dec: DecodingNfg, cap=None) -> DecodeResult:
    """Blockwise MAP: argmax of the global function over valid configurations."""
    nfg = dec.nfg
    positions = [nfg.edge_index(e) for e in dec.symbol_edges]
    best_val = None
    winners = []
    for tup, value in valid_tuples(nfg, cap=cap):
        if best_val is None or value > best_val:
            best_val = value
            winners = [tup]
        elif value == best_val:
            winners.append(tup)
    if best_val is None or best_val == 0:
        raise GcbError("no valid configuration with positive value")
    winner = winners[0]
    beta = beta_from_configuration(nfg, winner)
    decisions = [winner[p] for p in positions]
    symbol_beliefs = {e: dict(beta.edge_dists[e]) for e in dec.symbol_edges}
    return DecodeResult(
        decisions,
        beta,
        symbol_beliefs,
        len(winners) > 1,
        -math.log(best_val),
        {"n_optima": len(winners)},
    )


def smapd(dec: DecodingNfg, cap=None) -> DecodeResult:
    """Symbolwise MAP: per-symbol posterior marginals, decisions by argmax.

    The decision vector need not be a codeword.  The attached
    pseudo-marginals are the exact marginals of the posterior, so they are
    globally realizable by construction.
    """
    nfg = dec.nfg
    exact = all(
        isinstance(v, (Fraction, int))
        for f in nfg.factors.values()
        for v in f.table.values()
    )
    z = Fraction(0) if exact else 0.0
    factor_acc: dict = {f: {} for f in nfg.factors}
    edge_acc: dict = {e: {} for e in nfg.edge_order}
    for tup, value in valid_tuples(nfg, cap=cap):
        z += value
        for f in nfg.factors:
            key = nfg.local_assignment(f, tup)
            factor_acc[f][key] = factor_acc[f].get(key, 0) + value
        for e in nfg.edge_order:
            s = tup[nfg.edge_index(e)]
            edge_acc[e][s] = edge_acc[e].get(s, 0) + value
    if z == 0:
        raise GcbError("zero partition sum")
    beta = PseudoMarginals(
        {f: {k: v / z for k, v in d.items()} for f, d in factor_acc.items()},
        {e: {s: v / z for s, v in d.items()} for e, d in edge_acc.items()},
    )
    decisions = []
    tie = False
    for e in dec.symbol_edges:
        s, t = _symbol_argmax(beta.edge_dists[e])
        decisions.append(s)
        tie = tie or t
    symbol_beliefs = {e: dict(beta.edge_dists[e]) for e in dec.symbol_edges}
    return DecodeResult(decisions, beta, symbol_beliefs, tie, float(-math.log(float(z))))


def bgcd(dec: DecodingNfg, degree: int | None = None, cap=None, **minimize_kwargs) -> DecodeResult:
    """Blockwise graph-cover decoding: Bethe energy minimization at T = 0.

    ``degree`` switches to the literal degree-M rule: exhaustive argmax of
    the global value over all M-covers and their configurations, with the
    frequency map of the winner returned.
    """
    nfg = dec.nfg
    if degree is not None:
        best = None
        winners = []
        for spec in enumerate_covers(nfg, degree, cap=cap):
            cover, _ = build_cover_with_map(spec)
            for tup, value in valid_tuples(cover):
                if best is None or value > best:
                    best = value
                    winners = [(spec, tup)]
                elif value == best:
                    winners.append((spec, tup))
        if best is None:
            raise GcbError("no valid cover configuration")
        spec, tup = winners[0]
        beta = phi_m(spec, tup)
        decisions = []
        tie = len(winners) > 1
        for e in dec.symbol_edges:
            s, t = _symbol_argmax(beta.edge_dists[e])
            decisions.append(s)
            tie = tie or t
        symbol_beliefs = {e: dict(beta.edge_dists[e]) for e in dec.symbol_edges}
        objective = -math.log(float(best)) / degree
        return DecodeResult(decisions, beta, symbol_beliefs, tie, objective,
                            {"n_optima": len(winners), "degree": degree})
    res = minimize_bethe(nfg, 0, **minimize_kwargs)
    decisions = []
    tie = res.tie
    for e in dec.symbol_edges:
        s, t = _symbol_argmax(res.beta.edge_dists[e])
        decisions.append(s)
        tie = tie or t
    symbol_beliefs = {e: dict(res.beta.edge_dists[e]) for e in dec.symbol_edges}
    return DecodeResult(decisions, res.beta, symbol_beliefs, tie, res.f_min)


def sgcd(dec: DecodingNfg, degree: int | None = None, cap=None, **minimize_kwargs) -> DecodeResult:
    """Symbolwise graph-cover decoding: Bethe minimization at T = 1.

    ``degree`` switches to the literal degree-M rule: the partition-sum
    weighted average of cover marginals.  By the copy symmetry of the cover
    ensemble the marginals are independent of the copy index, so they are
    evaluated at the first copy only.
    """
    nfg = dec.nfg
    if degree is not None:
        return _sgcd_degree_m(dec, degree, cap=cap)
    res = minimize_bethe(nfg, 1.0, **minimize_kwargs)
    decisions = []
    tie = res.tie
    for e in dec.symbol_edges:
        s, t = _symbol_argmax(res.beta.edge_dists[e])
        decisions.append(s)
        tie = tie or t
    symbol_beliefs = {e: dict(res.beta.edge_dists[e]) for e in dec.symbol_edges}
    return DecodeResult(decisions, res.beta, symbol_beliefs, tie, res.f_min,
                        {"converged": res.converged})


def _sgcd_degree_m(dec: DecodingNfg, m: int, cap=None) -> DecodeResult:
    nfg = dec.nfg
    z_total = Fraction(0)
    factor_acc: dict = {f: {} for f in nfg.factors}
    edge_acc: dict = {e: {} for e in nfg.edge_order}
    for spec in enumerate_covers(nfg, m, cap=cap):
        cover, (factor_map, edge_map) = build_cover_with_map(spec)
        first_factor = {}
        for cf, (f, k) in factor_map.items():
            if k == 0:
                first_factor[f] = cf
        first_edge = {}
        for ce, (e, k) in edge_map.items():
            if k == 0:
                first_edge[e] = ce
        for tup, value in valid_tuples(cover):
            z_total += value
            for f, cf in first_factor.items():
                key = cover.local_assignment(cf, tup)
                factor_acc[f][key] = factor_acc[f].get(key, 0) + value
            for e, ce in first_edge.items():
                s = tup[cover.edge_index(ce)]
                edge_acc[e][s] = edge_acc[e].get(s, 0) + value
    if z_total == 0:
        raise GcbError("all covers have zero partition sum")
    beta = PseudoMarginals(
        {f: {k: v / z_total for k, v in d.items()} for f, d in factor_acc.items()},
        {e: {s: v / z_total for s, v in d.items()} for e, d in edge_acc.items()},
    )
    decisions = []
    tie = False
    for e in dec.symbol_edges:
        s, t = _symbol_argmax(beta.edge_dists[e])
        decisions.append(s)
        tie = tie or t
    symbol_beliefs = {e: dict(beta.edge_dists[e]) for e in dec.symbol_edges}
    return DecodeResult(decisions, beta, symbol_beliefs, tie, None, {"degree": m})


def fundamental_projection(nfg: Nfg, beta: PseudoMarginals) -> dict:
    """Half-edge marginals of symbol one: the pseudo-codeword of beta."""
    out = {}
    for e in nfg.half_edge_order:
        if nfg.alphabet_sizes[e] != 2:
            raise NonBinaryAlphabet(f"half-edge {e} has alphabet size {nfg.alphabet_sizes[e]}")
        out[e] = beta.edge_weight(e, 1)
    return out


def cycle_code_zgibbs(nfg: Nfg) -> int:
    """2 ** circuit rank, by component counting; no enumeration.

    Applies to all-parity, half-edge-free binary graphs, whose valid
    configurations are exactly the edge-disjoint unions of cycles.
    """
    if nfg.half_edges:
        raise NotCycleCode("graph has half-edges")
    for e, size in nfg.alphabet_sizes.items():
        if size != 2:
            raise NotCycleCode(f"edge {e} is not binary")
    for fid, f in nfg.factors.items():
        if f.table != parity_table(len(f.edges)):
            raise NotCycleCode(f"factor {fid} is not a parity indicator")
    return 2 ** nfg.circuit_rank()
