"""Degree-M graph covers: construction, enumeration, pre-image counting.

A cover is specified by one permutation of [M] per full edge; half-edges
are copied without permutation.  Labeled covers are never identified up to
isomorphism, so there are exactly (M!)^{|full edges|} of them.  The
frequency map from a cover configuration down to base pseudo-marginals is
exact rational arithmetic throughout.
"""

from __future__ import annotations

import itertools
import math
import os
import random
from fractions import Fraction
from typing import Iterator, Mapping

from .errors import (
    CapExceeded,
    InconsistentBeta,
    InvalidConfiguration,
    NonIntegralType,
    ParseError,
    ShapeMismatch,
)
from .gibbs import valid_tuples
from .nfg import Factor, Nfg

DEFAULT_COVER_CAP = 1 << 24


def cover_cap(override=None) -> int:
    if override is not None:
        return int(override)
    return int(os.environ.get("GCB_COVER_CAP", DEFAULT_COVER_CAP))


# -- pseudo-marginals ---------------------------------------------------------


class PseudoMarginals:
    """Per-factor and per-edge distributions satisfying edge consistency.

    ``factor_dists[f]`` maps local codewords (tuples over the factor's edge
    order) to weights; ``edge_dists[e]`` maps symbols to weights.  Zero
    entries may be omitted.
    """

    __slots__ = ("factor_dists", "edge_dists")

    def __init__(self, factor_dists: Mapping, edge_dists: Mapping):
        self.factor_dists = {
            f: {tuple(k): v for k, v in d.items() if v != 0}
            for f, d in factor_dists.items()
        }
        self.edge_dists = {
            e: {int(k): v for k, v in d.items() if v != 0}
            for e, d in edge_dists.items()
        }

    def canonical_key(self):
        """Hashable exact identity, used to deduplicate lift images."""
        fk = tuple(
            (f, tuple(sorted(self.factor_dists[f].items())))
            for f in sorted(self.factor_dists)
        )
        ek = tuple(
            (e, tuple(sorted(self.edge_dists[e].items())))
            for e in sorted(self.edge_dists)
        )
        return (fk, ek)

    def __eq__(self, other):
        return isinstance(other, PseudoMarginals) and self.canonical_key() == other.canonical_key()

    def __hash__(self):
        return hash(self.canonical_key())

    def is_exact(self) -> bool:
        values = itertools.chain(
            (v for d in self.factor_dists.values() for v in d.values()),
            (v for d in self.edge_dists.values() for v in d.values()),
        )
        return all(isinstance(v, (Fraction, int)) for v in values)

    def denominator(self) -> int:
        den = 1
        for d in self.factor_dists.values():
            for v in d.values():
                den = den * Fraction(v).denominator // math.gcd(den, Fraction(v).denominator)
        return den

    def factor_weight(self, f, key):
        return self.factor_dists[f].get(tuple(key), Fraction(0))

    def edge_weight(self, e, sym):
        return self.edge_dists[e].get(int(sym), Fraction(0))


def check_shape(nfg: Nfg, beta: PseudoMarginals):
    if set(beta.factor_dists) != set(nfg.factors):
        raise ShapeMismatch("factor blocks do not match the graph's factors")
    if set(beta.edge_dists) != set(nfg.alphabet_sizes):
        raise ShapeMismatch("edge blocks do not match the graph's edges")
    for f, d in beta.factor_dists.items():
        table = nfg.factors[f].table
        arity = len(nfg.factors[f].edges)
        for key in d:
            if len(key) != arity:
                raise ShapeMismatch(f"factor {f}: assignment {key} has wrong arity")
    for e, d in beta.edge_dists.items():
        size = nfg.alphabet_sizes[e]
        for sym in d:
            if not 0 <= sym < size:
                raise ShapeMismatch(f"edge {e}: symbol {sym} outside alphabet")


def beta_from_configuration(nfg: Nfg, config) -> PseudoMarginals:
    """Vertex pseudo-marginals of a single valid base configuration."""
    tup = config if isinstance(config, tuple) else nfg.config_tuple(config)
    factor_dists = {
        f: {nfg.local_assignment(f, tup): Fraction(1)} for f in nfg.factors
    }
    edge_dists = {
        e: {tup[nfg.edge_index(e)]: Fraction(1)} for e in nfg.alphabet_sizes
    }
    return PseudoMarginals(factor_dists, edge_dists)


# -- cover specification ------------------------------------------------------


class CoverSpec:
    """Degree and one 0-indexed permutation tuple per full edge."""

    __slots__ = ("nfg", "m", "perms")

    def __init__(self, nfg: Nfg, m: int, perms: Mapping[str, tuple]):
        self.nfg = nfg
        self.m = int(m)
        if set(perms) != set(nfg.full_edges):
            raise ShapeMismatch("need exactly one permutation per full edge")
        self.perms = {}
        for e, p in perms.items():
            p = tuple(int(x) for x in p)
            if sorted(p) != list(range(self.m)):
                raise ShapeMismatch(f"edge {e}: not a permutation of [{self.m}]")
            self.perms[e] = p

    def copy_label(self, m: int) -> str:
        width = len(str(self.m))
        return f"{m + 1:0{width}d}"


def count_covers(nfg: Nfg, m: int) -> int:
    return math.factorial(m) ** len(nfg.full_edges)


def cover_spec_at_index(nfg: Nfg, m: int, index: int) -> CoverSpec:
    """Decode an odometer index into a spec; last full edge moves fastest."""
    perms = list(itertools.permutations(range(m)))
    edges = [e for e in nfg.edge_order if e not in nfg.half_edges]
    digits = {}
    rem = index
    for e in reversed(edges):
        digits[e] = perms[rem % len(perms)]
        rem //= len(perms)
    if rem:
        raise IndexError("cover index out of range")
    return CoverSpec(nfg, m, digits)


def enumerate_covers(nfg: Nfg, m: int, cap=None, start=0, stop=None) -> Iterator[CoverSpec]:
    """All M-covers in odometer order over per-edge permutations.

    ``start``/``stop`` select an index range, so disjoint ranges may be
    handed to concurrent workers.
    """
    total = count_covers(nfg, m)
    limit = cover_cap(cap)
    if total > limit:
        raise CapExceeded(f"{total} covers exceed cap {limit}")
    if stop is None:
        stop = total
    for index in range(start, stop):
        yield cover_spec_at_index(nfg, m, index)


def random_cover(nfg: Nfg, m: int, seed) -> CoverSpec:
    """Uniform spec from a seeded generator; one shuffle per full edge."""
    rng = random.Random(seed)
    perms = {}
    for e in sorted(nfg.full_edges):
        p = list(range(m))
        rng.shuffle(p)
        perms[e] = tuple(p)
    return CoverSpec(nfg, m, perms)


def build_cover(spec: CoverSpec) -> Nfg:
    cover, _ = build_cover_with_map(spec)
    return cover


def build_cover_with_map(spec: CoverSpec):
    """The cover graph plus the projection maps back to the base.

    Copy m of full edge e joins copy m of its lexicographically smaller
    endpoint to copy sigma_e(m) of the larger one.  Returns (cover,
    (factor_map, edge_map)) where the maps send cover ids to (base id,
    copy index) pairs.
    """
    base = spec.nfg
    m = spec.m
    label = spec.copy_label

    alphabet_sizes = {}
    half_edges = []
    edge_map = {}
    for e in base.edge_order:
        for k in range(m):
            ce = f"{e}@{label(k)}"
            alphabet_sizes[ce] = base.alphabet_sizes[e]
            edge_map[ce] = (e, k)
            if e in base.half_edges:
                half_edges.append(ce)

    factor_map = {}
    factors = []
    for fid in sorted(base.factors):
        f = base.factors[fid]
        for k in range(m):
            cf = f"{fid}@{label(k)}"
            factor_map[cf] = (fid, k)
            edges = []
            for e in f.edges:
                if e in base.half_edges:
                    edges.append(f"{e}@{label(k)}")
                else:
                    lo, hi = base.incidence[e]
                    if fid == lo:
                        edges.append(f"{e}@{label(k)}")
                    else:
                        inv = spec.perms[e].index(k)
                        edges.append(f"{e}@{label(inv)}")
            factors.append(Factor(cf, edges, f.table))
    cover = Nfg(alphabet_sizes, half_edges, factors)
    return cover, (factor_map, edge_map)


def phi_m(spec: CoverSpec, cover_config) -> PseudoMarginals:
    """Frequency map from a valid cover configuration to base pseudo-marginals."""
    cover, (factor_map, edge_map) = build_cover_with_map(spec)
    tup = cover_config if isinstance(cover_config, tuple) else cover.config_tuple(cover_config)
    for cf in cover.factors:
        if cover.factors[cf].value(cover.local_assignment(cf, tup)) == 0:
            raise InvalidConfiguration(f"invalid at cover factor {cf}")
    return _phi_of_tuple(spec.nfg, spec.m, cover, factor_map, edge_map, tup)


def _phi_of_tuple(base: Nfg, m: int, cover: Nfg, factor_map, edge_map, tup) -> PseudoMarginals:
    factor_counts: dict = {f: {} for f in base.factors}
    for cf, (f, _) in factor_map.items():
        key = cover.local_assignment(cf, tup)
        d = factor_counts[f]
        d[key] = d.get(key, 0) + 1
    edge_counts: dict = {e: {} for e in base.alphabet_sizes}
    for ce, (e, _) in edge_map.items():
        sym = tup[cover.edge_index(ce)]
        d = edge_counts[e]
        d[sym] = d.get(sym, 0) + 1
    return PseudoMarginals(
        {f: {k: Fraction(n, m) for k, n in d.items()} for f, d in factor_counts.items()},
        {e: {s: Fraction(n, m) for s, n in d.items()} for e, d in edge_counts.items()},
    )


# -- pre-image counting -------------------------------------------------------


class PreimageCensus:
    """Tally of phi pre-image counts over every M-cover of a base graph.

    One sweep enumerates all covers and all their valid configurations;
    the tally then answers exact pre-image queries for any beta.
    """

    def __init__(self, nfg: Nfg, m: int, cap=None, config_cap=None):
        self.nfg = nfg
        self.m = m
        self.n_covers = count_covers(nfg, m)
        limit = cover_cap(cap)
        if self.n_covers > limit:
            raise CapExceeded(f"{self.n_covers} covers exceed cap {limit}")
        self._tally: dict = {}
        self._betas: dict = {}
        self.total_valid = 0
        for spec in enumerate_covers(nfg, m, cap=cap):
            cover, (factor_map, edge_map) = build_cover_with_map(spec)
            for tup, _ in valid_tuples(cover, cap=config_cap):
                beta = _phi_of_tuple(nfg, m, cover, factor_map, edge_map, tup)
                key = beta.canonical_key()
                self._tally[key] = self._tally.get(key, 0) + 1
                self._betas.setdefault(key, beta)
                self.total_valid += 1

    def count(self, beta: PseudoMarginals) -> Fraction:
        return Fraction(self._tally.get(beta.canonical_key(), 0), self.n_covers)

    def realizable(self) -> set:
        return set(self._betas.values())


def preimage_count_bruteforce(nfg: Nfg, m: int, beta: PseudoMarginals, cap=None, config_cap=None) -> Fraction:
    """Average pre-image count of beta over all M-covers, by full sweep."""
    check_shape(nfg, beta)
    return PreimageCensus(nfg, m, cap=cap, config_cap=config_cap).count(beta)


def lift_realizable_set(nfg: Nfg, m: int, cap=None, config_cap=None) -> set:
    """The image of the degree-M frequency map, deduplicated exactly."""
    return PreimageCensus(nfg, m, cap=cap, config_cap=config_cap).realizable()


def _require_integral(beta: PseudoMarginals, m: int):
    for d in itertools.chain(beta.factor_dists.values(), beta.edge_dists.values()):
        for v in d.values():
            fv = Fraction(v)
            if (fv * m).denominator != 1:
                raise NonIntegralType(f"M * beta not integral: {v} at M={m}")


def check_exact_consistency(nfg: Nfg, beta: PseudoMarginals):
    for f in sorted(nfg.factors):
        fac = nfg.factors[f]
        total = sum(beta.factor_dists[f].values(), Fraction(0))
        if total != 1:
            raise InconsistentBeta(f"factor {f}: weights sum to {total}")
        for pos, e in enumerate(fac.edges):
            for sym in range(nfg.alphabet_sizes[e]):
                marg = sum(
                    (v for k, v in beta.factor_dists[f].items() if k[pos] == sym),
                    Fraction(0),
                )
                if marg != Fraction(beta.edge_weight(e, sym)):
                    raise InconsistentBeta(
                        f"edge consistency fails at ({f}, {e}, {sym})"
                    )
    for e in nfg.alphabet_sizes:
        total = sum(beta.edge_dists[e].values(), Fraction(0))
        if total != 1:
            raise InconsistentBeta(f"edge {e}: weights sum to {total}")


def _multinomial(m: int, counts) -> int:
    n = math.factorial(m)
    for c in counts:
        n //= math.factorial(c)
    return n


def preimage_count_closedform(nfg: Nfg, m: int, beta: PseudoMarginals) -> Fraction:
    """Average pre-image count as a ratio of exact multinomials.

    Numerator: one multinomial per factor; denominator: one per full edge.
    Returns 0 when a factor block puts weight outside the factor's support.
    """
    check_shape(nfg, beta)
    _require_integral(beta, m)
    check_exact_consistency(nfg, beta)
    for f, d in beta.factor_dists.items():
        table = nfg.factors[f].table
        for key in d:
            if key not in table:
                return Fraction(0)
    num = 1
    for f in nfg.factors:
        counts = [int(Fraction(v) * m) for v in beta.factor_dists[f].values()]
        num *= _multinomial(m, counts)
    den = 1
    for e in nfg.full_edges:
        counts = [int(Fraction(v) * m) for v in beta.edge_dists[e].values()]
        den *= _multinomial(m, counts)
    return Fraction(num, den)


def entropy_rate_estimate(nfg: Nfg, beta: PseudoMarginals, m: int) -> float:
    """(1/M) log of the closed-form pre-image count, in log-gamma arithmetic.

    Feasible for M up to about 10^6; requires M to be a multiple of beta's
    denominator.
    """
    check_shape(nfg, beta)
    _require_integral(beta, m)
    check_exact_consistency(nfg, beta)
    for f, d in beta.factor_dists.items():
        table = nfg.factors[f].table
        if any(key not in table for key in d):
            return float("-inf")

    def log_multinomial(counts):
        return math.lgamma(m + 1) - sum(math.lgamma(c + 1) for c in counts)

    total = 0.0
    for f in nfg.factors:
        total += log_multinomial([int(Fraction(v) * m) for v in beta.factor_dists[f].values()])
    for e in nfg.full_edges:
        total -= log_multinomial([int(Fraction(v) * m) for v in beta.edge_dists[e].values()])
    return total / m


# -- spec serialization -------------------------------------------------------


def emit_cover_spec(spec: CoverSpec) -> str:
    lines = [f"cover M={spec.m}"]
    for e in sorted(spec.perms):
        images = " ".join(str(x + 1) for x in spec.perms[e])
        lines.append(f"perm {e} {images}")
    return "\n".join(lines) + "\n"


def parse_cover_spec(nfg: Nfg, text: str) -> CoverSpec:
    m = None
    perms = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "cover":
            if len(parts) != 2 or not parts[1].startswith("M="):
                raise ParseError("expected 'cover M=<m>'", ln)
            m = int(parts[1][2:])
        elif parts[0] == "perm":
            if m is None:
                raise ParseError("perm before cover header", ln)
            edge = parts[1]
            images = [int(x) - 1 for x in parts[2:]]
            if len(images) != m:
                raise ParseError(f"perm {edge}: expected {m} images", ln)
            perms[edge] = tuple(images)
        else:
            raise ParseError(f"unknown keyword {parts[0]!r}", ln)
    if m is None:
        raise ParseError("missing cover header")
    try:
        return CoverSpec(nfg, m, perms)
    except ShapeMismatch as exc:
        raise ParseError(str(exc)) from None
