"""Normal factor graph data model and its line-oriented text format.

Variables live on edges: a half-edge is incident on exactly one function
node, a full edge on exactly two.  Local function tables keep only their
support (assignments with value zero are dropped), so a factor's support
doubles as its local constraint code.  All types here are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import GcbError, OutOfAlphabet, ParseError, UnknownEdge

Number = object  # Fraction or float; kept duck-typed on purpose

DEFAULT_CONFIG_CAP = 1 << 26


def parity_table(arity: int) -> dict:
    """0/1 indicator of the even-weight (single parity-check) code."""
    table = {}
    for a in itertools.product((0, 1), repeat=arity):
        if sum(a) % 2 == 0:
            table[a] = Fraction(1)
    return table


def repetition_table(arity: int) -> dict:
    """0/1 indicator of the all-equal (repetition) code over {0,1}."""
    return {(0,) * arity: Fraction(1), (1,) * arity: Fraction(1)}


class Factor:
    """A function node: ordered incident edges plus the support of its table."""

    __slots__ = ("id", "edges", "table")

    def __init__(self, fid: str, edges: Sequence[str], table: Mapping[tuple, Number]):
        self.id = fid
        self.edges = tuple(edges)
        support = {}
        for key, value in table.items():
            key = tuple(int(s) for s in key)
            if len(key) != len(self.edges):
                raise GcbError(
                    f"factor {fid}: assignment {key} has arity {len(key)}, "
                    f"expected {len(self.edges)}"
                )
            if isinstance(value, float):
                if value < 0 or math.isnan(value):
                    raise GcbError(f"factor {fid}: negative or NaN value at {key}")
            else:
                value = Fraction(value)
                if value < 0:
                    raise GcbError(f"factor {fid}: negative value at {key}")
            if value != 0:
                support[key] = value
        self.table = support

    def value(self, local: tuple) -> Number:
        return self.table.get(tuple(local), Fraction(0))

    @property
    def support(self):
        """Local constraint code: assignments with nonzero value, sorted."""
        return sorted(self.table)

    def is_indicator(self) -> bool:
        return all(v == 1 for v in self.table.values())


class Nfg:
    """A normal factor graph over finite edge alphabets.

    Construction validates the structural invariants: every full edge
    appears in exactly two factor incidence lists, every half-edge in
    exactly one, and every table key stays inside the Cartesian product of
    its incident alphabets.
    """

    def __init__(
        self,
        alphabet_sizes: Mapping[str, int],
        half_edges: Iterable[str],
        factors: Mapping[str, Factor] | Sequence[Factor],
        edge_labels: Mapping[str, Sequence[str]] | None = None,
    ):
        self.alphabet_sizes = dict(alphabet_sizes)
        self.half_edges = frozenset(half_edges)
        if isinstance(factors, Mapping):
            self.factors = dict(factors)
        else:
            self.factors = {f.id: f for f in factors}
        self.edge_labels = {k: tuple(v) for k, v in (edge_labels or {}).items()}

        for e, size in self.alphabet_sizes.items():
            if size < 1:
                raise GcbError(f"edge {e}: alphabet size must be >= 1")
        unknown = self.half_edges - self.alphabet_sizes.keys()
        if unknown:
            raise GcbError(f"half-edges without alphabets: {sorted(unknown)}")

        incidence: dict[str, list[str]] = {e: [] for e in self.alphabet_sizes}
        for f in self.factors.values():
            seen = set()
            for e in f.edges:
                if e not in self.alphabet_sizes:
                    raise GcbError(f"factor {f.id}: unknown edge {e}")
                if e in seen:
                    raise GcbError(f"factor {f.id}: edge {e} repeated")
                seen.add(e)
                incidence[e].append(f.id)
            sizes = tuple(self.alphabet_sizes[e] for e in f.edges)
            for key in f.table:
                for s, size in zip(key, sizes):
                    if not 0 <= s < size:
                        raise GcbError(
                            f"factor {f.id}: symbol {s} outside alphabet in {key}"
                        )
        for e, incident in incidence.items():
            want = 1 if e in self.half_edges else 2
            if len(incident) != want:
                kind = "half-edge" if want == 1 else "full edge"
                raise GcbError(
                    f"{kind} {e} is incident on {len(incident)} factors, expected {want}"
                )
        self.incidence = {e: tuple(sorted(v)) for e, v in incidence.items()}
        self.edge_order = tuple(sorted(self.alphabet_sizes))
        self._edge_index = {e: i for i, e in enumerate(self.edge_order)}

    # -- basic structure ----------------------------------------------------

    @property
    def full_edges(self) -> frozenset:
        return frozenset(self.alphabet_sizes) - self.half_edges

    @property
    def half_edge_order(self) -> tuple:
        return tuple(e for e in self.edge_order if e in self.half_edges)

    @property
    def full_edge_order(self) -> tuple:
        return tuple(e for e in self.edge_order if e not in self.half_edges)

    def configuration_space_size(self) -> int:
        n = 1
        for size in self.alphabet_sizes.values():
            n *= size
        return n

    def endpoints(self, edge: str) -> tuple:
        """Incident factor ids; one entry for a half-edge, two for a full edge."""
        return self.incidence[edge]

    def n_components(self) -> int:
        """Connected components of the underlying graph (isolated factors count)."""
        parent = {f: f for f in self.factors}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.full_edges:
            a, b = self.incidence[e]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        return len({find(f) for f in parent})

    def circuit_rank(self) -> int:
        return len(self.alphabet_sizes) - len(self.half_edges) - len(self.factors) + self.n_components()

    # -- configurations -----------------------------------------------------

    def config_tuple(self, config: Mapping[str, int]) -> tuple:
        """Canonical tuple form of a configuration, symbols in edge-id-sorted order."""
        missing = self.alphabet_sizes.keys() - config.keys()
        if missing:
            raise UnknownEdge(f"configuration misses edges {sorted(missing)}")
        extra = config.keys() - self.alphabet_sizes.keys()
        if extra:
            raise UnknownEdge(f"configuration has unknown edges {sorted(extra)}")
        out = []
        for e in self.edge_order:
            s = config[e]
            if not 0 <= s < self.alphabet_sizes[e]:
                raise OutOfAlphabet(f"edge {e}: symbol {s} outside alphabet")
            out.append(int(s))
        return tuple(out)

    def config_dict(self, config: Sequence[int]) -> dict:
        if len(config) != len(self.edge_order):
            raise UnknownEdge(
                f"expected {len(self.edge_order)} symbols, got {len(config)}"
            )
        return dict(zip(self.edge_order, config))

    def local_assignment(self, factor_id: str, config: Sequence[int]) -> tuple:
        """Restriction of a canonical configuration tuple to a factor's edges."""
        f = self.factors[factor_id]
        return tuple(config[self._edge_index[e]] for e in f.edges)

    def edge_index(self, edge: str) -> int:
        return self._edge_index[edge]


# -- text format -------------------------------------------------------------
#
#   alphabet <edge> <size>
#   halfedge <edge>
#   fulledge <edge> <factorA> <factorB>
#   factor <id> <edges...>
#   row <assignment...> <value>        (rows of the preceding factor)
#   parity | repetition                (0/1 indicator shorthands)
#
# Values are decimals or p/q rationals.  '#' starts a comment.


def parse_number(token: str) -> Number:
    if "/" in token:
        num, den = token.split("/", 1)
        return Fraction(int(num), int(den))
    if any(c in token for c in ".eE") and not token.lstrip("+-").isdigit():
        return float(token)
    return Fraction(int(token))


def format_number(value: Number) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)
    return repr(float(value))


def parse_nfg_text(text: str) -> Nfg:
    alphabet_sizes: dict[str, int] = {}
    half_edges: list[str] = []
    full_decl: dict[str, tuple] = {}
    factor_edges: dict[str, list[str]] = {}
    factor_rows: dict[str, dict] = {}
    factor_kind: dict[str, str] = {}
    current: str | None = None

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        try:
            if kw == "alphabet":
                edge, size = parts[1], int(parts[2])
                alphabet_sizes[edge] = size
            elif kw == "halfedge":
                half_edges.append(parts[1])
            elif kw == "fulledge":
                full_decl[parts[1]] = (parts[2], parts[3])
            elif kw == "factor":
                current = parts[1]
                if current in factor_edges:
                    raise ParseError(f"factor {current} declared twice", ln)
                factor_edges[current] = parts[2:]
                factor_rows[current] = {}
                factor_kind[current] = "rows"
            elif kw == "row":
                if current is None:
                    raise ParseError("row before any factor", ln)
                *sym, val = parts[1:]
                key = tuple(int(s) for s in sym)
                factor_rows[current][key] = parse_number(val)
            elif kw in ("parity", "repetition"):
                if current is None:
                    raise ParseError(f"{kw} before any factor", ln)
                factor_kind[current] = kw
            else:
                raise ParseError(f"unknown keyword {kw!r}", ln)
        except ParseError:
            raise
        except (IndexError, ValueError) as exc:
            raise ParseError(f"cannot parse {line!r}: {exc}", ln) from None

    if not factor_edges:
        raise ParseError("no factors declared")
    for edge in half_edges:
        if edge not in alphabet_sizes:
            raise ParseError(f"half-edge {edge} has no alphabet")
    factors = []
    for fid, edges in factor_edges.items():
        kind = factor_kind[fid]
        if kind == "parity":
            table = parity_table(len(edges))
        elif kind == "repetition":
            table = repetition_table(len(edges))
        else:
            table = factor_rows[fid]
            if not table:
                raise ParseError(f"factor {fid} has no rows")
        factors.append(Factor(fid, edges, table))

    for edge, (fa, fb) in full_decl.items():
        for fid in (fa, fb):
            if fid not in factor_edges or edge not in factor_edges[fid]:
                raise ParseError(f"fulledge {edge}: factor {fid} does not carry it")

    try:
        return Nfg(alphabet_sizes, half_edges, factors)
    except GcbError as exc:
        raise ParseError(str(exc)) from None


def parse_nfg(path) -> Nfg:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_nfg_text(fh.read())


def emit_nfg_text(nfg: Nfg) -> str:
    lines = []
    for e in nfg.edge_order:
        lines.append(f"alphabet {e} {nfg.alphabet_sizes[e]}")
    for e in nfg.edge_order:
        if e in nfg.half_edges:
            lines.append(f"halfedge {e}")
        else:
            fa, fb = nfg.incidence[e]
            lines.append(f"fulledge {e} {fa} {fb}")
    for fid in sorted(nfg.factors):
        f = nfg.factors[fid]
        lines.append(f"factor {fid} {' '.join(f.edges)}")
        arity = len(f.edges)
        if f.table == parity_table(arity):
            lines.append("parity")
        elif f.table == repetition_table(arity):
            lines.append("repetition")
        else:
            for key in sorted(f.table):
                sym = " ".join(str(s) for s in key)
                lines.append(f"row {sym} {format_number(f.table[key])}")
    return "\n".join(lines) + "\n"
