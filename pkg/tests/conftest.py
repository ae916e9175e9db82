import itertools
import os
import sys
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from gcb.covers import PseudoMarginals
from gcb.nfg import Factor, Nfg, parity_table


HALF = Fraction(1, 2)

# Valid configurations of the five-parity-factor graph, edge order e1..e8.
FIG1_CONFIGS = [
    (0, 0, 0, 0, 0, 0, 0, 0),
    (0, 1, 0, 0, 1, 1, 0, 0),
    (0, 0, 1, 0, 0, 1, 1, 1),
    (0, 1, 1, 0, 1, 0, 1, 1),
    (1, 0, 0, 1, 1, 0, 1, 1),
    (1, 1, 0, 1, 0, 1, 1, 1),
    (1, 0, 1, 1, 1, 1, 0, 0),
    (1, 1, 1, 1, 0, 0, 0, 0),
]


def make_fig1() -> Nfg:
    factors = [
        Factor("f1", ("e1", "e2", "e5"), parity_table(3)),
        Factor("f2", ("e2", "e3", "e6"), parity_table(3)),
        Factor("f3", ("e3", "e4", "e7"), parity_table(3)),
        Factor("f4", ("e5", "e6", "e8"), parity_table(3)),
        Factor("f5", ("e7", "e8"), parity_table(2)),
    ]
    return Nfg({f"e{i}": 2 for i in range(1, 9)}, ["e1", "e4"], factors)


def make_dumbbell() -> Nfg:
    factors = [
        Factor("fA", ("e1", "e3"), parity_table(2)),
        Factor("fB", ("e1", "e2"), parity_table(2)),
        Factor("fC", ("e2", "e3", "e7"), parity_table(3)),
        Factor("fD", ("e4", "e6", "e7"), parity_table(3)),
        Factor("fE", ("e4", "e5"), parity_table(2)),
        Factor("fF", ("e5", "e6"), parity_table(2)),
    ]
    return Nfg({f"e{i}": 2 for i in range(1, 8)}, [], factors)


def fig5_beta() -> PseudoMarginals:
    """The degree-2 lift-realizable vector exhibited on the twisted 2-cover."""
    factor_dists = {
        "f1": {(0, 0, 0): 1},
        "f2": {(0, 0, 0): HALF, (0, 1, 1): HALF},
        "f3": {(0, 1, 1): HALF, (1, 1, 0): HALF},
        "f4": {(0, 0, 0): HALF, (0, 1, 1): HALF},
        "f5": {(0, 0): HALF, (1, 1): HALF},
    }
    ones = {"e1": 0, "e2": 0, "e3": HALF, "e4": 1, "e5": 0, "e6": HALF, "e7": HALF, "e8": HALF}
    edge_dists = {e: {0: 1 - w, 1: w} for e, w in ones.items()}
    return PseudoMarginals(factor_dists, edge_dists)


def random_table(rng, arity, low=0.3, high=1.7):
    return {
        key: float(rng.uniform(low, high))
        for key in itertools.product((0, 1), repeat=arity)
    }


def make_random_tree(rng, n_internal=3) -> Nfg:
    """Random positive-table tree: a chain of internal factors with leaf half-edges."""
    sizes = {}
    half = []
    factors = []
    prev_link = None
    for i in range(n_internal):
        edges = []
        if prev_link is not None:
            edges.append(prev_link)
        leaf = f"h{i}"
        sizes[leaf] = 2
        half.append(leaf)
        edges.append(leaf)
        if i < n_internal - 1:
            link = f"t{i}"
            sizes[link] = 2
            edges.append(link)
            prev_link = link
        factors.append(Factor(f"g{i}", tuple(edges), random_table(rng, len(edges))))
    return Nfg(sizes, half, factors)


def make_loopy_positive(rng) -> Nfg:
    """Strictly positive tables on the fig1 topology."""
    factors = [
        Factor("f1", ("e1", "e2", "e5"), random_table(rng, 3, 0.5, 1.5)),
        Factor("f2", ("e2", "e3", "e6"), random_table(rng, 3, 0.5, 1.5)),
        Factor("f3", ("e3", "e4", "e7"), random_table(rng, 3, 0.5, 1.5)),
        Factor("f4", ("e5", "e6", "e8"), random_table(rng, 3, 0.5, 1.5)),
        Factor("f5", ("e7", "e8"), random_table(rng, 2, 0.5, 1.5)),
    ]
    return Nfg({f"e{i}": 2 for i in range(1, 9)}, ["e1", "e4"], factors)


EXAMPLE3_ROWS = [
    [0, 0, 1, 1, 1, 0, 1, 1, 1, 0],
    [0, 1, 1, 1, 0, 1, 0, 0, 1, 1],
    [1, 1, 1, 0, 0, 1, 1, 1, 0, 0],
    [1, 0, 0, 1, 1, 0, 0, 1, 1, 1],
    [1, 1, 0, 0, 1, 1, 1, 0, 0, 1],
]


@pytest.fixture
def fig1():
    return make_fig1()


@pytest.fixture
def dumbbell():
    return make_dumbbell()
