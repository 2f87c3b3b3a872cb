"""Built-in scenarios: bond-percolation grids, coin families, a zero-atom square.

Grid edges are numbered deterministically by :func:`ladder`; coordinate
value 1 means the edge is open.  Coin-type
alphabets use symbol 0 for heads, 1 for tails and 2 for the third side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from .space import Alphabet, Event, ProductSpace

__all__ = [
    "Scenario",
    "GENERATORS",
    "generator",
    "ladder",
    "crossing_event",
    "grid2x3",
    "grid13",
    "coin",
    "threesided",
    "zeroatom",
]


@dataclass
class Scenario:
    """A space, its named events and free-form notes for reports."""

    name: str
    space: ProductSpace
    events: dict[str, Event]
    notes: dict = field(default_factory=dict)
    thresholds: dict[str, Fraction] = field(default_factory=dict)

    @property
    def A(self) -> Event:
        return self.events["A"]

    @property
    def B(self) -> Event:
        return self.events["B"]


def ladder(columns: int) -> tuple[list[tuple[str, str]], dict[str, str]]:
    """Edges of a 2-row ladder with ``columns`` vertices per row.

    Vertices are ``t0..t{c-1}`` (top) and ``b0..b{c-1}`` (bottom).  Edges are
    numbered top row left to right, bottom row left to right, then the
    rungs left to right.  Returns the edge list and the corner names
    ``a`` (top left), ``b`` (bottom left), ``c`` (top right), ``d`` (bottom right).
    """
    top = [(f"t{j}", f"t{j + 1}") for j in range(columns - 1)]
    bottom = [(f"b{j}", f"b{j + 1}") for j in range(columns - 1)]
    rungs = [(f"t{j}", f"b{j}") for j in range(columns)]
    last = columns - 1
    corners = {"a": "t0", "b": "b0", "c": f"t{last}", "d": f"b{last}"}
    return top + bottom + rungs, corners


def crossing_event(space: ProductSpace, edges, sources, sinks) -> Event:
    """Outcomes with an open path from any source vertex to any sink vertex.

    Built as the union over every simple source-to-sink edge path of the
    event that all of the path's edges are open.
    """
    graph = nx.MultiGraph()
    for k, (u, v) in enumerate(edges):
        graph.add_edge(u, v, key=k)
    bits = np.zeros(space.outcome_count, dtype=bool)
    open_edge = [space.coordinate(k) == 1 for k in range(len(edges))]
    for s in sources:
        for t in sinks:
            if s == t:
                continue
            for path in nx.all_simple_edge_paths(graph, s, t):
                ok = np.ones(space.outcome_count, dtype=bool)
                for _, _, k in path:
                    ok &= open_edge[k]
                bits |= ok
    return Event(space, bits)


def _bond_space(edge_count: int) -> ProductSpace:
    return ProductSpace(Alphabet.uniform(2, ("0", "1")) for _ in range(edge_count))


def grid2x3() -> Scenario:
    """The 7-edge ladder: ``A`` joins a to c, ``B`` joins b to d."""
    edges, corner = ladder(3)
    space = _bond_space(len(edges))
    A = crossing_event(space, edges, [corner["a"]], [corner["c"]])
    B = crossing_event(space, edges, [corner["b"]], [corner["d"]])
    return Scenario("grid2x3", space, {"A": A, "B": B},
                    {"edges": [f"{u}-{v}" for u, v in edges], "open_symbol": 1})


def grid13(with_closed=True, exactly_open=(3,)) -> Scenario:
    """The 13-edge ladder: ``A`` is a left-right crossing, together with the
    all-closed outcome and every outcome with exactly 3 open edges.
    ``crossing`` is kept as a separate event.
    """
    edges, corner = ladder(5)
    space = _bond_space(len(edges))
    left, right = [corner["a"], corner["b"]], [corner["c"], corner["d"]]
    cross = crossing_event(space, edges, left, right)
    opened = sum(space.coordinate(k) for k in range(len(edges)))
    extra = np.isin(opened, list(exactly_open))
    if with_closed:
        extra |= opened == 0
    A = Event(space, cross.bits | extra)
    notes = {"edges": [f"{u}-{v}" for u, v in edges], "open_symbol": 1}
    if with_closed and tuple(exactly_open) == (3,):
        # published value, assuming core(A) is exactly the crossing event
        notes["claimed_gap"] = "287/8192"
    return Scenario("grid13", space, {"A": A, "crossing": cross}, notes)


def coin(m: int = 1) -> Scenario:
    """``2m+1`` fair tosses; ``A``: first ``m+1`` heads, ``B``: last ``m+1`` tails."""
    if m < 1:
        raise ValueError("coin needs m >= 1")
    n = 2 * m + 1
    space = ProductSpace.coins(n)
    heads = np.ones(space.outcome_count, dtype=bool)
    for i in range(m + 1):
        heads &= space.coordinate(i) == 0
    tails = np.ones(space.outcome_count, dtype=bool)
    for i in range(m, n):
        tails &= space.coordinate(i) == 1
    half = Fraction(1, 2)
    return Scenario(f"coin({m})", space, {"A": Event(space, heads), "B": Event(space, tails)},
                    {"m": m}, {"s": half, "t": half})


def threesided() -> Scenario:
    """Five tosses of a fair H/T/S coin; ``A``: first three H, ``B``: last three T."""
    space = ProductSpace(Alphabet.uniform(3, ("H", "T", "S")) for _ in range(5))
    A = space.event_where(lambda x: x[:3] == (0, 0, 0))
    B = space.event_where(lambda x: x[2:] == (1, 1, 1))
    third = Fraction(1, 3)
    return Scenario("threesided", space, {"A": A, "B": B}, {}, {"s": third, "t": third})


def zeroatom() -> Scenario:
    """Two coordinates on {0, 1, 2} with weights (1/2, 1/2, 0); ``A = B = {x_0 != x_1}``."""
    half = Fraction(1, 2)
    space = ProductSpace([Alphabet((half, half, Fraction(0)))] * 2)
    A = space.event_where(lambda x: x[0] != x[1])
    return Scenario("zeroatom", space, {"A": A, "B": A})


GENERATORS = {
    "grid2x3": grid2x3,
    "grid13": grid13,
    "coin": coin,
    "threesided": threesided,
    "zeroatom": zeroatom,
}


def generator(name: str, **params) -> Scenario:
    """Build a named scenario; ``coin`` takes ``m``."""
    try:
        build = GENERATORS[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(GENERATORS)}") from None
    return build(**params)
