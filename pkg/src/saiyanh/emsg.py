"""Phase 1: the extended maximum spanning graph (EMSG).

Starting from the complete undirected graph, edges are visited from the
weakest pair score to the strongest. An edge A-B is dropped when A and B
currently share a neighbour C with both MMD(A,C) and MMD(B,C) strictly above
MMD(A,B). Every removal leaves the 2-path A-C-B behind, so the result stays
connected.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

from .budget import NEVER, Deadline
from .graph import MixedGraph
from .mmd import MmdTable


def removal_order(table: MmdTable, nodes: Sequence[str]) -> list[tuple[str, str]]:
    """Pairs by ascending score, equal scores by name.

    Ties only decide the order removals are reported in: whether an edge goes
    depends on strictly stronger edges alone.
    """
    pairs = combinations(nodes, 2)
    return sorted(pairs, key=lambda p: (table.pair(*p), sorted(p)))


def dominated(g: MixedGraph, table: MmdTable, a: str, b: str) -> bool:
    """True if some current common neighbour of a and b beats the a-b score."""
    s = table.pair(a, b)
    for c in g.nodes:
        if c in (a, b) or not (g.adjacent(a, c) and g.adjacent(b, c)):
            continue
        if table.pair(a, c) > s < table.pair(b, c):
            return True
    return False


def removal_pass(
    g: MixedGraph, table: MmdTable, deadline: Deadline = NEVER
) -> list[tuple[str, str]]:
    """Run one ascending sweep over ``g`` in place; return the removed pairs."""
    removed = []
    for a, b in removal_order(table, g.nodes):
        if deadline.expired():
            break
        if g.adjacent(a, b) and dominated(g, table, a, b):
            g.remove(a, b)
            removed.append((a, b))
    return removed


def build_emsg(table: MmdTable, nodes: Sequence[str], deadline: Deadline = NEVER) -> MixedGraph:
    g = MixedGraph(nodes, undirected=combinations(nodes, 2))
    removal_pass(g, table, deadline)
    return g


def edge_scores(g: MixedGraph, table: MmdTable) -> dict[tuple[str, str], float]:
    return {(a, b): table.pair(a, b) for a, b in g.undirected_edges}
