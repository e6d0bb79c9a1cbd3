"""Phase 2: orient the EMSG edges.

Edges are swept node by node (nodes ranked by the total pair score on their
incident edges) and, within a node, by the column order of the other endpoint.
Three criteria are tried in turn: collider evidence from the triple labels,
a strict BIC preference, and how many extra nodes an intervention on the
tail would reach through the edge. An orientation that closes a directed cycle is
flipped on the spot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .budget import NEVER, Deadline
from .data import Dataset
from .graph import Dag, GraphError, MixedGraph
from .mmd import Label, MmdTable
from .score import ScoreContext, same_score


@dataclass
class OrientationState:
    graph: MixedGraph
    node_order: list[str]
    trace: list[tuple[str, str, str]] = field(default_factory=list)

    def undirected_queue(self) -> list[tuple[str, str]]:
        return list(sweep(self))


def order_nodes(emsg: MixedGraph, table: MmdTable) -> list[str]:
    totals = {
        v: sum(table.pair(v, w) for w in emsg.neighbours(v)) for v in emsg.nodes
    }
    return sorted(emsg.nodes, key=lambda v: (-totals[v], emsg.position(v)))


def sweep(state: OrientationState) -> Iterator[tuple[str, str]]:
    """Yield (x, w) for every edge still undirected when its turn comes."""
    g = state.graph
    for x in state.node_order:
        for w in g.nodes:
            if w != x and g.has_undirected(x, w):
                yield x, w


def _set_direction(state: OrientationState, x: str, w: str, criterion: str) -> bool:
    """Orient x->w, flipping to w->x if that closes a cycle.

    If both directions close a cycle the edge goes back to undirected.
    """
    g = state.graph
    g.orient(x, w)
    if g.is_acyclic():
        state.trace.append((x, w, criterion))
        return True
    g.orient(w, x)
    if g.is_acyclic():
        state.trace.append((w, x, "CYCLE-REVERSE"))
        return True
    g.unorient(x, w)
    return False


def collider_witness(g: MixedGraph, table: MmdTable, x: str, w: str) -> str | None:
    """A neighbour y of w such that conditioning on w makes x and y dependent."""
    for y in g.nodes:
        if y in (x, w) or not g.adjacent(y, w):
            continue
        label = table.label(x, y, w)
        if label is Label.CD:
            return y
    return None


def orient_by_ci(state: OrientationState, table: MmdTable, deadline: Deadline = NEVER) -> int:
    oriented = 0
    for x, w in sweep(state):
        if deadline.expired():
            break
        if collider_witness(state.graph, table, x, w) is not None:
            oriented += _set_direction(state, x, w, "CI")
    return oriented


def _bic_with(ctx: ScoreContext, g: MixedGraph, parent: str, child: str) -> float:
    sets = ctx.parent_sets(g)
    i = ctx.data.index(child)
    sets[i] = sets[i] | {ctx.data.index(parent)}
    return ctx.total(sets)


def orient_by_bic(state: OrientationState, ctx: ScoreContext, deadline: Deadline = NEVER) -> int:
    oriented = 0
    g = state.graph
    for x, w in sweep(state):
        if deadline.expired():
            break
        forward = _bic_with(ctx, g, x, w)
        backward = _bic_with(ctx, g, w, x)
        if same_score(forward, backward):
            continue
        if forward > backward:
            oriented += _set_direction(state, x, w, "BIC")
        else:
            oriented += _set_direction(state, w, x, "BIC")
    return oriented


def _reach(g: MixedGraph, parent: str, child: str) -> int:
    """Nodes that intervening on ``parent`` newly reaches through parent->child.

    Total descendant counts tie for both directions whenever neither closes a
    cycle, so only the gain is compared.
    """
    before = g.descendants(parent)
    trial = g.copy()
    trial.orient(parent, child)
    return len(trial.descendants(parent) - before)


def orient_by_do(state: OrientationState, deadline: Deadline = NEVER) -> int:
    oriented = 0
    g = state.graph
    for x, w in sweep(state):
        if deadline.expired():
            break
        forward, backward = _reach(g, x, w), _reach(g, w, x)
        if forward > backward:
            oriented += _set_direction(state, x, w, "DO")
        elif backward > forward:
            oriented += _set_direction(state, w, x, "DO")
    return oriented


def force_orient(state: OrientationState) -> int:
    """Orient every remaining undirected edge from the earlier node in
    node_order to the later one."""
    rank = {v: i for i, v in enumerate(state.node_order)}
    oriented = 0
    for a, b in state.graph.undirected_edges:
        x, w = (a, b) if rank[a] < rank[b] else (b, a)
        if not _set_direction(state, x, w, "FALLBACK"):
            raise GraphError(f"cannot orient {a}--{b} without a cycle")
        oriented += 1
    return oriented


def run_phase2(
    emsg: MixedGraph,
    table: MmdTable,
    d: Dataset,
    ctx: ScoreContext | None = None,
    deadline: Deadline = NEVER,
) -> tuple[Dag, OrientationState]:
    ctx = ctx or ScoreContext(d)
    state = OrientationState(emsg.copy(), order_nodes(emsg, table))
    orient_by_ci(state, table, deadline)
    while state.graph.undirected_edges and not deadline.expired():
        progress = orient_by_bic(state, ctx, deadline)
        progress += orient_by_do(state, deadline)
        if not progress:
            break
    force_orient(state)
    if state.graph.adjacencies() != emsg.adjacencies():
        raise GraphError("orientation changed the skeleton")
    return Dag.from_mixed(state.graph), state
