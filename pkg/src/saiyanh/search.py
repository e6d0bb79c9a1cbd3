"""Phase 3: hill climbing plus single-depth Tabu escapes over connected DAGs.

Graphs are handled internally as a tuple of parent sets (column indices), one
per node, so that scoring a neighbour only touches the cached family terms.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .budget import NEVER, Deadline
from .graph import Dag, Move
from .mmd import DEPENDENCE_FLOOR, Label, MmdTable
from .score import ScoreContext, improves

ADD, REMOVE, REVERSE = "add", "remove", "reverse"

ParentSets = tuple  # tuple[frozenset[int], ...]


@dataclass(frozen=True)
class MoveConstraints:
    """Pairs on which an arc may not be added, plus the connectivity flag."""

    forbidden_pairs: frozenset = frozenset()
    mmd_floor: float = DEPENDENCE_FLOOR
    connectivity_required: bool = True

    def allows_add(self, a: str, b: str) -> bool:
        return frozenset((a, b)) not in self.forbidden_pairs


def build_constraints(table: MmdTable, floor: float = DEPENDENCE_FLOOR) -> MoveConstraints:
    """Forbid adds on weak pairs and on pairs labelled CI given any third node."""
    forbidden = {frozenset(p) for p, s in table.pair_score.items() if s < floor}
    for (pair, _), label in table.labels.items():
        if label is Label.CI:
            forbidden.add(frozenset(pair))
    return MoveConstraints(frozenset(forbidden), floor)


@dataclass
class TabuState:
    visited: set = field(default_factory=set)
    escapes: int = 0
    cap: int = 0


@dataclass
class SearchResult:
    dag: Dag
    bic: float
    partial: bool = False
    trace: list[tuple[int, str, float, int]] = field(default_factory=list)
    tabu: TabuState | None = None

    def write_trace(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["step", "move", "bic", "components"])
            for row in self.trace:
                w.writerow([row[0], row[1], repr(row[2]), row[3]])


def escape_cap(num_nodes: int) -> int:
    return num_nodes * (num_nodes - 1)


class Search:
    """Neighbourhood, scoring and the two search procedures for one dataset."""

    def __init__(
        self,
        ctx: ScoreContext,
        constraints: MoveConstraints = MoveConstraints(),
        deadline: Deadline = NEVER,
    ):
        self.ctx = ctx
        self.names = ctx.data.names
        self.size = len(self.names)
        self.constraints = constraints
        self.deadline = deadline
        idx = {n: i for i, n in enumerate(self.names)}
        self._forbidden = {
            frozenset(idx[n] for n in pair) for pair in constraints.forbidden_pairs
        }
        self.trace: list[tuple[int, str, float, int]] = []

    # --- conversions -------------------------------------------------------

    def encode(self, g: Dag) -> ParentSets:
        return tuple(self.ctx.parent_sets(g))

    def decode(self, ps: ParentSets) -> Dag:
        edges = [(self.names[p], self.names[c]) for c, s in enumerate(ps) for p in sorted(s)]
        return Dag(self.names, edges)

    def move_label(self, m: tuple[str, int, int]) -> Move:
        return Move(m[0], self.names[m[1]], self.names[m[2]])

    # --- structure ---------------------------------------------------------

    def _children(self, ps: ParentSets) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in range(self.size)]
        for c, s in enumerate(ps):
            for p in s:
                ch[p].append(c)
        return ch

    @staticmethod
    def _reaches(children, src: int, dst: int, skip: tuple[int, int] | None = None) -> bool:
        stack, seen = [src], {src}
        while stack:
            u = stack.pop()
            for w in children[u]:
                if (u, w) == skip:
                    continue
                if w == dst:
                    return True
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    def _is_bridge(self, ps: ParentSets, u: int, v: int) -> bool:
        adj: list[set[int]] = [set() for _ in range(self.size)]
        for c, s in enumerate(ps):
            for p in s:
                if (p, c) != (u, v):
                    adj[p].add(c)
                    adj[c].add(p)
        stack, seen = [u], {u}
        while stack:
            for w in adj[stack.pop()]:
                if w == v:
                    return False
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return True

    def components(self, ps: ParentSets) -> int:
        parent = list(range(self.size))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for c, s in enumerate(ps):
            for p in s:
                parent[find(p)] = find(c)
        return len({find(x) for x in range(self.size)})

    def is_acyclic(self, ps: ParentSets) -> bool:
        children = self._children(ps)
        indeg = [len(s) for s in ps]
        queue = [i for i in range(self.size) if indeg[i] == 0]
        seen = 0
        while queue:
            u = queue.pop()
            seen += 1
            for w in children[u]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        return seen == self.size

    # --- neighbourhood -------------------------------------------------------

    def moves(self, ps: ParentSets) -> list[tuple[str, int, int]]:
        """Legal moves in scan order: adds, removals, reversals; each over
        ordered (parent, child) pairs in column order."""
        children = self._children(ps)
        n = self.size
        adds, removes, reverses = [], [], []
        for u in range(n):
            for v in range(n):
                if u == v:
                    continue
                if u in ps[v]:
                    if not (self.constraints.connectivity_required and self._is_bridge(ps, u, v)):
                        removes.append((REMOVE, u, v))
                    if not self._reaches(children, u, v, skip=(u, v)):
                        reverses.append((REVERSE, u, v))
                elif v not in ps[u]:
                    if frozenset((u, v)) in self._forbidden:
                        continue
                    if not self._reaches(children, v, u):
                        adds.append((ADD, u, v))
        return adds + removes + reverses

    @staticmethod
    def apply(ps: ParentSets, m: tuple[str, int, int]) -> ParentSets:
        kind, u, v = m
        out = list(ps)
        if kind == ADD:
            out[v] = ps[v] | {u}
        elif kind == REMOVE:
            out[v] = ps[v] - {u}
        else:
            out[v] = ps[v] - {u}
            out[u] = ps[u] | {v}
        return tuple(out)

    def score(self, ps: ParentSets) -> float:
        return self.ctx.total(ps)

    def _record(self, label: str, ps: ParentSets, score: float) -> None:
        self.trace.append((len(self.trace) + 1, label, score, self.components(ps)))

    # --- procedures -----------------------------------------------------------

    def climb(self, ps: ParentSets) -> ParentSets:
        """First-improvement ascent; rescan from the top after every move."""
        current = self.score(ps)
        while True:
            for m in self.moves(ps):
                if self.deadline.expired():
                    return ps
                cand = self.apply(ps, m)
                s = self.score(cand)
                if improves(s, current):
                    ps, current = cand, s
                    self._record(str(self.move_label(m)), ps, s)
                    break
            else:
                return ps

    def escape(self, ps: ParentSets, state: TabuState | None = None) -> ParentSets:
        """Single-depth Tabu escapes from a hill-climbing fixed point.

        Neighbours G' are tried from the smallest score loss upward; the first
        neighbour G'' of G' that beats the current graph is taken and climbed
        from, after which the G' ranking is rebuilt. Every G' examined counts
        towards the cap of |V|(|V|-1) escape attempts.
        """
        state = state or TabuState()
        state.cap = escape_cap(self.size)
        current = self.score(ps)
        while state.escapes < state.cap:
            ranked = []
            for order, m in enumerate(self.moves(ps)):
                g1 = self.apply(ps, m)
                ranked.append((current - self.score(g1), order, m, g1))
            ranked.sort(key=lambda r: (r[0], r[1]))
            moved = False
            for _, _, m1, g1 in ranked:
                if state.escapes >= state.cap or self.deadline.expired():
                    return ps
                if g1 in state.visited:
                    continue
                state.visited.add(g1)
                state.escapes += 1
                for m2 in self.moves(g1):
                    if self.deadline.expired():
                        return ps
                    g2 = self.apply(g1, m2)
                    s2 = self.score(g2)
                    if improves(s2, current):
                        label = f"{self.move_label(m1)};{self.move_label(m2)}"
                        self._record(label, g2, s2)
                        ps = self.climb(g2)
                        current = self.score(ps)
                        moved = True
                        break
                if moved:
                    break
            if not moved:
                break
        return ps


def legal_moves(g: Dag, ctx: ScoreContext, c: MoveConstraints = MoveConstraints()) -> list[Move]:
    s = Search(ctx, c)
    return [s.move_label(m) for m in s.moves(s.encode(g))]


def hill_climb(g0: Dag, ctx: ScoreContext, c: MoveConstraints = MoveConstraints(),
               deadline: Deadline = NEVER) -> SearchResult:
    s = Search(ctx, c, deadline)
    ps = s.climb(s.encode(g0))
    return SearchResult(s.decode(ps), s.score(ps), deadline.hit, s.trace)


def tabu_escape(g: Dag, ctx: ScoreContext, c: MoveConstraints = MoveConstraints(),
                state: TabuState | None = None, deadline: Deadline = NEVER) -> SearchResult:
    s = Search(ctx, c, deadline)
    state = state or TabuState()
    ps = s.escape(s.encode(g), state)
    return SearchResult(s.decode(ps), s.score(ps), deadline.hit, s.trace, state)


def run_phase3(g_phase2: Dag, ctx: ScoreContext, table: MmdTable,
               deadline: Deadline = NEVER) -> SearchResult:
    c = build_constraints(table)
    s = Search(ctx, c, deadline)
    ps = s.encode(g_phase2)
    s._record("start", ps, s.score(ps))
    state = TabuState()
    ps = s.climb(ps)
    if not deadline.expired():
        ps = s.escape(ps, state)
    return SearchResult(s.decode(ps), s.score(ps), deadline.hit, s.trace, state)

