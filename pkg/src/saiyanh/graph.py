"""Mixed graphs (directed and undirected edges) and the DAG specialisation."""

from __future__ import annotations

import csv
import io
from collections import deque
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence


class GraphError(ValueError):
    pass


class Move(NamedTuple):
    """Add, remove or reverse the directed edge ``parent -> child``."""

    kind: str  # "add" | "remove" | "reverse"
    parent: str
    child: str

    def __str__(self):
        return f"{self.kind}({self.parent}->{self.child})"

    @classmethod
    def parse(cls, text: str) -> "Move":
        """Inverse of ``str``: ``"reverse(A->B)"`` -> Move("reverse", "A", "B")."""
        kind, _, rest = text.strip().partition("(")
        parent, arrow, child = rest.rstrip(")").partition("->")
        if kind not in ("add", "remove", "reverse") or not arrow:
            raise GraphError(f"not a move: {text!r}")
        return cls(kind, parent, child)


class MixedGraph:
    """Node-ordered graph with at most one edge, directed or not, per pair."""

    def __init__(
        self,
        nodes: Iterable[str],
        directed: Iterable[tuple[str, str]] = (),
        undirected: Iterable[tuple[str, str]] = (),
    ):
        self.nodes = tuple(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            raise GraphError("duplicate node names")
        self._pos = {n: i for i, n in enumerate(self.nodes)}
        # unordered pair -> (u, v) for u->v, or None for undirected
        self._edges: dict[frozenset, tuple[str, str] | None] = {}
        for u, v in directed:
            self._add(u, v, True)
        for u, v in undirected:
            self._add(u, v, False)

    def _check(self, *nodes):
        for n in nodes:
            if n not in self._pos:
                raise GraphError(f"unknown node {n!r}")

    def _add(self, u, v, directed):
        self._check(u, v)
        if u == v:
            raise GraphError(f"self-loop on {u!r}")
        key = frozenset((u, v))
        if key in self._edges:
            raise GraphError(f"nodes {u!r} and {v!r} are already adjacent")
        self._edges[key] = (u, v) if directed else None

    # --- queries -----------------------------------------------------------

    def position(self, node: str) -> int:
        return self._pos[node]

    def adjacent(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self._edges

    def has_directed(self, u: str, v: str) -> bool:
        return self._edges.get(frozenset((u, v)), 0) == (u, v)

    def has_undirected(self, u: str, v: str) -> bool:
        key = frozenset((u, v))
        return key in self._edges and self._edges[key] is None

    def _sorted_pair(self, key):
        a, b = sorted(key, key=self._pos.__getitem__)
        return a, b

    @property
    def directed_edges(self) -> list[tuple[str, str]]:
        out = [e for e in self._edges.values() if e is not None]
        return sorted(out, key=lambda e: (self._pos[e[0]], self._pos[e[1]]))

    @property
    def undirected_edges(self) -> list[tuple[str, str]]:
        out = [self._sorted_pair(k) for k, e in self._edges.items() if e is None]
        return sorted(out, key=lambda e: (self._pos[e[0]], self._pos[e[1]]))

    def adjacencies(self) -> set[frozenset]:
        return set(self._edges)

    def num_edges(self) -> int:
        return len(self._edges)

    def neighbours(self, v: str) -> list[str]:
        return [n for n in self.nodes if n != v and self.adjacent(n, v)]

    def parents(self, v: str) -> list[str]:
        return [n for n in self.nodes if self.has_directed(n, v)]

    def children(self, v: str) -> list[str]:
        return [n for n in self.nodes if self.has_directed(v, n)]

    def descendants(self, v: str) -> set[str]:
        """Nodes reachable from ``v`` along directed edges, ``v`` excluded."""
        self._check(v)
        succ = self._successors()
        seen: set[str] = set()
        stack = [v]
        while stack:
            for w in succ[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        seen.discard(v)
        return seen

    def _successors(self) -> dict[str, list[str]]:
        succ: dict[str, list[str]] = {n: [] for n in self.nodes}
        for e in self._edges.values():
            if e is not None:
                succ[e[0]].append(e[1])
        return succ

    def is_acyclic(self) -> bool:
        """True iff the directed edges contain no cycle (Kahn's algorithm)."""
        succ = self._successors()
        indeg = {n: 0 for n in self.nodes}
        for targets in succ.values():
            for w in targets:
                indeg[w] += 1
        queue = deque(n for n in self.nodes if indeg[n] == 0)
        seen = 0
        while queue:
            n = queue.popleft()
            seen += 1
            for w in succ[n]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        return seen == len(self.nodes)

    def components(self) -> list[list[str]]:
        """Weakly connected components, each in node order."""
        adj: dict[str, list[str]] = {n: [] for n in self.nodes}
        for key in self._edges:
            a, b = tuple(key)
            adj[a].append(b)
            adj[b].append(a)
        label: dict[str, int] = {}
        parts: list[list[str]] = []
        for start in self.nodes:
            if start in label:
                continue
            label[start] = len(parts)
            part = [start]
            stack = [start]
            while stack:
                for w in adj[stack.pop()]:
                    if w not in label:
                        label[w] = len(parts)
                        part.append(w)
                        stack.append(w)
            parts.append(sorted(part, key=self._pos.__getitem__))
        return parts

    def num_components(self) -> int:
        return len(self.components())

    # --- mutation ------------------------------------------------------------

    def orient(self, u: str, v: str) -> None:
        """Turn the (undirected or directed) edge between u and v into u->v."""
        key = frozenset((u, v))
        if key not in self._edges:
            raise GraphError(f"no edge between {u!r} and {v!r}")
        self._edges[key] = (u, v)

    def unorient(self, u: str, v: str) -> None:
        key = frozenset((u, v))
        if key not in self._edges:
            raise GraphError(f"no edge between {u!r} and {v!r}")
        self._edges[key] = None

    def add_directed(self, u: str, v: str) -> None:
        self._add(u, v, True)

    def add_undirected(self, u: str, v: str) -> None:
        self._add(u, v, False)

    def remove(self, u: str, v: str) -> None:
        key = frozenset((u, v))
        if key not in self._edges:
            raise GraphError(f"no edge between {u!r} and {v!r}")
        del self._edges[key]

    # --- value semantics ---------------------------------------------------

    def copy(self) -> "MixedGraph":
        g = MixedGraph.__new__(type(self))
        g.nodes = self.nodes
        g._pos = self._pos
        g._edges = dict(self._edges)
        return g

    def key(self) -> tuple:
        """Canonical, hashable description: nodes plus sorted edge lists."""
        return (self.nodes, tuple(self.directed_edges), tuple(self.undirected_edges))

    def __eq__(self, other):
        return isinstance(other, MixedGraph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def skeleton(self) -> set[frozenset]:
        return self.adjacencies()

    def __repr__(self):
        parts = [f"{u}->{v}" for u, v in self.directed_edges]
        parts += [f"{u}--{v}" for u, v in self.undirected_edges]
        return f"{type(self).__name__}({', '.join(parts)})"


class Dag(MixedGraph):
    """A MixedGraph whose edges are all directed and acyclic."""

    def __init__(self, nodes: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        super().__init__(nodes, directed=edges)
        if not self.is_acyclic():
            raise GraphError("edges contain a directed cycle")

    @classmethod
    def from_mixed(cls, g: MixedGraph) -> "Dag":
        if g.undirected_edges:
            raise GraphError("graph still has undirected edges")
        return cls(g.nodes, g.directed_edges)

    @property
    def edges(self) -> list[tuple[str, str]]:
        return self.directed_edges


def is_acyclic(g: MixedGraph) -> bool:
    return g.is_acyclic()


def weakly_connected_components(g: MixedGraph) -> tuple[int, list[list[str]]]:
    parts = g.components()
    return len(parts), parts


def descendants(g: MixedGraph, v: str) -> set[str]:
    return g.descendants(v)


def apply_move(g: Dag, move: Move) -> Dag:
    """Return a new graph with ``move`` applied. Legality is the caller's job,
    except that adding onto an existing adjacency or touching an absent edge
    raises."""
    kind, u, v = move
    g._check(u, v)
    edges = set(g.directed_edges)
    if kind == "add":
        if g.adjacent(u, v):
            raise GraphError(f"{u!r} and {v!r} are already adjacent")
        edges.add((u, v))
    elif kind in ("remove", "reverse"):
        if (u, v) not in edges:
            raise GraphError(f"edge {u}->{v} not present")
        edges.remove((u, v))
        if kind == "reverse":
            edges.add((v, u))
    else:
        raise GraphError(f"unknown move kind {kind!r}")
    out = MixedGraph(g.nodes, directed=edges)
    out.__class__ = Dag
    return out


def inverse(move: Move) -> Move:
    kind, u, v = move
    if kind == "add":
        return Move("remove", u, v)
    if kind == "remove":
        return Move("add", u, v)
    return Move("reverse", v, u)


# --- edge-list files -----------------------------------------------------------


def write_graph(g: MixedGraph, path: str | Path | None = None) -> str:
    """Serialise as ``parent,child`` CSV, preceded by a ``#nodes:`` line.

    Undirected edges add a third ``direction`` column for the whole file.
    """
    buf = io.StringIO()
    buf.write("#nodes: " + ",".join(g.nodes) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    if g.undirected_edges:
        writer.writerow(["parent", "child", "direction"])
        writer.writerows([u, v, "directed"] for u, v in g.directed_edges)
        writer.writerows([u, v, "undirected"] for u, v in g.undirected_edges)
    else:
        writer.writerow(["parent", "child"])
        writer.writerows(g.directed_edges)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_graph(source: str | Path) -> MixedGraph:
    """Parse the edge-list format written by :func:`write_graph`."""
    if isinstance(source, Path) or "\n" not in source:
        text = Path(source).read_text()
    else:
        text = source
    nodes: list[str] = []
    body = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if stripped.startswith("#nodes:"):
                listed = stripped[len("#nodes:"):].split(",")
                nodes.extend(n.strip() for n in listed if n.strip())
            continue
        body.append(line)
    rows = list(csv.reader(body))
    if not rows or [c.strip() for c in rows[0][:2]] != ["parent", "child"]:
        raise GraphError("graph file must have a 'parent,child' header")
    directed, undirected = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        row = [c.strip() for c in row]
        if len(row) < 2:
            raise GraphError(f"edge row {lineno} is incomplete")
        u, v = row[0], row[1]
        mark = row[2] if len(row) > 2 else "directed"
        if mark not in ("directed", "undirected"):
            raise GraphError(f"edge row {lineno}: unknown direction {mark!r}")
        (undirected if mark == "undirected" else directed).append((u, v))
        for n in (u, v):
            if n not in nodes:
                nodes.append(n)
    return MixedGraph(list(dict.fromkeys(nodes)), directed, undirected)


def read_dag(source: str | Path) -> Dag:
    return Dag.from_mixed(read_graph(source))


def reorder(g: MixedGraph, nodes: Sequence[str]) -> MixedGraph:
    """Same edges over a permuted node list (node sets must match)."""
    if set(nodes) != set(g.nodes) or len(nodes) != len(g.nodes):
        raise GraphError("node sets differ")
    out = MixedGraph(nodes, g.directed_edges, g.undirected_edges)
    if isinstance(g, Dag):
        out.__class__ = Dag
    return out
