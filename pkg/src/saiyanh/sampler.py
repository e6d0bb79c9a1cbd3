"""Ground-truth networks: JSON loading, validation and forward sampling."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from itertools import product
from pathlib import Path
from typing import Mapping

import numpy as np

from .data import Dataset, Variable
from .graph import Dag, GraphError, MixedGraph
from .score import free_parameters as _free_parameters

GENERATOR_ID = "numpy.random.PCG64"
BUNDLED = ("asia", "chain", "collider")


class NetworkError(ValueError):
    pass


def cpt_key(parents: list[str], states: tuple[str, ...]) -> str:
    return "<" + ",".join(f"{p}={s}" for p, s in zip(parents, states)) + ">"


@dataclass
class BNModel:
    dag: Dag
    variables: tuple[Variable, ...]
    # node -> parent-state combination (parents sorted by name) -> probabilities
    cpts: dict[str, dict[tuple[str, ...], tuple[float, ...]]]
    name: str = "network"

    def variable(self, name: str) -> Variable:
        return next(v for v in self.variables if v.name == name)

    def parents(self, node: str) -> list[str]:
        return sorted(self.dag.parents(node))

    @property
    def arities(self) -> dict[str, int]:
        return {v.name: v.arity for v in self.variables}

    def free_parameters(self) -> int:
        return _free_parameters(self.dag, self.arities)

    def topological_order(self) -> list[str]:
        """Stable order by (longest path from a root, name)."""
        depth: dict[str, int] = {}

        def visit(v):
            if v not in depth:
                ps = self.dag.parents(v)
                depth[v] = 1 + max((visit(p) for p in ps), default=-1)
            return depth[v]

        for v in self.dag.nodes:
            visit(v)
        return sorted(self.dag.nodes, key=lambda v: (depth[v], v))

    def probability(self, assignment: Mapping[str, str]) -> float:
        """Joint probability of a full assignment."""
        p = 1.0
        for v in self.dag.nodes:
            row = self.cpts[v][tuple(assignment[q] for q in self.parents(v))]
            p *= row[self.variable(v).states.index(assignment[v])]
        return p

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "variables": [{"name": v.name, "states": list(v.states)} for v in self.variables],
            "edges": [list(e) for e in self.dag.directed_edges],
            "cpts": {
                node: {cpt_key(self.parents(node), combo): list(row) for combo, row in table.items()}
                for node, table in self.cpts.items()
            },
        }


def _parse_key(key: str, parents: list[str], node: str) -> tuple[str, ...]:
    body = key.strip()
    if body.startswith("<") and body.endswith(">"):
        body = body[1:-1]
    if not body:
        return ()
    pairs = [item.split("=", 1) for item in body.split(",")]
    if any(len(p) != 2 for p in pairs):
        raise NetworkError(f"node {node!r}: malformed CPT key {key!r}")
    named = {k.strip(): s.strip() for k, s in pairs}
    if sorted(named) != parents:
        raise NetworkError(
            f"node {node!r}: CPT key {key!r} must name exactly the parents {parents}"
        )
    return tuple(named[p] for p in parents)


def load_network(source: str | Path | Mapping) -> BNModel:
    """Build a validated model from a JSON document, file path, or bundled name."""
    if isinstance(source, Mapping):
        doc = source
    else:
        text = str(source)
        if text in BUNDLED:
            doc = json.loads(resources.files("saiyanh.networks").joinpath(f"{text}.json").read_text())
        elif text.lstrip().startswith("{"):
            doc = json.loads(text)
        else:
            doc = json.loads(Path(source).read_text())
    try:
        variables = tuple(Variable(v["name"], tuple(map(str, v["states"]))) for v in doc["variables"])
        edges = [tuple(e) for e in doc.get("edges", [])]
        raw_cpts = doc["cpts"]
    except (KeyError, TypeError) as exc:
        raise NetworkError(f"malformed network document: {exc}") from None
    for v in variables:
        if v.arity < 2:
            raise NetworkError(f"variable {v.name!r} needs at least two states")
    names = [v.name for v in variables]
    try:
        g = MixedGraph(names, directed=edges)
    except GraphError as exc:
        raise NetworkError(str(exc)) from None
    if not g.is_acyclic():
        raise NetworkError("network structure contains a directed cycle")
    dag = Dag(names, edges)
    by_name = {v.name: v for v in variables}
    cpts: dict[str, dict[tuple[str, ...], tuple[float, ...]]] = {}
    for node in names:
        parents = sorted(dag.parents(node))
        if node not in raw_cpts:
            raise NetworkError(f"node {node!r}: missing CPT")
        table = {}
        for key, row in raw_cpts[node].items():
            combo = _parse_key(key, parents, node)
            for p, s in zip(parents, combo):
                if s not in by_name[p].states:
                    raise NetworkError(f"node {node!r}, row {key!r}: unknown state {s!r} of {p!r}")
            if combo in table:
                raise NetworkError(f"node {node!r}, row {key!r}: duplicate row")
            row = tuple(float(x) for x in row)
            if len(row) != by_name[node].arity:
                raise NetworkError(
                    f"node {node!r}, row {key!r}: expected {by_name[node].arity} probabilities"
                )
            if any(x < 0 for x in row) or abs(math.fsum(row) - 1.0) > 1e-9:
                raise NetworkError(
                    f"node {node!r}, row {key!r}: probabilities sum to {math.fsum(row):g}, not 1"
                )
            table[combo] = row
        for combo in product(*(by_name[p].states for p in parents)):
            if combo not in table:
                raise NetworkError(f"node {node!r}: missing CPT row {cpt_key(parents, combo)}")
        cpts[node] = table
    return BNModel(dag, variables, cpts, str(doc.get("name", "network")))


def forward_sample(m: BNModel, n: int, seed: int) -> Dataset:
    """Draw ``n`` rows; one uniform stream per node, in topological order."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    index = {v.name: i for i, v in enumerate(m.variables)}
    codes = np.zeros((n, len(m.variables)), dtype=np.int64)
    for node in m.topological_order():
        var = m.variable(node)
        parents = m.parents(node)
        pvars = [m.variable(p) for p in parents]
        combos = list(product(*(range(p.arity) for p in pvars)))
        cum = np.empty((len(combos), var.arity))
        for k, combo in enumerate(combos):
            labels = tuple(p.states[s] for p, s in zip(pvars, combo))
            cum[k] = np.cumsum(m.cpts[node][labels])
        config = np.zeros(n, dtype=np.int64)
        for p, pv in zip(parents, pvars):
            config = config * pv.arity + codes[:, index[p]]
        u = rng.random(n)
        state = (u[:, None] >= cum[config]).sum(axis=1)
        codes[:, index[node]] = np.minimum(state, var.arity - 1)
    return Dataset(m.variables, codes)


def sample_metadata(m: BNModel, n: int, seed: int) -> dict:
    return {
        "network": m.name,
        "n": n,
        "seed": seed,
        "generator": GENERATOR_ID,
        "states": {v.name: list(v.states) for v in m.variables},
    }
