"""Decomposable BIC in base-2 log units, with a per-family cache."""

from __future__ import annotations

import math
from typing import Iterable, Mapping

import numpy as np

from .data import Dataset
from .graph import MixedGraph


def family_parameters(arity: int, parent_arities: Iterable[int]) -> int:
    return (arity - 1) * math.prod(parent_arities)


def free_parameters(g: MixedGraph, arities: Mapping[str, int]) -> int:
    """Number of independent CPT entries implied by the directed edges of g."""
    return sum(
        family_parameters(arities[v], (arities[p] for p in g.parents(v)))
        for v in g.nodes
    )


def family_loglik(d: Dataset, child: int, parents: Iterable[int]) -> float:
    """Sum over rows of log2 P(child | parents), maximum-likelihood estimates.

    Cells with zero count drop out (0 log 0 = 0).
    """
    codes = d.codes
    arities = d.arities
    config = np.zeros(d.n, dtype=np.int64)
    q = 1
    for p in sorted(parents):
        config = config * arities[p] + codes[:, p]
        q *= arities[p]
        if q > d.n:
            # relabel occupied configurations; keeps their sorted order
            occupied, config = np.unique(config, return_inverse=True)
            q = len(occupied)
    r = arities[child]
    counts = np.bincount(config * r + codes[:, child], minlength=q * r).reshape(q, r)
    totals = counts.sum(axis=1, keepdims=True)
    nz = counts > 0
    ratio = counts[nz] / np.broadcast_to(totals, counts.shape)[nz]
    return float(np.sum(counts[nz] * np.log2(ratio)))


class ScoreContext:
    """Dataset plus a cache of BIC family terms keyed by (child, parent set)."""

    def __init__(self, d: Dataset):
        self.data = d
        self.n = d.n
        self.arities = d.arities
        self.penalty = math.log2(d.n) / 2 if d.n > 0 else 0.0
        self._cache: dict[tuple[int, frozenset], float] = {}
        self.evaluations = 0

    def family(self, child: int, parents: frozenset) -> float:
        key = (child, parents)
        hit = self._cache.get(key)
        if hit is None:
            self.evaluations += 1
            ll = family_loglik(self.data, child, parents)
            k = family_parameters(self.arities[child], (self.arities[p] for p in parents))
            hit = self._cache[key] = ll - self.penalty * k
        return hit

    def total(self, parent_sets) -> float:
        """BIC of a graph given as one parent set (of column indices) per node."""
        return math.fsum(self.family(i, ps) for i, ps in enumerate(parent_sets))

    def parent_sets(self, g: MixedGraph) -> list[frozenset]:
        idx = self.data.index
        return [
            frozenset(idx(p) for p in g.parents(v)) for v in self.data.names
        ]

    def bic(self, g: MixedGraph) -> float:
        """Score of the directed part of g; undirected edges count as absent."""
        return self.total(self.parent_sets(g))


def log_likelihood(g: MixedGraph, d: Dataset) -> float:
    idx = d.index
    return math.fsum(
        family_loglik(d, idx(v), [idx(p) for p in g.parents(v)]) for v in d.names
    )


def bic(g: MixedGraph, d: Dataset) -> float:
    k = free_parameters(g, dict(zip(d.names, d.arities)))
    return log_likelihood(g, d) - (math.log2(d.n) / 2) * k


def same_score(a: float, b: float) -> bool:
    """Scores equal up to float noise from differently ordered sums."""
    return abs(a - b) <= 1e-9 * max(1.0, abs(a), abs(b))


def improves(new: float, old: float) -> bool:
    return new > old and not same_score(new, old)
