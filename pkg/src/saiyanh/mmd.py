"""Mean/max marginal discrepancy scores and triple classification.

The pair score averages four directional discrepancies between a variable's
marginal distribution and its distribution conditional on each state of the
other variable: the mean and the max absolute difference, in both directions.
States with no supporting rows are left out of every average.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from pathlib import Path

import numpy as np

from .budget import NEVER, Deadline
from .data import Dataset

DEPENDENCE_FLOOR = 0.05
CD_RATIO = 1.5
CI_RATIO = 0.5


class Label(str, Enum):
    CD = "CD"
    CI = "CI"
    INSIGNIFICANT = "insignificant"


def _directional(table: np.ndarray) -> tuple[float, float]:
    """(mean, max) discrepancy of the column variable given each row state."""
    table = np.ascontiguousarray(table, dtype=np.float64)
    rows = table.sum(axis=1)
    cols = table.sum(axis=0)
    table = table[rows > 0][:, cols > 0]
    rows = rows[rows > 0]
    cols = cols[cols > 0]
    if rows.size == 0:
        return 0.0, 0.0
    prior = cols / rows.sum()
    diffs = np.abs(prior[None, :] - table / rows[:, None])
    mean = float((diffs.sum(axis=1) / cols.size).sum() / rows.size)
    peak = float(diffs.max(axis=1).sum() / rows.size)
    return mean, peak


def mmd_from_table(table: np.ndarray) -> float:
    """Pair score of a contingency table (rows: first variable)."""
    mn_fwd, mx_fwd = _directional(table)
    mn_bwd, mx_bwd = _directional(np.asarray(table).T)
    # grouped so that swapping the variables yields the identical float
    return 0.25 * ((mn_fwd + mx_fwd) + (mn_bwd + mx_bwd))


def crosstab(d: Dataset, *names: str) -> np.ndarray:
    shape = tuple(d.variable(n).arity for n in names)
    flat = np.zeros(d.n, dtype=np.int64)
    for n, r in zip(names, shape):
        flat = flat * r + d.column(n)
    size = int(np.prod(shape))
    return np.bincount(flat, minlength=size).reshape(shape)


def mmd_pair(d: Dataset, a: str, b: str) -> float:
    if a == b:
        raise ValueError("mmd_pair needs two distinct variables")
    return mmd_from_table(crosstab(d, a, b))


def _stratified(cube: np.ndarray) -> float:
    """Support-weighted mean of within-stratum pair scores; axis 0 = stratum."""
    weights = cube.sum(axis=(1, 2))
    total = weights.sum()
    score = 0.0
    for c in np.flatnonzero(weights):
        score += (weights[c] / total) * mmd_from_table(cube[c])
    return float(score)


def mmd_conditional(d: Dataset, a: str, b: str, c: str) -> float:
    if len({a, b, c}) != 3:
        raise ValueError("mmd_conditional needs three distinct variables")
    return _stratified(crosstab(d, c, a, b))


def classify_triple(marginal: float, conditional: float) -> Label:
    if conditional > DEPENDENCE_FLOOR and conditional > CD_RATIO * marginal:
        return Label.CD
    if conditional < DEPENDENCE_FLOOR and conditional < CI_RATIO * marginal:
        return Label.CI
    return Label.INSIGNIFICANT


def _pair(a: str, b: str, order: dict[str, int]) -> tuple[str, str]:
    return (a, b) if order[a] < order[b] else (b, a)


@dataclass
class MmdTable:
    """All pair scores, all conditional scores and their labels.

    Pairs are stored as ``(a, b)`` with ``a`` before ``b`` in column order;
    triples as ``((a, b), c)`` with ``c`` the conditioning variable.
    """

    nodes: tuple[str, ...]
    pair_score: dict[tuple[str, str], float] = field(default_factory=dict)
    triple_score: dict[tuple[tuple[str, str], str], float] = field(default_factory=dict)
    labels: dict[tuple[tuple[str, str], str], Label] = field(default_factory=dict)
    pair_tests: int = 0
    triple_tests: int = 0
    complete: bool = True

    def __post_init__(self):
        self._order = {n: i for i, n in enumerate(self.nodes)}

    def pair(self, a: str, b: str) -> float:
        return self.pair_score[_pair(a, b, self._order)]

    def triple(self, a: str, b: str, c: str) -> float:
        return self.triple_score[(_pair(a, b, self._order), c)]

    def label(self, a: str, b: str, c: str) -> Label:
        """Label of (a, b | c); triples never tested count as insignificant."""
        return self.labels.get((_pair(a, b, self._order), c), Label.INSIGNIFICANT)

    @property
    def cd(self) -> list[tuple[tuple[str, str], str]]:
        return [k for k, v in self.labels.items() if v is Label.CD]

    @property
    def ci(self) -> list[tuple[tuple[str, str], str]]:
        return [k for k, v in self.labels.items() if v is Label.CI]

    def dump(self, pairs_path: str | Path, triples_path: str | Path) -> None:
        with open(pairs_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["nodeA", "nodeB", "mmd"])
            for (a, b), s in self.pair_score.items():
                w.writerow([a, b, repr(s)])
        with open(triples_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["nodeA", "nodeB", "cond", "mmd", "label"])
            for ((a, b), c), s in self.triple_score.items():
                w.writerow([a, b, c, repr(s), self.labels[((a, b), c)].value])


def build_pair_scores(d: Dataset) -> MmdTable:
    table = MmdTable(d.names)
    for a, b in combinations(d.names, 2):
        table.pair_score[(a, b)] = mmd_pair(d, a, b)
        table.pair_tests += 1
    return table


def add_triple_scores(d: Dataset, table: MmdTable, deadline: Deadline = NEVER) -> MmdTable:
    """Score and label every (pair | third variable) triple, in place.

    If the deadline passes, the remaining triples stay untested (treated as
    insignificant) and ``table.complete`` is cleared.
    """
    for c in d.names:
        for a, b in combinations(d.names, 2):
            if c in (a, b):
                continue
            if deadline.expired():
                table.complete = False
                return table
            s = mmd_conditional(d, a, b, c)
            table.triple_score[((a, b), c)] = s
            table.labels[((a, b), c)] = classify_triple(table.pair_score[(a, b)], s)
            table.triple_tests += 1
    return table


def build_mmd_table(d: Dataset, deadline: Deadline = NEVER) -> MmdTable:
    if len(d.names) < 2:
        raise ValueError("need at least two variables")
    return add_triple_scores(d, build_pair_scores(d), deadline)
