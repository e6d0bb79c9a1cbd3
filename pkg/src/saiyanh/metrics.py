"""Accuracy of a learned graph against the true DAG.

A learned adjacency that exists in the truth but carries the wrong or no
orientation earns half a true positive; the other half is booked as a false
negative. Reversed edges therefore cost 0.5 in SHD.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations

from .graph import GraphError, MixedGraph

REPORT_COLUMNS = (
    "case", "n", "f1", "shd", "bsf", "components", "delta",
    "phase1_frac", "phase2_frac", "phase3_frac", "runtime_s",
)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: float = 0.0
    tn: float = 0.0
    fp: float = 0.0
    fn: float = 0.0


def confusion(learned: MixedGraph, truth: MixedGraph) -> ConfusionCounts:
    if set(learned.nodes) != set(truth.nodes):
        raise GraphError("learned and true graphs have different node sets")
    tp = tn = fp = fn = 0.0
    for a, b in combinations(truth.nodes, 2):
        in_learned, in_truth = learned.adjacent(a, b), truth.adjacent(a, b)
        if in_learned and in_truth:
            same = (
                (truth.has_directed(a, b) and learned.has_directed(a, b))
                or (truth.has_directed(b, a) and learned.has_directed(b, a))
            )
            if same:
                tp += 1
            else:
                tp += 0.5
                fn += 0.5
        elif in_truth:
            fn += 1
        elif in_learned:
            fp += 1
        else:
            tn += 1
    return ConfusionCounts(tp, tn, fp, fn)


def skeleton_confusion(learned: MixedGraph, truth: MixedGraph) -> ConfusionCounts:
    """Adjacency-only counts; orientation is ignored."""
    if set(learned.nodes) != set(truth.nodes):
        raise GraphError("learned and true graphs have different node sets")
    tp = tn = fp = fn = 0
    for a, b in combinations(truth.nodes, 2):
        x, y = learned.adjacent(a, b), truth.adjacent(a, b)
        tp += x and y
        fp += x and not y
        fn += y and not x
        tn += not (x or y)
    return ConfusionCounts(float(tp), float(tn), float(fp), float(fn))


def f1(c: ConfusionCounts) -> tuple[float, float, float]:
    """(precision, recall, F1); all zero when there are no true positives."""
    if c.tp == 0:
        return 0.0, 0.0, 0.0
    precision = c.tp / (c.tp + c.fp)
    recall = c.tp / (c.tp + c.fn)
    return precision, recall, 2 * precision * recall / (precision + recall)


def shd(c: ConfusionCounts) -> float:
    return c.fp + c.fn


def bsf(c: ConfusionCounts, a: float, i: float) -> float:
    """Balanced scoring function; ``a`` true edges, ``i`` true non-edges."""
    if a <= 0 or i <= 0:
        raise ValueError("BSF is undefined when the true graph is empty or complete")
    return 0.5 * (c.tp / a + c.tn / i - c.fp / i - c.fn / a)


def edge_delta(learned: MixedGraph, truth: MixedGraph) -> int:
    return learned.num_edges() - truth.num_edges()


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    f1: float
    shd: float
    bsf: float
    components: int
    delta: int
    phase1_frac: float | None = None
    phase2_frac: float | None = None
    phase3_frac: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(
    learned: MixedGraph, truth: MixedGraph, fractions: tuple[float, float, float] | None = None
) -> MetricsReport:
    c = confusion(learned, truth)
    a = truth.num_edges()
    v = len(truth.nodes)
    i = v * (v - 1) // 2 - a
    precision, recall, f = f1(c)
    fr = fractions or (None, None, None)
    return MetricsReport(
        precision=precision,
        recall=recall,
        f1=f,
        shd=shd(c),
        bsf=bsf(c, a, i),
        components=learned.num_components(),
        delta=edge_delta(learned, truth),
        phase1_frac=fr[0],
        phase2_frac=fr[1],
        phase3_frac=fr[2],
    )


def report_row(case: str, n, report: MetricsReport | None, runtime_s: float | None) -> dict:
    """One results-CSV row; a missing report yields ``n/a`` metrics."""

    def fmt(x):
        if x is None:
            return "n/a"
        if isinstance(x, float):
            return f"{x:.6g}"
        return str(x)

    if report is None:
        values = ["n/a"] * 8
    else:
        values = [
            fmt(report.f1), fmt(report.shd), fmt(report.bsf),
            fmt(report.components), fmt(report.delta),
            fmt(report.phase1_frac), fmt(report.phase2_frac), fmt(report.phase3_frac),
        ]
    return dict(zip(REPORT_COLUMNS, [case, fmt(n), *values, fmt(runtime_s)]))
