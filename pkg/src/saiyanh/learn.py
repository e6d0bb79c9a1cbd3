"""The three learning phases end to end, timed per phase."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .budget import Deadline
from .data import Dataset
from .emsg import build_emsg
from .graph import Dag, MixedGraph
from .mmd import MmdTable, add_triple_scores, build_pair_scores
from .orientation import OrientationState, run_phase2
from .score import ScoreContext
from .search import SearchResult, run_phase3

DEFAULT_TIMEOUT = 6 * 60 * 60


@dataclass(frozen=True)
class PhaseTiming:
    phase1_s: float
    phase2_s: float
    phase3_s: float

    @property
    def total_s(self) -> float:
        return self.phase1_s + self.phase2_s + self.phase3_s

    @property
    def fractions(self) -> tuple[float, float, float]:
        total = self.total_s
        if total <= 0:
            return (1 / 3, 1 / 3, 1 / 3)
        return (self.phase1_s / total, self.phase2_s / total, self.phase3_s / total)

    def as_dict(self) -> dict:
        f = self.fractions
        return {
            "phase1_s": self.phase1_s, "phase2_s": self.phase2_s, "phase3_s": self.phase3_s,
            "phase1_frac": f[0], "phase2_frac": f[1], "phase3_frac": f[2],
            "total_s": self.total_s,
        }


@dataclass
class LearnResult:
    dag: Dag
    timing: PhaseTiming
    partial: bool
    table: MmdTable
    emsg: MixedGraph
    phase2: Dag
    orientation: OrientationState
    search: SearchResult
    runtime_s: float


def learn(d: Dataset, timeout: float | None = None) -> LearnResult:
    """Learn a connected DAG from ``d``.

    The deadline is polled between atomic steps. Pair scores are always
    computed; anything cut short afterwards still yields a connected DAG and
    the result is flagged ``partial``.
    """
    start = time.perf_counter()
    deadline = Deadline(timeout)

    t0 = time.perf_counter()
    table = build_pair_scores(d)
    emsg = build_emsg(table, d.names, deadline)
    t1 = time.perf_counter()

    add_triple_scores(d, table, deadline)
    ctx = ScoreContext(d)
    phase2, state = run_phase2(emsg, table, d, ctx, deadline)
    t2 = time.perf_counter()

    search = run_phase3(phase2, ctx, table, deadline)
    t3 = time.perf_counter()

    return LearnResult(
        dag=search.dag,
        timing=PhaseTiming(t1 - t0, t2 - t1, t3 - t2),
        partial=deadline.hit,
        table=table,
        emsg=emsg,
        phase2=phase2,
        orientation=state,
        search=search,
        runtime_s=time.perf_counter() - start,
    )
