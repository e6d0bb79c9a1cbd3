"""Command-line entry points: generate, learn, evaluate, benchmark.

Exit codes: 0 success (a timed-out, partial learn included), 1 usage error,
2 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .data import DataError, load_dataset
from .graph import GraphError, MixedGraph, read_graph, write_graph
from .learn import DEFAULT_TIMEOUT, learn
from .metrics import REPORT_COLUMNS, evaluate, report_row
from .sampler import NetworkError, forward_sample, load_network, sample_metadata

log = logging.getLogger("saiyanh")

BENCHMARK_COLUMNS = REPORT_COLUMNS + ("seed",)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    data: Path | None = None
    net: str | None = None
    truth: str | None = None
    learned: Path | None = None
    out: Path | None = None
    sizes: list[int] = field(default_factory=list)
    seed: int = 0
    timeout: float = DEFAULT_TIMEOUT
    trace: bool = False
    manifest: Path | None = None
    case: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.timeout <= 0:
            raise UsageError("--timeout must be positive")
        if any(n < 1 for n in self.sizes):
            raise UsageError("sample sizes must be at least 1")


# --- helpers -------------------------------------------------------------------


def sidecar(path: Path, suffix: str) -> Path:
    return path.with_name(path.stem + suffix)


def load_with_sidecar(path: Path):
    meta = sidecar(path, ".meta.json")
    states = json.loads(meta.read_text()).get("states") if meta.exists() else None
    return load_dataset(path, states=states)


def load_truth(source: str) -> MixedGraph:
    p = Path(source)
    if source.endswith(".json") or (not p.exists() and "/" not in source):
        return load_network(source).dag
    return read_graph(p)


# --- commands --------------------------------------------------------------------


def cmd_generate(cfg: RunConfig) -> list[Path]:
    model = load_network(cfg.net)
    out = cfg.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for n in cfg.sizes:
        path = out / f"{model.name}_n{n}_s{cfg.seed}.csv"
        forward_sample(model, n, cfg.seed).to_csv(path)
        sidecar(path, ".meta.json").write_text(
            json.dumps(sample_metadata(model, n, cfg.seed), indent=2) + "\n"
        )
        written.append(path)
        log.info("wrote %s", path)
    return written


def cmd_learn(cfg: RunConfig) -> dict:
    d = load_with_sidecar(cfg.data)
    result = learn(d, cfg.timeout)
    out = cfg.out or sidecar(cfg.data, ".dag.csv")
    write_graph(result.dag, out)
    summary = {
        "data": str(cfg.data),
        "n": d.n,
        "partial": result.partial,
        "components": result.dag.num_components(),
        "bic": result.search.bic,
        "pair_tests": result.table.pair_tests,
        "triple_tests": result.table.triple_tests,
        "tabu_escapes": result.search.tabu.escapes if result.search.tabu else 0,
        "runtime_s": result.runtime_s,
        **result.timing.as_dict(),
    }
    sidecar(out, ".timing.json").write_text(json.dumps(summary, indent=2) + "\n")
    if cfg.trace:
        result.search.write_trace(sidecar(out, ".search_trace.csv"))
        result.table.dump(sidecar(out, ".mmd_pairs.csv"), sidecar(out, ".mmd_triples.csv"))
        write_graph(result.emsg, sidecar(out, ".emsg.csv"))
        write_graph(result.phase2, sidecar(out, ".phase2.csv"))
        with open(sidecar(out, ".orientation_trace.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["edge", "criterion"])
            for u, v, crit in result.orientation.trace:
                w.writerow([f"{u}->{v}", crit])
    log.info("learned %d edges in %.3fs%s", result.dag.num_edges(), result.runtime_s,
             " (partial)" if result.partial else "")
    return summary


def write_rows(rows: list[dict], columns, out: Path | None) -> None:
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if out:
            fh.close()


def cmd_evaluate(cfg: RunConfig) -> dict:
    learned = read_graph(cfg.learned)
    truth = load_truth(cfg.truth)
    timing_path = sidecar(cfg.learned, ".timing.json")
    timing = json.loads(timing_path.read_text()) if timing_path.exists() else {}
    fractions = None
    if "phase1_frac" in timing:
        fractions = (timing["phase1_frac"], timing["phase2_frac"], timing["phase3_frac"])
    report = evaluate(learned, truth, fractions)
    n = cfg.sizes[0] if cfg.sizes else timing.get("n")
    row = report_row(cfg.case or Path(cfg.learned).stem, n, report, timing.get("runtime_s"))
    write_rows([row], REPORT_COLUMNS, cfg.out)
    return row


def read_manifest(path: Path) -> list[tuple[str, int, int]]:
    """Cells (network, size, seed) from ``{"networks": [{"net", "sizes", "seeds"}]}``."""
    try:
        doc = json.loads(Path(path).read_text())
        cells = []
        for entry in doc["networks"]:
            load_network(entry["net"])
            sizes = [int(n) for n in entry["sizes"]]
            seeds = [int(s) for s in entry.get("seeds", [0])]
            if not sizes or any(n < 1 for n in sizes):
                raise ValueError(f"bad sizes for {entry['net']!r}")
            cells += [(entry["net"], n, s) for n in sizes for s in seeds]
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise DataError(f"manifest {path}: {exc}") from None
    return cells


def run_cell(cell: tuple[str, int, int], timeout: float) -> dict:
    net, n, seed = cell
    model = load_network(net)
    start = time.perf_counter()
    try:
        d = forward_sample(model, n, seed)
        result = learn(d, timeout)
    except Exception as exc:  # recorded as an n/a row, the run goes on
        log.warning("cell %s failed: %s", cell, exc)
        return {**report_row(model.name, n, None, time.perf_counter() - start), "seed": str(seed)}
    if result.partial:
        return {**report_row(model.name, n, None, timeout), "seed": str(seed)}
    report = evaluate(result.dag, model.dag, result.timing.fractions)
    return {**report_row(model.name, n, report, result.runtime_s), "seed": str(seed)}


def cmd_benchmark(cfg: RunConfig) -> list[dict]:
    cells = read_manifest(cfg.manifest)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            rows = list(pool.map(run_cell, cells, [cfg.timeout] * len(cells)))
    else:
        rows = [run_cell(c, cfg.timeout) for c in cells]
    write_rows(rows, BENCHMARK_COLUMNS, cfg.out)
    return rows


# --- argument parsing --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _sizes(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="saiyanh", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="sample datasets from a network")
    g.add_argument("--net", required=True, help="network JSON file or bundled name")
    g.add_argument("--n", type=_sizes, required=True, help="sample size(s), comma separated")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, help="output directory (default: .)")

    lp = sub.add_parser("learn", help="learn a connected DAG from a CSV dataset")
    lp.add_argument("--data", type=Path, required=True)
    lp.add_argument("--out", type=Path, help="DAG CSV (default: <data>.dag.csv)")
    lp.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    lp.add_argument("--trace", action="store_true", help="write MMD, EMSG, phase-2, orientation and search traces")

    e = sub.add_parser("evaluate", help="score a learned graph against the truth")
    e.add_argument("learned", type=Path)
    e.add_argument("--truth", required=True, help="DAG CSV, network JSON, or bundled name")
    e.add_argument("--out", type=Path, help="metrics CSV (default: stdout)")
    e.add_argument("--n", type=_sizes)
    e.add_argument("--case")

    b = sub.add_parser("benchmark", help="generate, learn and evaluate every manifest cell")
    b.add_argument("--manifest", type=Path, required=True)
    b.add_argument("--out", type=Path, help="results CSV (default: stdout)")
    b.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    b.add_argument("--jobs", type=int, default=1)
    return p


COMMANDS = {
    "generate": cmd_generate,
    "learn": cmd_learn,
    "evaluate": cmd_evaluate,
    "benchmark": cmd_benchmark,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    opts = vars(args)
    try:
        cfg = RunConfig(
            command=args.command,
            data=opts.get("data"),
            net=opts.get("net"),
            truth=opts.get("truth"),
            learned=opts.get("learned"),
            out=opts.get("out"),
            sizes=opts.get("n") or [],
            seed=opts.get("seed", 0),
            timeout=opts.get("timeout", DEFAULT_TIMEOUT),
            trace=opts.get("trace", False),
            manifest=opts.get("manifest"),
            case=opts.get("case"),
            jobs=opts.get("jobs", 1),
        )
        COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"saiyanh: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, NetworkError, GraphError, OSError, json.JSONDecodeError) as exc:
        print(f"saiyanh: {exc}", file=sys.stderr)
        return 2
    return 0
