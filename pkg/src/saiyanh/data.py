"""Complete discrete datasets and the empirical distributions read off them."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np


class DataError(ValueError):
    """Raised when a dataset cannot be loaded or is malformed."""


@dataclass(frozen=True)
class Variable:
    name: str
    states: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.states)) != len(self.states):
            raise DataError(f"variable {self.name!r} has duplicate state labels")

    @property
    def arity(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class Distribution:
    """Probabilities over the states of one variable.

    ``empty`` is set when the conditioning event has no supporting rows; the
    probabilities are then all zero and carry no meaning.
    """

    variable: Variable
    probabilities: tuple[float, ...]
    empty: bool = False

    def __getitem__(self, state: str) -> float:
        return self.probabilities[self.variable.states.index(state)]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable table of state indices, one column per variable.

    ``codes[r, c]`` is the index into ``variables[c].states`` of row ``r``.
    """

    variables: tuple[Variable, ...]
    codes: np.ndarray = field(repr=False)

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int64)
        if codes.ndim != 2 or codes.shape[1] != len(self.variables):
            raise DataError("codes must be an N x |V| matrix")
        for c, var in enumerate(self.variables):
            col = codes[:, c]
            if col.size and (col.min() < 0 or col.max() >= var.arity):
                raise DataError(f"column {var.name!r} indexes an undeclared state")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise DataError("duplicate variable names")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(v.arity for v in self.variables)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def variable(self, name: str) -> Variable:
        return self.variables[self.index(name)]

    def column(self, name: str) -> np.ndarray:
        return self.codes[:, self.index(name)]

    def restrict(self, mask: np.ndarray) -> "Dataset":
        return Dataset(self.variables, self.codes[mask])

    def labels(self) -> list[list[str]]:
        return [
            [var.states[k] for var, k in zip(self.variables, row)]
            for row in self.codes.tolist()
        ]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.names)
            writer.writerows(self.labels())


def _parse_rows(text: str) -> tuple[list[str], list[list[str]]]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty dataset file") from None
    header = [h.strip() for h in header]
    seen = set()
    for h in header:
        if not h:
            raise DataError("blank column name in header")
        if h in seen:
            raise DataError(f"duplicate column name {h!r}")
        seen.add(h)
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise DataError(
                f"row {lineno}: expected {len(header)} cells, found {len(row)}"
            )
        for col, cell in zip(header, row):
            if cell.strip() == "":
                raise DataError(f"row {lineno}, column {col!r}: missing value")
        rows.append([cell.strip() for cell in row])
    if not rows:
        raise DataError("dataset has no data rows")
    return header, rows


def load_dataset(
    source: str | Path,
    states: Mapping[str, Sequence[str]] | None = None,
) -> Dataset:
    """Load a CSV file (or CSV text) with a header row.

    States are taken in first-appearance order unless ``states`` declares them
    for a column, in which case the declared order is used and observed labels
    must be among them. Inferred columns with a single state are rejected.
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        text = Path(source).read_text()
    else:
        text = source
    header, rows = _parse_rows(text)
    states = states or {}
    variables = []
    codes = np.empty((len(rows), len(header)), dtype=np.int64)
    for c, name in enumerate(header):
        column = [row[c] for row in rows]
        if name in states:
            declared = tuple(str(s) for s in states[name])
            lookup = {s: k for k, s in enumerate(declared)}
            for r, label in enumerate(column):
                if label not in lookup:
                    raise DataError(
                        f"row {r + 2}, column {name!r}: undeclared state {label!r}"
                    )
        else:
            declared = tuple(dict.fromkeys(column))
            if len(declared) < 2:
                raise DataError(
                    f"column {name!r} has a single state; no dependency is measurable"
                )
            lookup = {s: k for k, s in enumerate(declared)}
        codes[:, c] = [lookup[label] for label in column]
        variables.append(Variable(name, declared))
    return Dataset(tuple(variables), codes)


def from_records(
    names: Sequence[str], records: Iterable[Sequence[str]]
) -> Dataset:
    """Build a dataset from in-memory rows, inferring states like the loader."""
    lines = [",".join(names)] + [",".join(map(str, r)) for r in records]
    return load_dataset("\n".join(lines) + "\n")


def _distribution(var: Variable, counts: np.ndarray) -> Distribution:
    total = counts.sum()
    if total == 0:
        return Distribution(var, (0.0,) * var.arity, empty=True)
    return Distribution(var, tuple((counts / total).tolist()))


def marginal(d: Dataset, var: str) -> Distribution:
    v = d.variable(var)
    return _distribution(v, np.bincount(d.column(var), minlength=v.arity))


def conditional(
    d: Dataset, var: str, given: Mapping[str, str] | Sequence[tuple[str, str]] = ()
) -> Distribution:
    """Distribution of ``var`` over the rows matching every ``(name, state)``."""
    given = dict(given)
    if var in given:
        raise ValueError(f"{var!r} cannot condition on itself")
    mask = np.ones(d.n, dtype=bool)
    for name, state in given.items():
        mask &= d.column(name) == d.variable(name).states.index(state)
    v = d.variable(var)
    return _distribution(v, np.bincount(d.column(var)[mask], minlength=v.arity))
