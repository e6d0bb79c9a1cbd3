import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from saiyanh.data import Dataset, Variable, from_records  # noqa: E402

# 20 rows, X in {a,b,c} (9/6/5), Y in {x,y} (11/9)
FIXTURE_X = "a a b c a b b c a c a b a a c b b a c a".split()
FIXTURE_Y = "x y y x x y x x x y y y x x y y x x x y".split()


@pytest.fixture
def fixture20():
    return from_records(["X", "Y"], zip(FIXTURE_X, FIXTURE_Y))


def table_dataset(counts, names=("A", "B")):
    """Dataset whose rows realise an exact contingency table of counts."""
    counts = np.asarray(counts)
    variables = tuple(
        Variable(n, tuple(f"s{k}" for k in range(r))) for n, r in zip(names, counts.shape)
    )
    rows = []
    for idx in np.ndindex(counts.shape):
        rows += [idx] * int(counts[idx])
    return Dataset(variables, np.array(rows, dtype=np.int64).reshape(-1, len(names)))


def random_dataset(rng, n_vars, n_rows, max_states=3):
    arities = [int(rng.integers(2, max_states + 1)) for _ in range(n_vars)]
    variables = tuple(
        Variable(f"V{i}", tuple(str(k) for k in range(r))) for i, r in enumerate(arities)
    )
    codes = np.column_stack([rng.integers(0, r, n_rows) for r in arities])
    return Dataset(variables, codes)


def random_bn_data(seed, n_vars=4, n_rows=None):
    """Data from a random connected chain-like BN with random binary CPTs."""
    rng = np.random.default_rng(seed)
    n = n_rows or int(rng.integers(50, 500))
    x = np.zeros((n, n_vars), dtype=np.int64)
    for v in range(n_vars):
        parents = [p for p in range(v) if p == v - 1 or rng.random() < 0.3]
        logit = rng.normal(0, 0.5) + sum(rng.normal(0, 2.5) * (2 * x[:, p] - 1) for p in parents)
        x[:, v] = rng.random(n) < 1 / (1 + np.exp(-logit))
    names = tuple(f"V{i}" for i in range(n_vars))
    return Dataset(tuple(Variable(v, ("0", "1")) for v in names), x)
