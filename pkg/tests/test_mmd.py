from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_dataset, table_dataset
from oracles import mmd_conditional_terms, mmd_terms
from saiyanh.data import Dataset, Variable, from_records
from saiyanh.mmd import Label, build_mmd_table, classify_triple, mmd_conditional, mmd_pair

# frozen from oracles.mmd_terms on the 20-row fixture
FIXTURE20_MMD = Fraction(1409, 11880)
# frozen from oracles.mmd_conditional_terms on COLLIDER_ROWS, (A, B | C)
COLLIDER_CONDITIONAL = Fraction(45, 448)

COLLIDER_ROWS = list(zip(
    "0 0 0 0 1 1 1 1 0 0 1 1 0 1 0 1".split(),
    "0 0 1 1 0 0 1 1 0 1 0 1 1 0 0 1".split(),
    "0 0 1 1 1 1 1 1 0 1 0 1 0 1 1 1".split(),
))


@pytest.mark.parametrize("counts", [[[1, 1], [2, 2]], [[2, 4], [1, 2], [3, 6]], [[5, 5, 10]] * 3])
def test_population_independence_is_zero(counts):
    assert mmd_pair(table_dataset(counts), "A", "B") == 0.0


def test_uniform_copy_is_half():
    assert mmd_pair(table_dataset([[7, 0], [0, 7]]), "A", "B") == 0.5


def test_fixture20_matches_term_oracle(fixture20):
    rows = list(zip(fixture20.column("X").tolist(), fixture20.column("Y").tolist()))
    assert mmd_terms(rows, 0, 1) == FIXTURE20_MMD
    assert mmd_pair(fixture20, "X", "Y") == pytest.approx(float(FIXTURE20_MMD), abs=1e-12)


def test_conditional_with_irrelevant_stratum():
    # A-B table [[3,1],[1,3]] repeated in both C strata, with C weights 1:2
    counts = np.zeros((2, 2, 2), dtype=int)
    counts[:, :, 0] = [[3, 1], [1, 3]]
    counts[:, :, 1] = [[6, 2], [2, 6]]
    d = table_dataset(counts, names=("A", "B", "C"))
    assert mmd_conditional(d, "A", "B", "C") == pytest.approx(mmd_pair(d, "A", "B"), abs=1e-15)


def test_conditional_through_mediator_is_zero():
    # A -> C -> B with exact within-stratum independence of A and B
    counts = np.zeros((2, 2, 2), dtype=int)
    counts[:, :, 0] = np.outer([4, 1], [3, 1])
    counts[:, :, 1] = np.outer([1, 4], [1, 3])
    d = table_dataset(counts, names=("A", "B", "C"))
    assert mmd_pair(d, "A", "B") > 0
    assert mmd_conditional(d, "A", "B", "C") == 0.0


def test_collider_fixture_matches_oracle():
    assert mmd_conditional_terms(COLLIDER_ROWS, 0, 1, 2) == COLLIDER_CONDITIONAL
    d = from_records(["A", "B", "C"], COLLIDER_ROWS)
    assert mmd_pair(d, "A", "B") == 0.0
    assert mmd_conditional(d, "A", "B", "C") == pytest.approx(float(COLLIDER_CONDITIONAL), abs=1e-12)


@pytest.mark.parametrize("marg,cond,label", [
    (0.10, 0.20, Label.CD), (0.10, 0.04, Label.CI), (0.10, 0.06, Label.INSIGNIFICANT),
    (0.03, 0.06, Label.CD), (0.02, 0.03, Label.INSIGNIFICANT), (0.05, 0.075, Label.INSIGNIFICANT),
    (0.10, 0.05, Label.INSIGNIFICANT), (0.02, 0.01, Label.INSIGNIFICANT),
])
def test_classify(marg, cond, label):
    assert classify_triple(marg, cond) is label


@given(st.floats(0, 1), st.floats(0, 1))
def test_label_threshold_consistency(marg, cond):
    label = classify_triple(marg, cond)
    if label is Label.CI:
        assert cond < 0.05
    if label is Label.CD:
        assert cond > 0.05


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 30))
def test_symmetry_bounds_and_oracle(seed, n_rows):
    rng = np.random.default_rng(seed)
    d = random_dataset(rng, 3, n_rows, max_states=4)
    a, b, c = d.names
    s = mmd_pair(d, a, b)
    assert s == mmd_pair(d, b, a)
    assert 0.0 <= s <= 1.0
    rows = d.codes.tolist()
    assert s == pytest.approx(float(mmd_terms(rows, 0, 1)), abs=1e-12)
    sc = mmd_conditional(d, a, b, c)
    assert 0.0 <= sc <= 1.0
    assert sc == mmd_conditional(d, b, a, c)
    assert sc == pytest.approx(float(mmd_conditional_terms(rows, 0, 1, 2)), abs=1e-12)


@pytest.mark.parametrize("v,pairs,triples", [(2, 1, 0), (8, 28, 168), (37, 666, 23_310)])
def test_test_counts(v, pairs, triples):
    rng = np.random.default_rng(v)
    table = build_mmd_table(random_dataset(rng, v, 12, max_states=2))
    assert (table.pair_tests, table.triple_tests) == (pairs, triples)
    assert len(table.pair_score) == pairs and len(table.triple_score) == triples
    assert not set(table.cd) & set(table.ci)
