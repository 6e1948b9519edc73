import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from oracles import ranks_oracle, wilcoxon_exact_oracle
from tdeclf.exceptions import IncompleteMatrixError
from tdeclf.stats import (
    format_report,
    holm_adjust,
    mean_ranks_and_cliques,
    parse_report,
    rank_rows,
    wilcoxon_signed_rank,
)


def test_wilcoxon_all_positive_six():
    a = np.array([1.0, 2, 3, 4, 5, 6])
    assert wilcoxon_signed_rank(a + np.arange(1, 7) * 0.01, a) == 0.03125


def test_wilcoxon_equal_inputs():
    a = np.arange(8.0)
    assert wilcoxon_signed_rank(a, a) == 1.0


def test_wilcoxon_needs_five_pairs():
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1, 2, 3, 4], [0, 0, 0, 0])


@given(st.lists(st.integers(-4, 4), min_size=5, max_size=12))
@settings(max_examples=80, deadline=None)
def test_wilcoxon_matches_enumeration(diffs):
    d = np.array(diffs, dtype=float)
    p = wilcoxon_signed_rank(d, np.zeros_like(d))
    assert p == pytest.approx(wilcoxon_exact_oracle(diffs), abs=1e-12)
    assert p == pytest.approx(wilcoxon_signed_rank(np.zeros_like(d), d), abs=1e-12)


@given(st.integers(0, 2**31))
@settings(max_examples=30, deadline=None)
def test_wilcoxon_normal_branch_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=40), rng.normal(size=40) + 0.2
    ours = wilcoxon_signed_rank(a, b)
    ref = sps.wilcoxon(a, b, method="approx", correction=False).pvalue
    assert ours == pytest.approx(ref, rel=1e-9)


def test_wilcoxon_exact_matches_scipy_without_ties(rng):
    for _ in range(20):
        a, b = rng.normal(size=12), rng.normal(size=12)
        assert wilcoxon_signed_rank(a, b) == pytest.approx(
            sps.wilcoxon(a, b, method="exact").pvalue, rel=1e-12)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=15))
def test_holm_properties(p):
    p = np.array(p)
    adj = holm_adjust(p)
    assert np.all(adj >= p - 1e-15) and np.all(adj <= 1.0)
    order = np.argsort(p, kind="stable")
    assert np.all(np.diff(adj[order]) >= 0)
    assert holm_adjust(p[::-1]).tolist() == adj[::-1].tolist()


def test_holm_example():
    np.testing.assert_allclose(holm_adjust([0.01, 0.04, 0.03]), [0.03, 0.06, 0.06])


@given(st.integers(0, 2**31))
@settings(max_examples=40, deadline=None)
def test_ranks_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    scores = rng.integers(0, 5, size=(10, 4)) / 4
    np.testing.assert_array_equal(rank_rows(scores), ranks_oracle(scores))


def test_strict_winner_rank_one():
    scores = np.array([[0.9, 0.5, 0.1], [0.8, 0.7, 0.75], [1.0, 0.2, 0.3]] * 3)
    report = mean_ranks_and_cliques(scores, ["a", "b", "c"])
    assert report.mean_ranks["a"] == 1.0


def test_identical_columns_share_rank_and_clique(rng):
    col = rng.random(10)
    scores = np.column_stack([col, col, col - 0.3])
    report = mean_ranks_and_cliques(scores, ["x", "y", "z"])
    assert report.mean_ranks["x"] == report.mean_ranks["y"] == 1.5
    assert any({"x", "y"} <= set(c) for c in report.cliques)
    assert report.adjusted[("x", "y")] == 1.0


def test_clear_difference_splits_cliques(rng):
    base = rng.random(12)
    scores = np.column_stack([base + 0.5, base])
    report = mean_ranks_and_cliques(scores, ["good", "bad"])
    assert report.cliques == [["good"], ["bad"]]


def test_few_datasets_warn_and_never_differ(caplog):
    scores = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
    with caplog.at_level(logging.WARNING):
        report = mean_ranks_and_cliques(scores, ["a", "b"])
    assert report.cliques == [["a", "b"]]
    assert "fewer than" in caplog.text


def test_missing_cell():
    with pytest.raises(IncompleteMatrixError) as info:
        mean_ranks_and_cliques(np.array([[1.0, np.nan]] * 5), ["a", "b"],
                               datasets=list("vwxyz"))
    assert ("v", "b") in info.value.missing


def test_report_round_trip(rng):
    scores = rng.random((8, 3))
    report = mean_ranks_and_cliques(scores, ["a", "b", "c"])
    ranks, cliques = parse_report(format_report(report))
    assert ranks == pytest.approx(report.mean_ranks, abs=1e-6)
    assert cliques == report.cliques
