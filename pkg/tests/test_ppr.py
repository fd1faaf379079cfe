import io

import numpy as np
import pytest

from fbsim import *
from fbsim.utils import labelled_groups, tie_groups
from conftest import dense_ppr, random_graphs


def test_single_node():
    scores = ppr(Graph(1, []), 0)
    assert scores[0] == pytest.approx(1.0)


def test_two_cycle(two_cycle):
    scores = ppr(two_cycle, 0)
    assert scores[0] == pytest.approx(0.15 / (1 - 0.85 ** 2), abs=1e-5)
    assert scores[0] == pytest.approx(0.540541, abs=1e-5)
    assert scores[1] == pytest.approx(0.459459, abs=1e-5)
    assert ppr_rank(two_cycle, 0) == [0, 1]


def test_example_ties(example):
    g, _ = example
    scores = ppr(g, g.node_id('G'))
    E, F, H = (g.node_id(label) for label in "EFH")
    assert scores[E] == pytest.approx(scores[F], abs=1e-12)
    assert scores[E] == pytest.approx(scores[H], abs=1e-12)


def test_example_ranking(example):
    g, rankings = example
    scores = ppr(g, g.node_id('G'))
    groups = labelled_groups(tie_groups(scores.ranked(include_zero=True), scores.scores), g.labels)
    assert groups == rankings['ppr']


def test_example_ranking_leaking_dangling_mass(example):
    g, rankings = example
    scores = ppr(g, g.node_id('G'), PprConfig(dangling='leak'))
    groups = labelled_groups(tie_groups(scores.ranked(include_zero=True), scores.scores), g.labels)
    assert groups == rankings['ppr']
    assert scores.total < 1
    assert scores[g.node_id('G')] == pytest.approx(0.15)


def test_query_ranks_first(example):
    g, _ = example
    for label in "GDH":
        u = g.node_id(label)
        assert ppr_rank(g, u)[0] == u


def test_matches_linear_system():
    for g in random_graphs(50, seed=10):
        for u in (0, g.node_count - 1):
            expected = dense_ppr(g, u)
            assert ppr(g, u, PprConfig(tolerance=1e-10)).scores == pytest.approx(expected, abs=1e-6)
            assert ppr(g, u).scores == pytest.approx(expected, abs=1e-5)


def test_matches_linear_system_undirected():
    for g in random_graphs(20, seed=11, directed=False):
        assert ppr(g, 0, PprConfig(tolerance=1e-10)).scores == pytest.approx(dense_ppr(g, 0), abs=1e-6)


def test_iterates_are_distributions():
    for g in random_graphs(20, seed=12):
        for iterate, _ in ppr_iterates(g, 0, PprConfig(max_iterations=50)):
            assert iterate.sum() == pytest.approx(1.0, abs=1e-9)
    for g in random_graphs(10, seed=13):
        for iterate, _ in ppr_iterates(g, 0, PprConfig(max_iterations=50, dangling='uniform')):
            assert iterate.sum() == pytest.approx(1.0, abs=1e-9)


def test_residual_does_not_increase():
    for g in random_graphs(20, seed=14):
        residuals = [residual for _, residual in ppr_iterates(g, 0, PprConfig(max_iterations=60))]
        for before, after in zip(residuals, residuals[1:]):
            assert after <= before + 1e-15


def test_full_reset_is_the_indicator(example):
    g, _ = example
    u = g.node_id('D')
    expected = np.zeros(g.node_count)
    expected[u] = 1.0
    assert np.array_equal(ppr(g, u, PprConfig(epsilon=1.0)).scores, expected)


def test_non_convergence(two_cycle):
    with pytest.raises(NonConvergenceException) as info:
        ppr(two_cycle, 0, PprConfig(max_iterations=2))
    assert info.value.residual > 1e-6
    assert info.value.iterations == 2
    assert info.value.iterate.sum() == pytest.approx(1.0)


def test_invalid_configs():
    for kwargs in ({'epsilon': 0}, {'epsilon': 1.5}, {'tolerance': 0}, {'max_iterations': 0},
                   {'max_iterations': 1.5}, {'dangling': 'self-loop'}):
        with pytest.raises(InvalidConfigException):
            PprConfig(**kwargs)


def test_invalid_query(two_cycle):
    with pytest.raises(IndexError):
        ppr(two_cycle, 2)
    with pytest.raises(TypeError):
        ppr(two_cycle, 'a')


def test_score_map(example):
    g, _ = example
    scores = ppr(g, g.node_id('G'))
    assert not scores.scores.flags.writeable
    with pytest.raises(ValueError):
        scores.scores[0] = 1.0
    assert len(scores) == 14
    assert scores.top(2) == [(6, scores[6]), (3, scores[3])]
    stream = io.StringIO()
    scores.to_tsv(stream, k=3)
    lines = stream.getvalue().splitlines()
    assert len(lines) == 3
    assert lines[0].split('\t')[0] == 'G'
    assert lines[1].split('\t')[0] == 'D'


def test_ranking_leaves_out_zero_scores(example):
    g, _ = example
    ranking = ppr_rank(g, g.node_id('G'))
    assert len(ranking) == 11
    assert not {g.node_id(label) for label in "LMN"} & set(ranking)
