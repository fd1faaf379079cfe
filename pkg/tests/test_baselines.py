import math

import networkx as nx
import numpy as np
import pytest

from fbsim import *
from fbsim.utils import labelled_groups, tie_groups
from conftest import random_graphs


def salsa_chain_oracle(g: Graph, u: int, alpha: float = 0.15) -> np.ndarray:
    """
    Stationary distribution of the walk on hub copies 0..n-1 and authority copies
    n..2n-1, reported as the hub mass of u and the authority mass of every other node.
    """
    n = g.node_count
    chain = np.zeros((2 * n, 2 * n))
    for x in range(n):
        successors = list(g.successors(x))
        chain[x, u] += alpha
        if successors:
            for v in successors:
                chain[x, n + v] += (1 - alpha) / len(successors)
        else:
            chain[x, u] += 1 - alpha
        predecessors = list(g.predecessors(x))
        for w in predecessors:
            chain[n + x, w] += 1.0 / len(predecessors)
        if not predecessors:
            chain[n + x, n + x] = 1.0
    system = np.vstack([chain.T - np.eye(2 * n), np.ones(2 * n)])
    target = np.zeros(2 * n + 1)
    target[-1] = 1.0
    # the walk from hub u never enters an authority copy without predecessors
    reachable = np.zeros(2 * n, dtype=bool)
    reachable[u] = True
    frontier = [u]
    while frontier:
        state = frontier.pop()
        for following in np.nonzero(chain[state])[0]:
            if not reachable[following]:
                reachable[following] = True
                frontier.append(following)
    keep = np.append(reachable, True)
    stationary = np.zeros(2 * n)
    stationary[reachable] = np.linalg.lstsq(system[np.ix_(keep, reachable)], target[keep], rcond=None)[0]
    reported = stationary[n:].copy()
    reported[u] = stationary[u]
    return reported / reported.sum()


def simrank_oracle(g: Graph, u: int, c: float = 0.8) -> np.ndarray:
    nxg = nx.DiGraph() if g.directed else nx.Graph()
    nxg.add_nodes_from(range(g.node_count))
    nxg.add_edges_from(g.edges())
    similarity = nx.simrank_similarity(nxg, source=u, importance_factor=c, max_iterations=1000, tolerance=1e-8)
    return np.array([similarity[v] for v in range(g.node_count)])


def test_adamic_adar_example(example):
    g, rankings = example
    G, D, A, E, I, H = (g.node_id(label) for label in "GDAEIH")
    assert adamic_adar(g, G, D) == pytest.approx(2 / math.log(2))
    assert adamic_adar(g, G, A) == pytest.approx(1 / math.log(6))
    assert adamic_adar(g, G, E) == pytest.approx(1 / math.log(6))
    assert adamic_adar(g, G, I) == pytest.approx(1 / math.log(7))
    assert adamic_adar(g, G, H) == 0.0
    assert adamic_adar(g, G, G) == 0.0
    scores = adamic_adar_scores(g, G)
    groups = labelled_groups(tie_groups(scores.ranked(include_zero=True), scores.scores), g.labels)
    assert groups == rankings['adamic-adar']


def test_adamic_adar_is_symmetric():
    for g in random_graphs(10, seed=30):
        for u in range(g.node_count):
            for v in range(g.node_count):
                assert adamic_adar(g, u, v) == pytest.approx(adamic_adar(g, v, u))


def test_adamic_adar_scores_match_pairs():
    for g in random_graphs(10, seed=31):
        for u in range(g.node_count):
            scores = adamic_adar_scores(g, u)
            for v in range(g.node_count):
                assert scores[v] == pytest.approx(adamic_adar(g, u, v))


def test_adamic_adar_ignores_degree_one_neighbors():
    star = Graph(3, [(0, 1), (0, 2)], directed=False)
    assert adamic_adar(star, 1, 2) == pytest.approx(1 / math.log(2))
    path = Graph(3, [(0, 1), (1, 2)])
    assert adamic_adar(path, 0, 2) == pytest.approx(1 / math.log(2))
    assert adamic_adar(path, 0, 1) == 0.0


def test_psalsa_example(example):
    g, rankings = example
    scores = psalsa(g, g.node_id('G'))
    groups = labelled_groups(tie_groups(scores.ranked(include_zero=True), scores.scores), g.labels)
    assert groups == rankings['psalsa']
    assert scores.total == pytest.approx(1.0)


def test_psalsa_matches_chain():
    for g in random_graphs(30, seed=32):
        for u in (0, g.node_count - 1):
            scores = psalsa(g, u, SalsaConfig(tolerance=1e-10))
            assert scores.scores == pytest.approx(salsa_chain_oracle(g, u), abs=1e-6)


def test_psalsa_without_out_edges():
    g = Graph(3, [(1, 0), (2, 0)])
    scores = psalsa(g, 0)
    assert list(scores.scores) == [1.0, 0.0, 0.0]


def test_psalsa_full_restart(example):
    g, _ = example
    G = g.node_id('G')
    scores = psalsa(g, G, SalsaConfig(alpha=1.0))
    assert scores[G] == 1.0
    assert scores.total == 1.0


def test_psalsa_non_convergence(example):
    g, _ = example
    with pytest.raises(NonConvergenceException):
        psalsa(g, g.node_id('G'), SalsaConfig(max_iterations=1))


def test_simrank_example(example):
    g, _ = example
    G = g.node_id('G')
    scores = simrank_mc(g, G, SimRankConfig(R=500))
    assert scores[G] == 1.0
    assert scores.total == 1.0


def test_simrank_example_on_the_undirected_projection(example):
    g, rankings = example
    projection = Graph(g.node_count, list(g.edges()), directed=False, node_labels=g.labels)
    G = g.node_id('G')
    exact = simrank_oracle(projection, G)
    scores = {v: exact[v] for v in range(g.node_count)}
    ordered = sorted(scores, key=lambda v: (-scores[v], v))
    expected = list(rankings['simrank'])
    expected[1], expected[2] = expected[2], expected[1]
    assert labelled_groups(tie_groups(ordered, scores), g.labels) == expected
    assert exact[g.node_id('A')] == pytest.approx(0.331, abs=1e-3)
    assert exact[g.node_id('I')] == pytest.approx(0.318, abs=1e-3)
    assert simrank_mc(projection, G).scores == pytest.approx(exact, abs=0.05)


def test_simrank_matches_fixed_point():
    for g in random_graphs(8, seed=33, max_nodes=8, density=0.35):
        estimate = simrank_mc(g, 0, SimRankConfig(R=10000, T=50))
        assert estimate.scores == pytest.approx(simrank_oracle(g, 0), abs=0.05)


def test_simrank_is_roughly_symmetric():
    g = Graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (1, 4)])
    cfg = SimRankConfig(R=4000)
    for a, b in ((0, 3), (1, 4), (2, 4)):
        forward = simrank_samples(g, a, cfg)[:, b]
        backward = simrank_samples(g, b, cfg)[:, a]
        errors = math.hypot(forward.std() / math.sqrt(cfg.R), backward.std() / math.sqrt(cfg.R))
        assert abs(forward.mean() - backward.mean()) <= 4 * errors + 1e-12


def test_simrank_is_deterministic(example):
    g, _ = example
    cfg = SimRankConfig(R=300, seed=7)
    D = g.node_id('D')
    assert np.array_equal(simrank_mc(g, D, cfg).scores, simrank_mc(g, D, cfg).scores)
    assert simrank_samples(g, D, cfg).mean(axis=0) == pytest.approx(simrank_mc(g, D, cfg).scores)


def test_simrank_bounds():
    for g in random_graphs(5, seed=34):
        scores = simrank_mc(g, 0, SimRankConfig(R=200)).scores
        assert ((scores >= 0) & (scores <= 1)).all()
        assert scores[0] == 1.0


def test_invalid_configs():
    for kwargs in ({'alpha': 0}, {'tolerance': -1}, {'max_iterations': 0}):
        with pytest.raises(InvalidConfigException):
            SalsaConfig(**kwargs)
    for kwargs in ({'c': 1.0}, {'c': 0}, {'T': 0}, {'R': 2.5}):
        with pytest.raises(InvalidConfigException):
            SimRankConfig(**kwargs)
