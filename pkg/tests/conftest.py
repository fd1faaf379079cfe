import numpy as np
import pytest

from fbsim import Graph, fig1_graph


@pytest.fixture
def example():
    g, rankings = fig1_graph()
    return g, rankings


@pytest.fixture
def two_cycle():
    return Graph(2, [(0, 1), (1, 0)])


def random_graph(rng: np.random.Generator, max_nodes: int = 12, directed: bool = True,
                 density: float = 0.25) -> Graph:
    node_count = int(rng.integers(2, max_nodes + 1))
    mask = rng.random((node_count, node_count)) < density
    edges = list(zip(*np.nonzero(mask)))
    return Graph(node_count, [(int(u), int(v)) for u, v in edges], directed=directed)


def random_graphs(count: int, seed: int = 0, **kwargs) -> list[Graph]:
    rng = np.random.default_rng(seed)
    return [random_graph(rng, **kwargs) for _ in range(count)]


def dense_ppr(g: Graph, u: int, epsilon: float = 0.15) -> np.ndarray:
    """Solves the PageRank linear system directly, dangling mass going back to u."""
    n = g.node_count
    walk = np.zeros((n, n))
    for x, v in g.edges():
        walk[v, x] += 1.0 / g.out_degrees[x]
        if not g.directed and x != v:
            walk[x, v] += 1.0 / g.out_degrees[v]
    for x in np.nonzero(g.out_degrees == 0)[0]:
        walk[u, x] = 1.0
    restart = np.zeros(n)
    restart[u] = epsilon
    return np.linalg.solve(np.eye(n) - (1 - epsilon) * walk, restart)
