import logging
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .graph import Graph
from .ppr import ScoreMap
from .simexceptions import *
from .utils import as_node

"""
The similarity measures FBS is compared with: the Adamic Adar index, personalized SALSA
and a Monte Carlo estimate of SimRank.
"""

__all__ = [
    'SalsaConfig', 'SimRankConfig', 'adamic_adar', 'adamic_adar_scores', 'psalsa',
    'simrank_samples', 'simrank_mc',
]

logger = logging.getLogger(__name__)

# upper bound on walker positions held in memory at once by the SimRank sampler
_SIMRANK_BATCH_CELLS = 2_000_000


def _check_iteration(name, rate, tolerance, max_iterations):
    if not 0 < rate <= 1:
        raise InvalidConfigException("{} should be in (0, 1], got {}".format(name, rate))
    if not tolerance > 0:
        raise InvalidConfigException("tolerance should be positive, got {}".format(tolerance))
    if isinstance(max_iterations, bool) or not isinstance(max_iterations, int) or max_iterations < 1:
        raise InvalidConfigException("max_iterations should be a positive integer, got {}".format(max_iterations))


@dataclass(frozen=True)
class SalsaConfig:
    alpha: float = 0.15
    tolerance: float = 1e-6
    max_iterations: int = 1000

    def __post_init__(self):
        _check_iteration('alpha', self.alpha, self.tolerance, self.max_iterations)


@dataclass(frozen=True)
class SimRankConfig:

    """
    c: decay applied per step before two walks meet.
    T: maximum walk length.
    R: number of sampled walk pairs.
    seed: seed of the random generator.
    """

    c: float = 0.8
    T: int = 100
    R: int = 10000
    seed: int = 42

    def __post_init__(self):
        if not 0 < self.c < 1:
            raise InvalidConfigException("c should be in (0, 1), got {}".format(self.c))
        for name in ('T', 'R'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise InvalidConfigException("{} should be a positive integer, got {}".format(name, value))


def _inverse_log_degrees(g: Graph) -> np.ndarray:
    degrees = np.diff(g.undirected_adjacency.indptr).astype(np.float64)
    weights = np.zeros_like(degrees)
    mask = degrees > 1
    weights[mask] = 1.0 / np.log(degrees[mask])
    return weights


def adamic_adar(g: Graph, u: int, v: int) -> float:
    """
    Sums 1 / ln(degree) over the common neighbors of u and v in the undirected projection
    of g. The index of a node with itself is 0.
    """
    u = as_node(u, g.node_count)
    v = as_node(v, g.node_count)
    if u == v:
        return 0.0
    common = np.intersect1d(g.neighbors(u), g.neighbors(v), assume_unique=True)
    return float(_inverse_log_degrees(g)[common].sum())


def adamic_adar_scores(g: Graph, u: int) -> ScoreMap:
    """
    :returns: the Adamic Adar index of u with every node, computed at once.
    """
    u = as_node(u, g.node_count)
    projection = g.undirected_adjacency
    neighbors = np.zeros(g.node_count)
    neighbors[g.neighbors(u)] = 1.0
    scores = projection @ (neighbors * _inverse_log_degrees(g))
    scores[u] = 0.0
    return ScoreMap(u, scores, g.node_labels)


def psalsa(g: Graph, u: int, cfg: SalsaConfig = SalsaConfig()) -> ScoreMap:
    """
    Personalized SALSA: a walk alternating between a hub side and an authority side.
    From a hub x, the walker restarts at the hub u with probability alpha, and otherwise
    follows an out-edge of x to an authority (hubs without out-edges send it back to u).
    From an authority v it follows an in-edge of v backwards to a hub.

    The query reports its hub mass, every other node its authority mass; the vector is
    normalized to sum to 1.

    :raises NonConvergenceException: if the hub distribution does not converge.
    """
    u = as_node(u, g.node_count)
    carry = 1 - cfg.alpha
    to_authority = g.propagation_matrix
    in_degrees = g.in_degrees.astype(np.float64)
    inverse_in = np.divide(1.0, in_degrees, out=np.zeros_like(in_degrees), where=in_degrees > 0)
    dangling = g.dangling

    hubs = np.zeros(g.node_count)
    hubs[u] = 1.0
    residual = float('inf')
    for iteration in range(1, cfg.max_iterations + 1):
        authorities = carry * (to_authority @ hubs)
        following = g.out_adjacency @ (authorities * inverse_in)
        following[u] += cfg.alpha + carry * hubs[dangling].sum()
        residual = float(np.abs(following - hubs).sum())
        hubs = following
        if residual <= cfg.tolerance:
            logger.debug("psalsa from %d converged after %d iterations", u, iteration)
            break
    else:
        raise NonConvergenceException(hubs, residual, cfg.max_iterations)

    reported = carry * (to_authority @ hubs)
    reported[u] = hubs[u]
    return ScoreMap(u, reported / reported.sum(), g.node_labels, iteration, residual)


def _reverse_step(positions: np.ndarray, g: Graph, rng: np.random.Generator) -> np.ndarray:
    """Moves every walker to a uniformly chosen predecessor, -1 marking halted walkers."""
    indptr, indices = g.in_adjacency.indptr, g.in_adjacency.indices
    following = np.full(positions.shape, -1, dtype=np.int64)
    alive = positions >= 0
    current = positions[alive]
    degrees = np.diff(indptr)[current]
    picks = (rng.random(current.shape) * degrees).astype(np.int64)
    moving = degrees > 0
    targets = np.full(current.shape, -1, dtype=np.int64)
    targets[moving] = indices[indptr[current[moving]] + picks[moving]]
    following[alive] = targets
    return following


def _meeting_weights(g: Graph, u: int, walks: int, cfg: SimRankConfig,
                     rng: np.random.Generator) -> np.ndarray:
    """
    Runs `walks` reverse walks from u, each paired with one reverse walk from every node,
    and returns c ** (first meeting step), 0 when the pair never meets.
    """
    weights = np.zeros((walks, g.node_count))
    met = np.zeros((walks, g.node_count), dtype=bool)
    from_query = np.full(walks, u, dtype=np.int64)
    from_nodes = np.tile(np.arange(g.node_count, dtype=np.int64), (walks, 1))
    for step in range(1, cfg.T + 1):
        from_query = _reverse_step(from_query, g, rng)
        from_nodes = _reverse_step(from_nodes, g, rng)
        meeting = ~met & (from_nodes == from_query[:, None]) & (from_query[:, None] >= 0)
        weights[meeting] = cfg.c ** step
        met |= meeting
        if not (from_query >= 0).any() or (met | (from_nodes < 0)).all():
            break
    weights[:, u] = 1.0
    return weights


def _batches(g: Graph, cfg: SimRankConfig) -> Iterator[int]:
    size = max(1, min(cfg.R, _SIMRANK_BATCH_CELLS // max(g.node_count, 1)))
    for start in range(0, cfg.R, size):
        yield min(size, cfg.R - start)


def simrank_samples(g: Graph, u: int, cfg: SimRankConfig = SimRankConfig()) -> np.ndarray:
    """
    :returns: an (R, node_count) array, row r holding the meeting weight of walk pair r
        for every node. Only meant for small graphs.
    """
    u = as_node(u, g.node_count)
    rng = np.random.default_rng(cfg.seed)
    return np.concatenate([_meeting_weights(g, u, walks, cfg, rng) for walks in _batches(g, cfg)])


def simrank_mc(g: Graph, u: int, cfg: SimRankConfig = SimRankConfig()) -> ScoreMap:
    """
    Estimates the SimRank of u with every node as the mean of c ** tau over R pairs of
    independent walks following in-edges, tau being the first step at which both walks
    stand on the same node. Walks stop after T steps or at a node without in-edges.
    The estimate of u with itself is exactly 1.
    """
    u = as_node(u, g.node_count)
    rng = np.random.default_rng(cfg.seed)
    total = np.zeros(g.node_count)
    for walks in _batches(g, cfg):
        total += _meeting_weights(g, u, walks, cfg, rng).sum(axis=0)
    scores = total / cfg.R
    scores[u] = 1.0
    return ScoreMap(u, scores, g.node_labels)
