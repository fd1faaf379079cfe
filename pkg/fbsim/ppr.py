import io
import logging
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .graph import Graph
from .simexceptions import *
from .utils import as_node, rank_scores

"""
Personalized PageRank by power iteration.

The score of v for the query u is the fixed point of
    pi(v) = epsilon * [v == u] + (1 - epsilon) * sum over edges x -> v of pi(x) / deg+(x)
started from the indicator of u. Nodes without successors lose their walk mass in that
recurrence; PprConfig.dangling decides where it goes.
"""

__all__ = ['DANGLING_POLICIES', 'PprConfig', 'ScoreMap', 'ppr_iterates', 'ppr', 'ppr_rank']

logger = logging.getLogger(__name__)

DANGLING_POLICIES = ('query', 'uniform', 'leak')


@dataclass(frozen=True)
class PprConfig:

    """
    epsilon: reset probability, the walker jumps back to the query with this probability.
    tolerance: L1 distance between two iterates under which the iteration stops.
    max_iterations: iterations allowed before giving up.
    dangling: 'query' sends the mass of nodes without successors back to the query,
        'uniform' spreads it over every node, 'leak' drops it.
    """

    epsilon: float = 0.15
    tolerance: float = 1e-6
    max_iterations: int = 1000
    dangling: str = 'query'

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise InvalidConfigException("epsilon should be in (0, 1], got {}".format(self.epsilon))
        if not self.tolerance > 0:
            raise InvalidConfigException("tolerance should be positive, got {}".format(self.tolerance))
        if isinstance(self.max_iterations, bool) or not isinstance(self.max_iterations, int) \
                or self.max_iterations < 1:
            raise InvalidConfigException(
                "max_iterations should be a positive integer, got {}".format(self.max_iterations))
        if self.dangling not in DANGLING_POLICIES:
            raise InvalidConfigException("dangling should be one of {}, got {!r}".format(
                ", ".join(DANGLING_POLICIES), self.dangling))


class ScoreMap:

    """
    The scores of every node of a graph for one query node.
    """

    def __init__(self, query: int, scores: np.ndarray, labels: Optional[tuple] = None,
                 iterations: int = 0, residual: float = 0.0) -> None:
        scores = np.array(scores, dtype=np.float64)
        if scores.ndim != 1:
            raise ValueError("scores should be a vector")
        if scores.size and scores.min() < 0:
            raise ValueError("scores can't be negative")
        scores.setflags(write=False)
        self.__query = as_node(query, scores.size)
        self.__scores = scores
        self.__labels = labels
        self.iterations = iterations
        self.residual = residual

    @property
    def query(self) -> int:
        return self.__query

    @property
    def scores(self) -> np.ndarray:
        """
        :returns: a read-only vector indexed by node id.
        """
        return self.__scores

    def __getitem__(self, node: int) -> float:
        return float(self.__scores[as_node(node, self.__scores.size)])

    def __len__(self) -> int:
        return self.__scores.size

    @property
    def total(self) -> float:
        return float(self.__scores.sum())

    def ranked(self, include_zero: bool = False) -> list[int]:
        """
        :returns: node ids by score descending, ties by ascending id.
        """
        return rank_scores(self.__scores, include_zero=include_zero)

    def top(self, k: int, include_zero: bool = False) -> list[tuple[int, float]]:
        if k < 0:
            raise ValueError("k can't be negative")
        return [(node, float(self.__scores[node])) for node in self.ranked(include_zero)[:k]]

    def label(self, node: int) -> str:
        return self.__labels[node] if self.__labels is not None else str(node)

    def to_tsv(self, stream, k: Optional[int] = None, include_zero: bool = False) -> None:
        """
        Writes `label<TAB>score` lines in rank order.
        """
        ranking = self.ranked(include_zero)
        if k is not None:
            ranking = ranking[:k]
        lines = "".join("{}\t{:.10g}\n".format(self.label(node), self.__scores[node]) for node in ranking)
        if isinstance(stream, io.TextIOBase):
            stream.write(lines)
        else:
            stream.write(lines.encode('utf-8'))

    def __repr__(self) -> str:
        return "<ScoreMap query={} nodes={}>".format(self.__query, self.__scores.size)


def ppr_iterates(g: Graph, u: int, cfg: PprConfig = PprConfig()) -> Iterator[tuple[np.ndarray, float]]:
    """
    Runs the power iteration and yields every (iterate, L1 residual) pair, the first being
    the indicator vector of u with an infinite residual. Stops after max_iterations steps.
    """
    u = as_node(u, g.node_count)
    matrix = g.propagation_matrix
    dangling = g.dangling
    carry = 1 - cfg.epsilon
    current = np.zeros(g.node_count)
    current[u] = 1.0
    yield current, float('inf')
    for _ in range(cfg.max_iterations):
        following = carry * (matrix @ current)
        leaked = carry * current[dangling].sum()
        if cfg.dangling == 'query':
            following[u] += leaked
        elif cfg.dangling == 'uniform':
            following += leaked / g.node_count
        following[u] += cfg.epsilon
        residual = float(np.abs(following - current).sum())
        current = following
        yield current, residual


def ppr(g: Graph, u: int, cfg: PprConfig = PprConfig()) -> ScoreMap:
    """
    :param g: the graph.
    :param u: the query node id.
    :param cfg: the iteration parameters.
    :returns: the personalized PageRank scores of every node for u.
    :raises NonConvergenceException: if the residual is still above the tolerance after
        cfg.max_iterations iterations.
    """
    iterations = 0
    for iterate, residual in ppr_iterates(g, u, cfg):
        if residual <= cfg.tolerance:
            logger.debug("ppr from %d converged after %d iterations", u, iterations)
            return ScoreMap(u, iterate, g.node_labels, iterations, residual)
        iterations += 1
    raise NonConvergenceException(iterate, residual, cfg.max_iterations)


def ppr_rank(g: Graph, u: int, cfg: PprConfig = PprConfig()) -> list[int]:
    """
    :returns: the nodes with a positive score for u, best first, ties by ascending id.
    """
    return ppr(g, u, cfg).ranked()
