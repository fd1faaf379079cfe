import io
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .graph import Graph
from .ppr import PprConfig, ppr
from .simexceptions import *
from .utils import as_node

"""
Forward backward similarity.

The forward mode ranks the candidates of a query u by their personalized PageRank score
from u. The backward mode looks at the query from every one of the top n candidates v, on
the graph with reversed edges. A combiner merges the two scores into the final one.
"""

__all__ = [
    'COMBINER_KINDS', 'CombinerSpec', 'FbsConfig', 'FbsCandidate', 'FbsResult', 'CandidateList',
    'forward_mode', 'backward_mode', 'combine_linear', 'combine_saturation', 'fbs_query',
    'fbs_two_feature', 'fbs_pair_features',
]

logger = logging.getLogger(__name__)

COMBINER_KINDS = ('linear', 'saturation')

# (node, forward score) pairs, best first
CandidateList = list[tuple[int, float]]


def combine_linear(fwd: float, bwd: float, lam: float) -> float:
    """
    :returns: lam * fwd + (1 - lam) * bwd
    :raises ValueError: if a score is negative or lam is outside [0, 1].
    """
    if fwd < 0 or bwd < 0:
        raise ValueError("scores can't be negative")
    if not 0 <= lam <= 1:
        raise ValueError("lambda should be in [0, 1], got {}".format(lam))
    return lam * fwd + (1 - lam) * bwd


def combine_saturation(fwd: float, bwd: float, lam: float, k1: float, k2: float) -> float:
    """
    Squashes both scores with x / (x + k) before blending them, which keeps a very large
    score on one side from hiding the other side.

    :returns: lam * fwd / (fwd + k1) + (1 - lam) * bwd / (bwd + k2), a value in [0, 1).
    :raises ValueError: if a score is negative, lam is outside [0, 1] or k1, k2 are not positive.
    """
    if fwd < 0 or bwd < 0:
        raise ValueError("scores can't be negative")
    if not 0 <= lam <= 1:
        raise ValueError("lambda should be in [0, 1], got {}".format(lam))
    if not (k1 > 0 and k2 > 0):
        raise ValueError("k1 and k2 should be positive")
    return lam * fwd / (fwd + k1) + (1 - lam) * bwd / (bwd + k2)


@dataclass(frozen=True)
class CombinerSpec:

    kind: str = 'linear'
    lam: float = 0.5
    k1: float = 0.72
    k2: float = 0.3

    def __post_init__(self):
        if self.kind not in COMBINER_KINDS:
            raise InvalidConfigException("combiner should be one of {}, got {!r}".format(
                ", ".join(COMBINER_KINDS), self.kind))
        if not 0 <= self.lam <= 1:
            raise InvalidConfigException("lambda should be in [0, 1], got {}".format(self.lam))
        if self.kind == 'saturation' and not (self.k1 > 0 and self.k2 > 0):
            raise InvalidConfigException("k1 and k2 should be positive, got {} and {}".format(self.k1, self.k2))

    @classmethod
    def saturation_preset(cls) -> 'CombinerSpec':
        """
        :returns: the saturation combiner tuned on the graded relevance task.
        """
        return cls('saturation', 0.571, 0.72, 0.3)

    def combine(self, fwd: float, bwd: float) -> float:
        if self.kind == 'linear':
            return combine_linear(fwd, bwd, self.lam)
        return combine_saturation(fwd, bwd, self.lam, self.k1, self.k2)


@dataclass(frozen=True)
class FbsConfig:

    """
    n: size of the forward candidate list.
    rounds: maximum number of forward/backward passes.
    """

    n: int = 20
    rounds: int = 1
    ppr: PprConfig = field(default_factory=PprConfig)
    combiner: CombinerSpec = field(default_factory=CombinerSpec)

    def __post_init__(self):
        for name in ('n', 'rounds'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise InvalidConfigException("{} should be a positive integer, got {}".format(name, value))
        if not isinstance(self.ppr, PprConfig):
            raise InvalidConfigException("ppr should be a PprConfig")
        if not isinstance(self.combiner, CombinerSpec):
            raise InvalidConfigException("combiner should be a CombinerSpec")


class FbsCandidate(NamedTuple):
    node: int
    forward: float
    backward: float
    combined: float


def _ordered(candidates: Iterable[FbsCandidate]) -> tuple[FbsCandidate, ...]:
    return tuple(sorted(candidates, key=lambda c: (-c.combined, c.node)))


class FbsResult:

    """
    The candidates of one query with their forward, backward and combined scores,
    ordered by combined score descending, ties by ascending node id.
    """

    def __init__(self, query: int, candidates: Iterable[FbsCandidate], node_count: int,
                 combiner: CombinerSpec, zero_backward: bool = False,
                 labels: Optional[Sequence[str]] = None) -> None:
        self.__query = query
        self.__candidates = _ordered(candidates)
        self.__node_count = node_count
        self.__combiner = combiner
        self.__zero_backward = zero_backward
        self.__labels = labels

    @property
    def query(self) -> int:
        return self.__query

    @property
    def candidates(self) -> tuple[FbsCandidate, ...]:
        return self.__candidates

    @property
    def combiner(self) -> CombinerSpec:
        return self.__combiner

    @property
    def zero_backward(self) -> bool:
        """
        True when no candidate but the query got any backward score; the combined score
        is then the forward score.
        """
        return self.__zero_backward

    def rows(self, include_zero: bool = False) -> list[FbsCandidate]:
        """
        :param include_zero: also list the nodes outside the candidate list, at the bottom
            with zero scores and by ascending id.
        """
        rows = list(self.__candidates)
        if include_zero:
            listed = {c.node for c in rows}
            rows.extend(FbsCandidate(v, 0.0, 0.0, 0.0) for v in range(self.__node_count) if v not in listed)
        return rows

    def ranking(self, include_zero: bool = False) -> list[int]:
        return [c.node for c in self.rows(include_zero)]

    def scores(self) -> dict[int, float]:
        return {c.node: c.combined for c in self.__candidates}

    def recombine(self, combiner: CombinerSpec) -> 'FbsResult':
        """
        :returns: the same candidates scored and sorted under another combiner.
        """
        rescored = []
        for c in self.__candidates:
            combined = c.forward if self.__zero_backward else combiner.combine(c.forward, c.backward)
            rescored.append(c._replace(combined=combined))
        return FbsResult(self.__query, rescored, self.__node_count, combiner, self.__zero_backward, self.__labels)

    def label(self, node: int) -> str:
        return self.__labels[node] if self.__labels is not None else str(node)

    def to_tsv(self, stream, k: Optional[int] = None, include_zero: bool = False) -> None:
        """
        Writes `rank<TAB>node<TAB>forward<TAB>backward<TAB>combined` lines, ranks starting at 1.
        """
        rows = self.rows(include_zero)
        if k is not None:
            rows = rows[:k]
        lines = "".join("{}\t{}\t{:.10g}\t{:.10g}\t{:.10g}\n".format(
            rank, self.label(c.node), c.forward, c.backward, c.combined) for rank, c in enumerate(rows, 1))
        if isinstance(stream, io.TextIOBase):
            stream.write(lines)
        else:
            stream.write(lines.encode('utf-8'))

    def __len__(self) -> int:
        return len(self.__candidates)

    def __repr__(self) -> str:
        return "<FbsResult query={} candidates={}>".format(self.__query, len(self.__candidates))


def forward_mode(g: Graph, u: int, n: int, ppr_cfg: PprConfig = PprConfig()) -> CandidateList:
    """
    :returns: the (at most) n nodes with the highest positive PPR score from u, with their
        score. u itself is one of them when it ranks.
    :raises ValueError: if n < 1.
    """
    if n < 1:
        raise ValueError("n should be at least 1, got {}".format(n))
    scores = ppr(g, u, ppr_cfg)
    return [(v, scores[v]) for v in scores.ranked()[:n]]


def backward_mode(g_rev: Graph, candidates: CandidateList, u: int,
                  ppr_cfg: PprConfig = PprConfig()) -> dict[int, float]:
    """
    :param g_rev: the reversed graph.
    :param candidates: the forward candidate list of u.
    :returns: for every candidate v, the PPR score of u from v on g_rev.
    """
    u = as_node(u, g_rev.node_count)
    backward = {}
    for v, _ in candidates:
        backward[v] = ppr(g_rev, v, ppr_cfg)[u]
    return backward


def _single_round(g: Graph, u: int, cfg: FbsConfig) -> tuple[list[FbsCandidate], bool]:
    candidates = forward_mode(g, u, cfg.n, cfg.ppr)
    backward = backward_mode(g.reverse(), candidates, u, cfg.ppr)
    others = [v for v, _ in candidates if v != u]
    zero_backward = bool(others) and all(backward[v] == 0 for v in others)
    rows = []
    for v, forward in candidates:
        combined = forward if zero_backward else cfg.combiner.combine(forward, backward[v])
        rows.append(FbsCandidate(v, forward, backward[v], combined))
    return list(_ordered(rows)), zero_backward


def fbs_query(g: Graph, u: int, cfg: FbsConfig = FbsConfig()) -> FbsResult:
    """
    Ranks the nodes of g by forward backward similarity to u.

    With cfg.rounds > 1, the query and the better half of the candidates (by combined
    score, rounded up) survive a round, and the next round runs on the subgraph they
    induce, personalized at u. The rounds stop early once a round eliminates nothing
    or only the query is left.

    :raises NonConvergenceException: if one of the PPR computations does not converge.
    """
    u = as_node(u, g.node_count)
    current, local_u = g, u
    ids = np.arange(g.node_count)
    for round_number in range(1, cfg.rounds + 1):
        rows, zero_backward = _single_round(current, local_u, cfg)
        survivors = {c.node for c in rows[:(len(rows) + 1) // 2]} | {local_u}
        if round_number == cfg.rounds or len(survivors) in (1, len(rows)):
            break
        logger.debug("round %d kept %d of %d candidates", round_number, len(survivors), len(rows))
        current, kept = current.subgraph(survivors)
        local_u = int(np.searchsorted(kept, local_u))
        ids = ids[kept]

    if zero_backward:
        logger.warning("no candidate of %s returned backward weight, using forward scores", g.label(u))
    rows = [c._replace(node=int(ids[c.node])) for c in rows]
    return FbsResult(u, rows, g.node_count, cfg.combiner, zero_backward, g.node_labels)


def fbs_two_feature(g: Graph, u: int, v: int, cfg: FbsConfig = FbsConfig()) -> tuple[float, float]:
    """
    :returns: the forward score of v from u and the backward score of u from v, without
        any candidate pruning.
    """
    v = as_node(v, g.node_count)
    forward = ppr(g, u, cfg.ppr)[v]
    backward = ppr(g.reverse(), v, cfg.ppr)[as_node(u, g.node_count)]
    return forward, backward


def fbs_pair_features(g: Graph, pairs: Sequence[tuple[int, int]], cfg: FbsConfig = FbsConfig()) -> np.ndarray:
    """
    Computes fbs_two_feature for many pairs, running one PPR per distinct source for the
    forward column and one per distinct target for the backward column.

    :returns: an array of shape (len(pairs), 2).
    """
    features = np.zeros((len(pairs), 2))
    by_source = defaultdict(list)
    by_target = defaultdict(list)
    for row, (u, v) in enumerate(pairs):
        by_source[as_node(u, g.node_count)].append(row)
        by_target[as_node(v, g.node_count)].append(row)
    for u, rows in sorted(by_source.items()):
        scores = ppr(g, u, cfg.ppr).scores
        features[rows, 0] = scores[[pairs[row][1] for row in rows]]
    g_rev = g.reverse()
    for v, rows in sorted(by_target.items()):
        scores = ppr(g_rev, v, cfg.ppr).scores
        features[rows, 1] = scores[[pairs[row][0] for row in rows]]
    logger.debug("computed fbs features of %d pairs", len(pairs))
    return features
