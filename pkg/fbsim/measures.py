import io
import logging
from typing import Optional, Sequence

import numpy as np

from .baselines import adamic_adar, adamic_adar_scores, psalsa, simrank_mc
from .config import RunConfig
from .fbs import fbs_pair_features, fbs_query
from .graph import Graph
from .ppr import ScoreMap, ppr

"""
The similarity measures that can be selected by name, each one able to rank the nodes
for a query and to describe a (query, candidate) pair with features.
"""

__all__ = ['MeasureImplementation', 'implementations', 'get_measure']

logger = logging.getLogger(__name__)


class MeasureImplementation:

    """
    A superclass for the similarity measures.
    Measures should extend from this class and override
        score_map
    and, when a pair is described by more than its score, pair_features and feature_names.
    """

    def __init__(self, name: str, feature_names: Optional[Sequence[str]] = None) -> None:
        if type(name) != str:
            raise TypeError("Invalid type for a measure name. It should be str")
        self.name = name
        self.feature_names = tuple(feature_names) if feature_names else (name,)

    def score_map(self, g: Graph, u: int, cfg: RunConfig) -> ScoreMap:
        """
        This is to be overridden by every measure

        :returns: the score of every node for the query u.
        """
        raise NotImplementedError("{} does not score nodes".format(self.name))

    def ranking(self, g: Graph, u: int, cfg: RunConfig, include_zero: bool = False) -> list[int]:
        return self.score_map(g, u, cfg).ranked(include_zero)

    def write_query(self, g: Graph, u: int, cfg: RunConfig, stream) -> None:
        """
        Writes the top cfg.k nodes for u as `rank<TAB>node<TAB>score` lines.
        """
        scores = self.score_map(g, u, cfg)
        rows = scores.ranked(cfg.include_zero)[:cfg.k]
        lines = "".join("{}\t{}\t{:.10g}\n".format(rank, g.label(v), scores.scores[v])
                        for rank, v in enumerate(rows, 1))
        if isinstance(stream, io.TextIOBase):
            stream.write(lines)
        else:
            stream.write(lines.encode('utf-8'))

    def pair_features(self, g: Graph, pairs: Sequence[tuple[int, int]], cfg: RunConfig) -> np.ndarray:
        """
        :returns: an array of shape (len(pairs), len(self.feature_names)), the score of the
            candidate for the query by default. One score map is computed per distinct query.
        """
        features = np.zeros((len(pairs), 1))
        by_query = {}
        for row, (u, _) in enumerate(pairs):
            by_query.setdefault(u, []).append(row)
        for u, rows in sorted(by_query.items()):
            scores = self.score_map(g, u, cfg).scores
            features[rows, 0] = scores[[pairs[row][1] for row in rows]]
        return features

    def __repr__(self) -> str:
        return "<Measure {}>".format(self.name)


class MeasurePpr(MeasureImplementation):

    def __init__(self):
        super(MeasurePpr, self).__init__('ppr')

    def score_map(self, g, u, cfg):
        return ppr(g, u, cfg.ppr_config())


class MeasureFbs(MeasureImplementation):

    """Forward backward similarity; a pair is described by its forward and backward scores."""

    def __init__(self):
        super(MeasureFbs, self).__init__('fbs', ('fbs_forward', 'fbs_backward'))

    def score_map(self, g, u, cfg):
        result = fbs_query(g, u, cfg.fbs_config())
        scores = np.zeros(g.node_count)
        for candidate in result.candidates:
            scores[candidate.node] = candidate.combined
        return ScoreMap(u, scores, g.node_labels)

    def ranking(self, g, u, cfg, include_zero=False):
        return fbs_query(g, u, cfg.fbs_config()).ranking(include_zero)

    def write_query(self, g, u, cfg, stream):
        fbs_query(g, u, cfg.fbs_config()).to_tsv(stream, cfg.k, cfg.include_zero)

    def pair_features(self, g, pairs, cfg):
        return fbs_pair_features(g, pairs, cfg.fbs_config())


class MeasurePsalsa(MeasureImplementation):

    def __init__(self):
        super(MeasurePsalsa, self).__init__('psalsa')

    def score_map(self, g, u, cfg):
        return psalsa(g, u, cfg.salsa_config())


class MeasureSimRank(MeasureImplementation):

    def __init__(self):
        super(MeasureSimRank, self).__init__('simrank')

    def score_map(self, g, u, cfg):
        return simrank_mc(g, u, cfg.simrank_config())


class MeasureAdamicAdar(MeasureImplementation):

    def __init__(self):
        super(MeasureAdamicAdar, self).__init__('adamic-adar')

    def score_map(self, g, u, cfg):
        return adamic_adar_scores(g, u)

    def pair_features(self, g, pairs, cfg):
        return np.array([[adamic_adar(g, u, v)] for u, v in pairs]).reshape(-1, 1)


implementations = {
    'ppr': MeasurePpr(),
    'fbs': MeasureFbs(),
    'psalsa': MeasurePsalsa(),
    'simrank': MeasureSimRank(),
    'adamic-adar': MeasureAdamicAdar(),
}


def get_measure(name: str) -> MeasureImplementation:
    """
    :raises ValueError: if no measure has that name.
    """
    try:
        return implementations[name]
    except KeyError:
        raise ValueError("unknown measure {!r}, expected one of {}".format(
            name, ", ".join(implementations))) from None
