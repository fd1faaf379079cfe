import io
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import networkx as nx
import numpy as np
from scipy import stats
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import auc, roc_curve
from sklearn.model_selection import StratifiedKFold, cross_val_predict
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from .fbs import CombinerSpec, FbsConfig, fbs_query
from .graph import Graph
from .ppr import ppr_rank
from .simexceptions import *
from .utils import as_text_lines, Source

"""
Evaluation metrics and protocols: community overlap of rankings (average Jaccard), graded
relevance (nDCG), partition quality (modularity, communities per vertex), link prediction
with logistic regression, synthetic community graphs and the small reference graph used
to compare the measures by hand.
"""

__all__ = [
    'CommunityAssignment', 'LinkPredictionSet', 'EvalReport', 'jaccard', 'aj_at_k', 'maj_at_k',
    'dcg_at_k', 'ndcg_at_k', 'modularity', 'cpv', 'build_link_prediction_set', 'roc_auc', 'logistic_cv_auc',
    'auc_standard_error', 'paired_greater_pvalue', 'planted_partition', 'fig1_graph',
    'fig1_communities', 'sample_queries', 'community_effect_trial', 'load_communities',
    'write_communities', 'load_relevance', 'RELEVANCE_VOTES',
]

logger = logging.getLogger(__name__)

# votes cast for the candidates of one query in a relevance file
RELEVANCE_VOTES = 20

_LabelSet = frozenset[str]


class CommunityAssignment:

    """
    The set of community labels of every node; a node may have none.
    """

    def __init__(self, membership: Sequence[Iterable[str]]) -> None:
        self.__membership = tuple(frozenset(labels) for labels in membership)

    def __getitem__(self, node: int) -> _LabelSet:
        return self.__membership[node]

    def __len__(self) -> int:
        return len(self.__membership)

    def __iter__(self):
        return iter(self.__membership)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CommunityAssignment):
            return NotImplemented
        return self.__membership == tuple(other)

    __hash__ = None

    def labelled_nodes(self) -> list[int]:
        return [node for node, labels in enumerate(self.__membership) if labels]

    def partition(self) -> list[str]:
        """
        :returns: the single community of every node.
        :raises ValueError: if a node has no community or more than one.
        """
        single = []
        for node, labels in enumerate(self.__membership):
            if len(labels) != 1:
                raise ValueError("node {} has {} communities, a partition needs exactly one".format(
                    node, len(labels)))
            single.append(next(iter(labels)))
        return single

    def __repr__(self) -> str:
        return "<CommunityAssignment nodes={}>".format(len(self.__membership))


def jaccard(a: Iterable[str], b: Iterable[str]) -> float:
    """
    :returns: |a & b| / |a | b|, 0 when both are empty.
    """
    a, b = set(a), set(b)
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def aj_at_k(query_comms: Iterable[str], ranked_comms: Sequence[Iterable[str]], k: int,
            normalized: bool = False) -> float:
    """
    Average Jaccard of a ranking: (sum over j <= k of sum over i <= j of J_i) / k, J_i being
    the Jaccard coefficient of the query communities with those of the i-th ranked node.
    Rank i is thus weighted by (k - i + 1) / k and the value can exceed 1.

    :param normalized: divide every inner sum by j, which keeps the value in [0, 1].
    :raises ValueError: if k is not in [1, len(ranked_comms)].
    """
    if k < 1:
        raise ValueError("k should be at least 1, got {}".format(k))
    if k > len(ranked_comms):
        raise ValueError("k = {} exceeds the {} ranked nodes".format(k, len(ranked_comms)))
    query_comms = set(query_comms)
    coefficients = np.array([jaccard(query_comms, comms) for comms in ranked_comms[:k]])
    prefix = np.cumsum(coefficients)
    if normalized:
        prefix = prefix / np.arange(1, k + 1)
    return float(prefix.sum() / k)


def maj_at_k(queries: Sequence[int], results: Sequence[Sequence[int]], comms: CommunityAssignment,
             k: int, normalized: bool = False) -> float:
    """
    Mean average Jaccard over queries. Rankings shorter than k are padded with nodes
    sharing no community; queries without communities are skipped.

    :param results: the ranking of every query, in the order of queries.
    :raises EvaluationException: if no query can be evaluated.
    """
    if len(queries) != len(results):
        raise ValueError("expected one ranking per query")
    values = []
    for query, ranking in zip(queries, results):
        if not comms[query]:
            logger.warning("query %d has no community, skipped", query)
            continue
        ranked_comms = [comms[v] for v in ranking[:k]]
        ranked_comms.extend(frozenset() for _ in range(k - len(ranked_comms)))
        values.append(aj_at_k(comms[query], ranked_comms, k, normalized))
    if not values:
        raise EvaluationException("no query with communities to evaluate")
    return float(np.mean(values))


def dcg_at_k(relevance: Sequence[int], k: int) -> float:
    """
    :returns: the sum over the first k ranks i of (2^rel_i - 1) / log2(i + 1).
    """
    relevance = np.asarray(relevance, dtype=np.float64)[:k]
    gains = np.power(2.0, relevance) - 1
    discounts = np.log2(np.arange(2, relevance.size + 2))
    return float((gains / discounts).sum())


def ndcg_at_k(relevance: Sequence[int], k: int) -> float:
    """
    :param relevance: the relevance of the retrieved items, in rank order.
    :returns: DCG@k / IDCG@k with gain 2^rel - 1 and discount log2(rank + 1); 0 when
        every relevance is 0.
    :raises ValueError: if k is not in [1, len(relevance)] or a relevance is negative.
    """
    relevance = np.asarray(relevance, dtype=np.float64)
    if k < 1 or k > relevance.size:
        raise ValueError("k should be in [1, {}], got {}".format(relevance.size, k))
    if relevance.size and relevance.min() < 0:
        raise ValueError("relevance can't be negative")
    ideal = dcg_at_k(np.sort(relevance)[::-1], k)
    if ideal == 0:
        return 0.0
    return dcg_at_k(relevance, k) / ideal


def modularity(g: Graph, partition: Sequence[str]) -> float:
    """
    Newman modularity of a partition, on the undirected projection of g.

    :param partition: the community of every node.
    :raises ValueError: if the partition does not cover every node.
    :raises UndefinedStatisticException: if the projection has no edge.
    """
    if len(partition) != g.node_count:
        raise ValueError("expected the community of {} nodes, got {}".format(g.node_count, len(partition)))
    projection = g.to_networkx()
    if projection.number_of_edges() == 0:
        raise UndefinedStatisticException("modularity is undefined on a graph without edges")
    groups = {}
    for node, community in enumerate(partition):
        groups.setdefault(community, set()).add(node)
    return float(nx.community.modularity(projection, list(groups.values())))


def cpv(comms: CommunityAssignment) -> float:
    """
    :returns: the mean number of communities per node.
    """
    if len(comms) == 0:
        raise UndefinedStatisticException("communities per vertex is undefined without nodes")
    return float(np.mean([len(labels) for labels in comms]))


@dataclass(frozen=True)
class LinkPredictionSet:

    """
    Existing edges (positives) and node pairs without an edge (negatives).
    Undirected pairs are stored as (smaller id, larger id).
    """

    positives: tuple[tuple[int, int], ...]
    negatives: tuple[tuple[int, int], ...]
    seed: int

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(self.positives) + list(self.negatives)

    @property
    def labels(self) -> np.ndarray:
        return np.concatenate((np.ones(len(self.positives), dtype=int), np.zeros(len(self.negatives), dtype=int)))


def build_link_prediction_set(g: Graph, n_pos: int, n_neg: int, seed: int = 42,
                              max_attempts: Optional[int] = None) -> LinkPredictionSet:
    """
    Draws n_pos edges uniformly without replacement and n_neg distinct node pairs without
    an edge by rejection sampling. Pairs of a node with itself are never drawn as negatives.

    :param max_attempts: draws allowed for the negatives, 100 * n_neg + 1000 by default.
    :raises ValueError: if g has fewer than n_pos edges.
    :raises SamplingException: if the negatives cannot be drawn within max_attempts.
    """
    edges = np.asarray(list(g.edges()), dtype=np.int64).reshape(-1, 2)
    if n_pos > len(edges):
        raise ValueError("cannot draw {} edges from a graph with {}".format(n_pos, len(edges)))
    pair_count = g.node_count * (g.node_count - 1)
    if not g.directed:
        pair_count //= 2
    if n_neg > pair_count - len(edges):
        raise SamplingException("the graph has fewer than {} node pairs without an edge".format(n_neg))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(edges), size=n_pos, replace=False)
    positives = tuple((int(u), int(v)) for u, v in edges[chosen])

    budget = max_attempts if max_attempts is not None else 100 * n_neg + 1000
    negatives = []
    seen = set()
    attempts = 0
    while len(negatives) < n_neg:
        if attempts >= budget:
            raise SamplingException("drew only {} of {} negative pairs in {} attempts".format(
                len(negatives), n_neg, budget))
        attempts += 1
        u, v = (int(x) for x in rng.integers(0, g.node_count, size=2))
        if u == v:
            continue
        if not g.directed and u > v:
            u, v = v, u
        if (u, v) in seen or g.has_edge(u, v):
            continue
        seen.add((u, v))
        negatives.append((u, v))
    logger.debug("sampled %d negatives in %d attempts", n_neg, attempts)
    return LinkPredictionSet(positives, tuple(negatives), seed)


def roc_auc(labels: Sequence[int], scores: Sequence[float]) -> tuple[float, list[tuple[float, float]]]:
    """
    :returns: the area under the ROC curve by the trapezoid rule, and the curve as
        (false positive rate, true positive rate) points.
    :raises EvaluationException: if labels hold a single class.
    """
    labels = np.asarray(labels)
    if np.unique(labels).size != 2:
        raise EvaluationException("ROC needs both positive and negative examples")
    fpr, tpr, _ = roc_curve(labels, np.asarray(scores, dtype=np.float64), drop_intermediate=False)
    return float(auc(fpr, tpr)), [(float(x), float(y)) for x, y in zip(fpr, tpr)]


def logistic_cv_auc(features, labels, folds: int = 5, seed: int = 42,
                    penalty: float = 1e-4) -> tuple[float, list[tuple[float, float]]]:
    """
    Trains an L2-regularized logistic regression on standardized features with stratified
    k-fold cross-validation and computes the ROC of the pooled out-of-fold probabilities.

    :param penalty: the inverse of the regularization strength C.
    :raises EvaluationException: if a class has fewer examples than folds.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features.reshape(-1, 1)
    labels = np.asarray(labels)
    classes, counts = np.unique(labels, return_counts=True)
    if classes.size != 2 or counts.min() < folds:
        raise EvaluationException("{}-fold cross-validation needs at least {} examples of each class".format(
            folds, folds))
    model = make_pipeline(StandardScaler(), LogisticRegression(C=1 / penalty, max_iter=1000))
    splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    probabilities = cross_val_predict(model, features, labels, cv=splitter, method='predict_proba')[:, 1]
    return roc_auc(labels, probabilities)


def auc_standard_error(area: float, n_pos: int, n_neg: int) -> float:
    """
    Hanley and McNeil's standard error of an area under the ROC curve.
    """
    q1 = area / (2 - area)
    q2 = 2 * area ** 2 / (1 + area)
    variance = (area * (1 - area) + (n_pos - 1) * (q1 - area ** 2) + (n_neg - 1) * (q2 - area ** 2)) \
        / (n_pos * n_neg)
    return math.sqrt(max(variance, 0.0))


def paired_greater_pvalue(a: Sequence[float], b: Sequence[float]) -> float:
    """
    :returns: the p-value of a one-sided paired t-test of mean(a - b) > 0.
    :raises EvaluationException: if the samples are empty or of different lengths.
    """
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.size == 0 or a.shape != b.shape:
        raise EvaluationException("expected two non-empty samples of the same length, got {} and {} values".format(
            a.size, b.size))
    differences = a - b
    if np.allclose(differences, differences[0]):
        # no variance, the test statistic is undefined
        return 0.0 if differences[0] > 0 else 1.0
    return float(stats.ttest_rel(a, b, alternative='greater').pvalue)


def planted_partition(k: int, size: int, p_in: float, p_out: float, directed: bool = False,
                      seed: int = 42, hubs: int = 0, p_hub: float = 0.0) -> tuple[Graph, CommunityAssignment]:
    """
    Draws a graph of k communities of `size` nodes, nodes of the same community being
    linked with probability p_in and others with probability p_out.

    Optional hubs are extra nodes forming their own community 'hub'; every other node links
    to each hub with probability p_hub.

    :returns: the graph, labelled '0', '1', ... (hubs 'h0', 'h1', ...), and the planted
        communities 'c0', 'c1', ...
    """
    for name, p in (('p_in', p_in), ('p_out', p_out), ('p_hub', p_hub)):
        if not 0 <= p <= 1:
            raise ValueError("{} should be in [0, 1], got {}".format(name, p))
    if k < 1 or size < 1 or hubs < 0:
        raise ValueError("k and size should be positive and hubs non-negative")
    if p_in <= p_out:
        logger.warning("p_in = %s does not exceed p_out = %s, no community structure is planted", p_in, p_out)
    planted = nx.planted_partition_graph(k, size, p_in, p_out, seed=seed, directed=directed)
    edges = list(planted.edges())
    members = k * size
    if hubs:
        rng = np.random.default_rng(seed)
        citing = rng.random((members, hubs)) < p_hub
        edges.extend((int(v), members + int(h)) for v, h in zip(*np.nonzero(citing)))
    labels = [str(v) for v in range(members)] + ["h{}".format(h) for h in range(hubs)]
    membership = [{"c{}".format(v // size)} for v in range(members)] + [{"hub"}] * hubs
    return Graph(members + hubs, edges, directed=directed, node_labels=labels), CommunityAssignment(membership)


_EXAMPLE_NODES = "ABCDEFGHIJKLMN"

_EXAMPLE_EDGES = (
    ('G', 'D'), ('G', 'E'), ('G', 'F'), ('G', 'H'),
    ('E', 'D'), ('F', 'D'),
    ('D', 'A'), ('D', 'B'), ('D', 'C'),
    ('H', 'I'), ('H', 'J'), ('H', 'K'),
    ('L', 'H'), ('M', 'H'), ('N', 'H'),
)

# reference rankings for the query G, groups of tied nodes best first
_EXAMPLE_RANKINGS = {
    'ppr': ("G", "D", "EFH", "ABC", "IJK", "LMN"),
    'fbs': ("G", "D", "EF", "ABC", "H", "IJK", "LMN"),
    'psalsa': ("G", "H", "D", "EF", "ABCIJKLMN"),
    'adamic-adar': ("D", "ABCEF", "IJKLMN", "GH"),
    'simrank': ("G", "IJKLMN", "ABC", "D", "EF", "H"),
}


def fig1_graph() -> tuple[Graph, dict[str, list[set[str]]]]:
    """
    The 14-node citation graph whose two communities FBS tells apart and PPR does not:
    G cites D, E, F and H; E and F cite D; D cites A, B and C; H cites I, J and K;
    L, M and N cite H.

    :returns: the graph, labelled 'A' to 'N' with ids 0 to 13, and the expected ranking
        of every measure for the query G as lists of tied label groups.
    """
    ids = {label: i for i, label in enumerate(_EXAMPLE_NODES)}
    g = Graph(len(_EXAMPLE_NODES), [(ids[s], ids[d]) for s, d in _EXAMPLE_EDGES], node_labels=list(_EXAMPLE_NODES))
    rankings = {measure: [set(group) for group in groups] for measure, groups in _EXAMPLE_RANKINGS.items()}
    return g, rankings


def fig1_communities() -> CommunityAssignment:
    return CommunityAssignment([{'white'} if label <= 'G' else {'grey'} for label in _EXAMPLE_NODES])


def sample_queries(comms: CommunityAssignment, count: int, seed: int = 42) -> list[int]:
    """
    :returns: count distinct nodes having a community, drawn uniformly; all of them in
        ascending order when there are not more than count.
    """
    candidates = comms.labelled_nodes()
    if count >= len(candidates):
        return candidates
    rng = np.random.default_rng(seed)
    return [int(v) for v in rng.choice(candidates, size=count, replace=False)]


def community_effect_trial(g: Graph, comms: CommunityAssignment, queries: Sequence[int], k: int = 10,
                           lambdas: Sequence[float] = (0.05, 0.5, 0.95),
                           cfg: FbsConfig = FbsConfig(), normalized: bool = False) -> dict[str, list[float]]:
    """
    Compares the community overlap of PPR and of FBS with linear combiners of the given
    lambdas. FBS is computed once per query and recombined for every lambda.

    :returns: measure name -> [MAJ@1, ..., MAJ@k], the FBS names being 'fbs(lambda=...)'.
    """
    rankings = {'ppr': []}
    for lam in lambdas:
        rankings['fbs(lambda={})'.format(lam)] = []
    for query in queries:
        rankings['ppr'].append(ppr_rank(g, query, cfg.ppr)[:k])
        result = fbs_query(g, query, cfg)
        for lam in lambdas:
            recombined = result.recombine(CombinerSpec('linear', lam))
            rankings['fbs(lambda={})'.format(lam)].append(recombined.ranking()[:k])
    return {name: [maj_at_k(queries, ranked, comms, cutoff, normalized) for cutoff in range(1, k + 1)]
            for name, ranked in rankings.items()}


def load_communities(source: Source, g: Graph) -> CommunityAssignment:
    """
    Reads `node<TAB>community,community,...` lines, `#` comments and blank lines ignored.
    Nodes missing from g are skipped with a warning; nodes missing from the file have no
    community.

    :raises EdgeListParseException: on a malformed line.
    """
    membership = [set() for _ in range(g.node_count)]
    for number, line in enumerate(as_text_lines(source), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        fields = stripped.split('\t')
        if len(fields) != 2:
            raise EdgeListParseException(number, "expected 'node<TAB>community,...'")
        labels = {label.strip() for label in fields[1].split(',') if label.strip()}
        if not labels:
            raise EdgeListParseException(number, "no community given for {!r}".format(fields[0]))
        try:
            node = g.node_id(fields[0].strip())
        except NodeNotFoundException:
            logger.warning("line %d: node %r is not in the graph, skipped", number, fields[0])
            continue
        membership[node] |= labels
    return CommunityAssignment(membership)


def write_communities(comms: CommunityAssignment, labels: Sequence[str], stream) -> None:
    lines = "".join("{}\t{}\n".format(labels[node], ",".join(sorted(comms[node])))
                    for node in comms.labelled_nodes())
    if isinstance(stream, io.TextIOBase):
        stream.write(lines)
    else:
        stream.write(lines.encode('utf-8'))


def load_relevance(source: Source, total: int = RELEVANCE_VOTES) -> dict[str, int]:
    """
    Reads `candidate<TAB>votes` lines.

    :returns: candidate label -> votes, in file order.
    :raises EdgeListParseException: on a malformed line or votes outside [0, total].
    :raises EvaluationException: if the votes do not add up to total.
    """
    votes = {}
    for number, line in enumerate(as_text_lines(source), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        fields = [f.strip() for f in stripped.split('\t')]
        if len(fields) != 2:
            raise EdgeListParseException(number, "expected 'candidate<TAB>votes'")
        try:
            count = int(fields[1])
        except ValueError:
            raise EdgeListParseException(number, "votes should be an integer, got {!r}".format(fields[1])) from None
        if not 0 <= count <= total:
            raise EdgeListParseException(number, "votes should be in [0, {}], got {}".format(total, count))
        votes[fields[0]] = count
    if sum(votes.values()) != total:
        raise EvaluationException("votes add up to {}, expected {}".format(sum(votes.values()), total))
    return votes


@dataclass
class EvalReport:

    """
    metric: the name of the metric.
    series: per-k or per-fold values of every measure.
    aggregate: the summary values.
    config: the settings the values were obtained with.
    extra: values only rendered in JSON, such as ROC points.
    """

    metric: str
    series: dict[str, list[float]] = field(default_factory=dict)
    aggregate: dict[str, float] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {'metric': self.metric, 'series': self.series, 'aggregate': self.aggregate,
                'config': self.config, 'extra': self.extra}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = ["metric: {}".format(self.metric)]
        if self.series:
            names = list(self.series)
            widths = [max(len(name), 10) for name in names]
            lines.append("  ".join(["{:>4}".format("k")] + [name.rjust(w) for name, w in zip(names, widths)]))
            length = max(len(values) for values in self.series.values())
            for i in range(length):
                cells = ["{:>4}".format(i + 1)]
                for name, width in zip(names, widths):
                    values = self.series[name]
                    cells.append(("{:.6f}".format(values[i]) if i < len(values) else "").rjust(width))
                lines.append("  ".join(cells))
        if self.aggregate:
            width = max(len(name) for name in self.aggregate)
            for name in sorted(self.aggregate):
                lines.append("{}  {:.6f}".format(name.ljust(width), self.aggregate[name]))
        if self.config:
            lines.append("config: " + " ".join("{}={}".format(key, self.config[key]) for key in sorted(self.config)))
        return "\n".join(lines) + "\n"
