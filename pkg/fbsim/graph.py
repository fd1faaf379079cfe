import difflib
import io
import json
import logging
from dataclasses import dataclass, asdict
from typing import Iterable, Iterator, Optional, Sequence

import networkx as nx
import numpy as np
import requests
from scipy import sparse

from .simexceptions import *
from .utils import as_node, as_text_lines, Source

"""
Immutable sparse graph storage: compressed adjacency in both directions, O(1) edge reversal,
edge list reading and writing, and the descriptive statistics reported for data sets
(average degree, bridges).
"""

__all__ = [
    'Graph', 'GraphStats', 'reverse', 'out_degree', 'in_degree', 'bridge_fraction',
    'avg_degree', 'graph_stats', 'load_edge_list', 'open_graph', 'write_edge_list',
]

logger = logging.getLogger(__name__)

# Type aliases for annotations
_Graph = "Graph"
_Edge = tuple[int, int]


def _compressed(rows: np.ndarray, cols: np.ndarray, node_count: int) -> sparse.csr_matrix:
    """Builds a CSR matrix with sorted column indices from already deduplicated pairs."""
    order = np.lexsort((cols, rows))
    rows = rows[order]
    cols = cols[order]
    indptr = np.zeros(node_count + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=node_count), out=indptr[1:])
    data = np.ones(cols.size, dtype=np.float64)
    return sparse.csr_matrix((data, cols.astype(np.int64), indptr), shape=(node_count, node_count))


class Graph:

    """
    An immutable graph over the dense node ids [0, node_count).

    Edges are kept twice, as compressed successor lists (out_adjacency) and as compressed
    predecessor lists (in_adjacency), both sorted by node id. Undirected graphs store every
    edge in both directions, so their two adjacencies are identical.
    Duplicate edges are collapsed, self-loops are kept.
    """

    def __init__(self, node_count: int, edges: Iterable[_Edge], directed: bool = True,
                 node_labels: Optional[Sequence[str]] = None) -> None:
        """
        :param node_count: the number of nodes, ids run from 0 to node_count - 1.
        :param edges: (source, target) pairs of node ids.
        :param directed: whether (u, v) and (v, u) are distinct edges.
        :param node_labels: optional external name of every node.
        :raises TypeError: if one of the arguments is not of the right type.
        :raises ValueError: if the labels do not match the node count or are not unique.
        :raises IndexError: if an edge refers to a node outside [0, node_count).
        """
        if isinstance(node_count, bool) or not isinstance(node_count, (int, np.integer)):
            raise TypeError("node_count should be an integer")
        if node_count < 0:
            raise ValueError("node_count can't be negative")
        if not isinstance(directed, bool):
            raise TypeError("directed should be a boolean")
        pairs = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        pairs = pairs.reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= node_count):
            raise IndexError("an edge refers to a node outside [0, {})".format(node_count))
        src, dst = pairs[:, 0], pairs[:, 1]
        if not directed:
            src, dst = np.concatenate((src, dst)), np.concatenate((dst, src))
        codes = np.unique(src * max(node_count, 1) + dst)
        src, dst = codes // max(node_count, 1), codes % max(node_count, 1)
        out_adjacency = _compressed(src, dst, node_count)
        in_adjacency = _compressed(dst, src, node_count)
        self.__setup(node_count, directed, out_adjacency, in_adjacency,
                     self.__check_labels(node_labels, node_count))

    def __setup(self, node_count, directed, out_adjacency, in_adjacency, labels):
        self.__node_count = int(node_count)
        self.__directed = directed
        self.__out = out_adjacency
        self.__in = in_adjacency
        self.__labels = labels
        self.__label_index = None
        self.__reversed = None
        self.__propagation = None
        self.__projection = None

    @staticmethod
    def __check_labels(labels, node_count):
        if labels is None:
            return None
        labels = tuple(labels)
        if len(labels) != node_count:
            raise ValueError("expected {} node labels, got {}".format(node_count, len(labels)))
        for label in labels:
            if not isinstance(label, str):
                raise TypeError("node labels should be strings, not {}".format(type(label)))
        if len(set(labels)) != len(labels):
            raise ValueError("node labels should be unique")
        return labels

    @classmethod
    def _from_adjacency(cls, node_count, directed, out_adjacency, in_adjacency, labels) -> _Graph:
        g = cls.__new__(cls)
        g.__setup(node_count, directed, out_adjacency, in_adjacency, labels)
        return g

    @property
    def node_count(self) -> int:
        return self.__node_count

    @property
    def directed(self) -> bool:
        return self.__directed

    @property
    def edge_count(self) -> int:
        """
        :returns: the number of edges. An undirected edge counts once.
        """
        stored = self.__out.nnz
        if self.__directed:
            return int(stored)
        loops = int(self.__out.diagonal().sum())
        return (stored + loops) // 2

    @property
    def out_adjacency(self) -> sparse.csr_matrix:
        """
        :returns: the successor lists, row u holding the successors of u. Do not modify it.
        """
        return self.__out

    @property
    def in_adjacency(self) -> sparse.csr_matrix:
        """
        :returns: the predecessor lists, row v holding the predecessors of v. Do not modify it.
        """
        return self.__in

    @property
    def out_degrees(self) -> np.ndarray:
        return np.diff(self.__out.indptr)

    @property
    def in_degrees(self) -> np.ndarray:
        return np.diff(self.__in.indptr)

    def successors(self, u: int) -> np.ndarray:
        u = as_node(u, self.__node_count)
        return self.__out.indices[self.__out.indptr[u]:self.__out.indptr[u + 1]]

    def predecessors(self, u: int) -> np.ndarray:
        u = as_node(u, self.__node_count)
        return self.__in.indices[self.__in.indptr[u]:self.__in.indptr[u + 1]]

    def neighbors(self, u: int) -> np.ndarray:
        """
        :returns: the neighbors of u in the undirected projection, u itself excluded.
        """
        u = as_node(u, self.__node_count)
        projection = self.undirected_adjacency
        return projection.indices[projection.indptr[u]:projection.indptr[u + 1]]

    def edges(self) -> Iterator[_Edge]:
        """
        Iterates over the edges in (source, target) order. Undirected edges are
        yielded once, as (smaller id, larger id).
        """
        indptr, indices = self.__out.indptr, self.__out.indices
        for u in range(self.__node_count):
            for v in indices[indptr[u]:indptr[u + 1]]:
                if self.__directed or u <= v:
                    yield u, int(v)

    def has_edge(self, u: int, v: int) -> bool:
        successors = self.successors(u)
        position = np.searchsorted(successors, v)
        return bool(position < successors.size and successors[position] == v)

    @property
    def labels(self) -> tuple[str, ...]:
        """
        :returns: the external name of every node; ids are used when the graph has no labels.
        """
        if self.__labels is None:
            return tuple(str(i) for i in range(self.__node_count))
        return self.__labels

    @property
    def node_labels(self) -> Optional[tuple[str, ...]]:
        return self.__labels

    def label(self, u: int) -> str:
        u = as_node(u, self.__node_count)
        return self.__labels[u] if self.__labels is not None else str(u)

    def node_id(self, label: str) -> int:
        """
        :param label: the external name of a node.
        :returns: its dense id.
        :raises NodeNotFoundException: if no node has that label, with close matches as suggestions.
        """
        if self.__label_index is None:
            self.__label_index = {name: i for i, name in enumerate(self.labels)}
        try:
            return self.__label_index[label]
        except KeyError:
            suggestions = difflib.get_close_matches(str(label), self.__label_index.keys(), n=3)
            raise NodeNotFoundException(label, suggestions) from None

    @property
    def dangling(self) -> np.ndarray:
        """
        :returns: a boolean mask of the nodes with no outgoing edge.
        """
        return self.out_degrees == 0

    @property
    def propagation_matrix(self) -> sparse.csr_matrix:
        """
        :returns: the column-stochastic walk matrix M, M[v, x] = 1/deg+(x) for every edge x -> v.
            Columns of dangling nodes are empty.
        """
        if self.__propagation is None:
            degrees = self.out_degrees.astype(np.float64)
            inverse = np.divide(1.0, degrees, out=np.zeros_like(degrees), where=degrees > 0)
            self.__propagation = sparse.csr_matrix(self.__in @ sparse.diags(inverse))
            logger.debug("built propagation matrix for %r", self)
        return self.__propagation

    @property
    def undirected_adjacency(self) -> sparse.csr_matrix:
        """
        :returns: the 0/1 adjacency of the undirected projection, self-loops removed.
        """
        if self.__projection is None:
            both = (self.__out + self.__in).tocoo()
            keep = both.row != both.col
            rows, cols = both.row[keep].astype(np.int64), both.col[keep].astype(np.int64)
            self.__projection = _compressed(rows, cols, self.__node_count)
        return self.__projection

    def to_networkx(self) -> nx.Graph:
        """
        :returns: the undirected projection as a networkx graph on nodes 0..node_count-1,
            without self-loops.
        """
        projection = sparse.triu(self.undirected_adjacency, k=1).tocoo()
        nxg = nx.Graph()
        nxg.add_nodes_from(range(self.__node_count))
        nxg.add_edges_from(zip(projection.row.tolist(), projection.col.tolist()))
        return nxg

    def reverse(self) -> _Graph:
        """
        :returns: the graph with every edge flipped. An undirected graph is its own reversal.
            The reversal shares the adjacency arrays of this graph and is cached.
        """
        if not self.__directed:
            return self
        if self.__reversed is None:
            flipped = Graph._from_adjacency(self.__node_count, True, self.__in, self.__out, self.__labels)
            flipped.__reversed = self
            self.__reversed = flipped
        return self.__reversed

    def subgraph(self, nodes: Iterable[int]) -> tuple[_Graph, np.ndarray]:
        """
        :param nodes: the node ids to keep.
        :returns: the induced subgraph and the array mapping its ids to the ids of this graph.
        """
        kept = np.unique(np.asarray([as_node(u, self.__node_count) for u in nodes], dtype=np.int64))
        local = np.full(self.__node_count, -1, dtype=np.int64)
        local[kept] = np.arange(kept.size)
        coo = self.__out[kept].tocoo()
        rows = kept[coo.row]
        mask = local[coo.col] >= 0
        pairs = np.column_stack((local[rows[mask]], local[coo.col[mask]]))
        labels = None if self.__labels is None else [self.__labels[u] for u in kept]
        return Graph(int(kept.size), pairs, directed=self.__directed, node_labels=labels), kept

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.__node_count == other.node_count
                and self.__directed == other.directed
                and self.labels == other.labels
                and np.array_equal(self.__out.indptr, other.out_adjacency.indptr)
                and np.array_equal(self.__out.indices, other.out_adjacency.indices))

    __hash__ = None

    def __repr__(self) -> str:
        return "<Graph {} nodes={} edges={}>".format(
            "directed" if self.__directed else "undirected", self.__node_count, self.edge_count)


@dataclass(frozen=True)
class GraphStats:

    """Descriptive statistics of a graph, optionally with community statistics."""

    node_count: int
    edge_count: int
    avg_degree: float
    bridge_fraction: float
    modularity: Optional[float] = None
    cpv: Optional[float] = None

    def to_dict(self) -> dict:
        return {key: value for key, value in asdict(self).items() if value is not None}

    def to_text(self) -> str:
        """
        :returns: a single line of key=value pairs.
        """
        parts = []
        for key, value in self.to_dict().items():
            parts.append("{}={}".format(key, "{:.6f}".format(value) if isinstance(value, float) else value))
        return " ".join(parts)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def reverse(g: Graph) -> Graph:
    """
    :returns: g with every directed edge flipped; g itself when it is undirected.
    """
    return g.reverse()


def out_degree(g: Graph, u: int) -> int:
    """
    :raises IndexError: if u is not a node of g.
    """
    return int(g.successors(u).size)


def in_degree(g: Graph, u: int) -> int:
    """
    :raises IndexError: if u is not a node of g.
    """
    return int(g.predecessors(u).size)


def bridge_fraction(g: Graph) -> float:
    """
    Computes the share of bridges among the edges of the undirected projection of g.
    A bridge is an edge whose removal increases the number of connected components.
    Self-loops are not part of the analysis.

    :raises UndefinedStatisticException: if the projection has no edge.
    """
    projection = g.to_networkx()
    edge_count = projection.number_of_edges()
    if edge_count == 0:
        raise UndefinedStatisticException("bridge fraction is undefined on a graph without edges")
    bridge_count = sum(1 for _ in nx.bridges(projection))
    return bridge_count / edge_count


def avg_degree(g: Graph) -> float:
    """
    :returns: 2 * edge_count / node_count, every edge counting once per endpoint
        (one out- and one in-incidence for directed graphs).
    :raises UndefinedStatisticException: if g has no node.
    """
    if g.node_count == 0:
        raise UndefinedStatisticException("average degree is undefined on a graph without nodes")
    return 2 * g.edge_count / g.node_count


def graph_stats(g: Graph) -> GraphStats:
    return GraphStats(g.node_count, g.edge_count, avg_degree(g), bridge_fraction(g))


def load_edge_list(source: Source, directed: bool = True) -> Graph:
    """
    Reads an edge list: one `source<TAB>target` pair per line, `#` comments and blank
    lines ignored. Node names are mapped to dense ids in first-seen order.

    :param source: bytes or a readable (binary or text) stream.
    :param directed: whether the edges are directed.
    :raises EdgeListParseException: on a malformed line, including a node declared alone.
    :raises EmptyGraphException: if the input holds no edge.
    """
    ids = {}
    pairs = []
    for number, line in enumerate(as_text_lines(source), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        fields = [field.strip() for field in stripped.split('\t')]
        if len(fields) == 1:
            if len(stripped.split()) == 1:
                raise EdgeListParseException(number, "singleton node {!r}, only edges are allowed".format(stripped))
            raise EdgeListParseException(number, "expected 'source<TAB>target'")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise EdgeListParseException(number, "expected 'source<TAB>target', got {!r}".format(line))
        endpoints = []
        for name in fields:
            if name not in ids:
                ids[name] = len(ids)
            endpoints.append(ids[name])
        pairs.append(endpoints)
    if not pairs:
        raise EmptyGraphException()
    g = Graph(len(ids), pairs, directed=directed, node_labels=list(ids))
    logger.info("loaded %r", g)
    return g


_builtin_open = open


def open_graph(filename: str, directed: bool = True) -> Graph:
    """
    :returns: a Graph read from the given edge list file. Http and https links are supported as well.
    """
    if filename.startswith('http://') or filename.startswith('https://'):
        response = requests.get(filename)
        response.raise_for_status()
        return load_edge_list(response.content, directed=directed)
    with _builtin_open(filename, 'rb') as f:
        return load_edge_list(f, directed=directed)


def write_edge_list(g: Graph, stream) -> None:
    """
    Writes g as an edge list that load_edge_list reads back to an identical graph.
    Edges are ordered so that nodes first appear in the order of their ids.
    Isolated nodes cannot be represented and are dropped with a warning.

    :param stream: a text or binary stream.
    """
    pairs = np.asarray(list(g.edges()), dtype=np.int64).reshape(-1, 2)
    src, dst = pairs[:, 0], pairs[:, 1]
    high = np.maximum(src, dst)
    low = np.minimum(src, dst)
    loop = src == dst
    order = np.lexsort((dst, src, -low, loop, high))
    isolated = g.node_count - np.unique(pairs).size
    if isolated:
        logger.warning("%d isolated nodes are not written to the edge list", isolated)
    labels = g.labels
    lines = "".join("{}\t{}\n".format(labels[s], labels[d]) for s, d in pairs[order])
    if isinstance(stream, io.TextIOBase):
        stream.write(lines)
    else:
        stream.write(lines.encode('utf-8'))
