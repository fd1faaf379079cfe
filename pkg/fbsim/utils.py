import io
from typing import Iterable, Sequence, Union

import numpy as np

from .simexceptions import EdgeListParseException

TIE_TOLERANCE = 1e-9

Source = Union[bytes, bytearray, io.IOBase]


def as_text_lines(source: Source):
    """
    Iterates over the decoded lines of a byte stream, a text stream or a bytes object.

    :raises TypeError: if source is none of those.
    :raises EdgeListParseException: if a line is not valid utf-8.
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(bytes(source))
    if not hasattr(source, 'read'):
        raise TypeError("Expected bytes or a readable stream, not {}".format(type(source)))
    lines = iter(source)
    number = 0
    while True:
        number += 1
        try:
            line = next(lines)
            if isinstance(line, (bytes, bytearray)):
                line = line.decode('utf-8')
        except StopIteration:
            return
        except UnicodeDecodeError as e:
            raise EdgeListParseException(number, "not valid utf-8 ({})".format(e.reason)) from None
        yield line.rstrip('\r\n')


def as_node(node, node_count: int) -> int:
    """
    Checks that node is a valid dense node id.

    :raises TypeError: if node is not an integer.
    :raises IndexError: if node is outside [0, node_count).
    """
    if isinstance(node, bool) or not isinstance(node, (int, np.integer)):
        raise TypeError("Node ids should be integers, not {}".format(type(node)))
    node = int(node)
    if not 0 <= node < node_count:
        raise IndexError(
            "the graph has {} nodes but node {} was given".format(node_count, node))
    return node


def rank_scores(scores: np.ndarray, include_zero: bool = False) -> list[int]:
    """
    :returns: node ids sorted by score descending, ties by ascending id.
        Nodes scoring 0 are left out unless include_zero is set.
    """
    scores = np.asarray(scores, dtype=float)
    ids = np.arange(scores.size)
    order = np.lexsort((ids, -scores))
    if not include_zero:
        order = order[scores[order] > 0]
    return [int(i) for i in order]


def tie_groups(ranking: Sequence[int], scores, tolerance: float = TIE_TOLERANCE) -> list[set[int]]:
    """
    Splits a ranking into groups of consecutive nodes whose scores are within tolerance.

    :param ranking: node ids, best first.
    :param scores: anything indexable by node id.
    """
    groups = []
    previous = None
    for node in ranking:
        score = float(scores[node])
        if previous is not None and abs(previous - score) <= tolerance:
            groups[-1].add(node)
        else:
            groups.append({node})
        previous = score
    return groups


def labelled_groups(groups: Iterable[set[int]], labels: Sequence[str]) -> list[set[str]]:
    return [{labels[node] for node in group} for group in groups]
