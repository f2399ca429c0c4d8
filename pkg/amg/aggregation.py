"""
Distance-two maximal independent set coarsening and aggregate formation.

Roots are chosen by repeated tuple-max propagation over the symmetrised
strength graph: every node carries the tuple (state, weight, index), two
rounds of neighbourhood maxima reach distance two, and an undecided node
that holds the maximum of its two-hop neighbourhood becomes a root while one
that sees a root there becomes a non-root. Each round reads the previous
round's array only, so the outcome does not depend on evaluation order.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from amg.sparse import INDEX_DTYPE, SparseMatrix, _compress, segment_reduce
from amg.strength import StrengthGraph, influence_counts

logger = logging.getLogger(__name__)

NON_ROOT = -1
UNDECIDED = 0
ROOT = 1

# fractional bits of the random tie-breakers; keeps influence_count + r exact
RANDOM_BITS = 32


def random_values(n: int, seed: int, stream: int = 0) -> np.ndarray:
    """
    Uniform values in (0, 1) from a counter-based generator.

    Value i depends only on (seed, stream, i), so the same node always draws
    the same number whatever order nodes are visited in.
    """
    key = np.array([seed % 2 ** 64, stream % 2 ** 64], dtype=np.uint64)
    bits = np.random.Philox(key=key).random_raw(n).astype(np.uint64)
    return ((bits >> np.uint64(64 - RANDOM_BITS)).astype(np.float64) + 0.5) * 2.0 ** -RANDOM_BITS


@dataclass(frozen=True)
class MisState:
    """
    Final node states of the distance-two independent set.

    ``s`` holds -1 (non-root), 0 (undecided) or 1 (root); ``v`` is the
    influence count plus the random value ``r``.
    """
    s: np.ndarray
    v: np.ndarray
    r: np.ndarray
    sweeps: int = 0

    @property
    def n(self) -> int:
        return self.s.shape[0]

    def roots(self) -> np.ndarray:
        return np.flatnonzero(self.s == ROOT)


@dataclass(frozen=True)
class Aggregation:
    """
    Map from fine nodes to aggregates.

    Aggregates are numbered 0..n_coarse-1 in increasing order of their root.
    """
    agg: np.ndarray
    roots: np.ndarray

    @property
    def n_fine(self) -> int:
        return self.agg.shape[0]

    @property
    def n_coarse(self) -> int:
        return self.roots.shape[0]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.agg, minlength=self.n_coarse)

    def members(self, aggregate: int) -> np.ndarray:
        return np.flatnonzero(self.agg == aggregate)

    @classmethod
    def identity(cls, n: int) -> "Aggregation":
        return cls(np.arange(n, dtype=INDEX_DTYPE), np.arange(n, dtype=INDEX_DTYPE))


def neighborhood_graph(strength: StrengthGraph) -> SparseMatrix:
    """
    Symmetrised strength pattern over the nodes that have strong connections.

    Nodes with an empty strength row are left isolated. The weight of edge
    {i, j} is the larger coupling magnitude of the two directions.
    """
    C = strength.C
    active = ~strength.empty_rows()
    rows, cols = C.row_ids(), C.col_indices
    keep = active[rows] & active[cols]
    rows, cols, weights = rows[keep], cols[keep], C.values[keep]
    return _compress(np.concatenate([rows, cols]), np.concatenate([cols, rows]),
                     np.concatenate([weights, weights]), C.n_rows, C.n_cols, fold=np.maximum)


def _neighborhood_max(graph: SparseMatrix, keys: np.ndarray) -> np.ndarray:
    """max(keys[i], keys[j] for j adjacent to i), for every node i."""
    around = segment_reduce(keys[graph.col_indices], graph.row_offsets, fold=np.maximum, empty=-1)
    return np.maximum(keys, around)


def mis2(strength: StrengthGraph, seed: int, stream: int = 0,
         graph: Optional[SparseMatrix] = None) -> MisState:
    """
    Distance-two maximal independent set of the neighbourhood graph.

    Nodes with an empty strength row are roots from the start and take no
    part in the competition.

    Args:
        strength: Strength graph of the level
        seed: Random seed
        stream: Independent random stream, the level number during setup
        graph: Precomputed ``neighborhood_graph(strength)``

    Returns:
        Terminated state: every node is a root or a non-root
    """
    n = strength.n
    graph = neighborhood_graph(strength) if graph is None else graph
    r = random_values(n, seed, stream)
    v = influence_counts(strength) + r

    # (v, index) order is fixed, so the tuple order is (s + 1) * n + rank
    rank = np.empty(n, dtype=INDEX_DTYPE)
    rank[np.lexsort((np.arange(n), v))] = np.arange(n, dtype=INDEX_DTYPE)

    s = np.zeros(n, dtype=np.int8)
    s[strength.empty_rows()] = ROOT
    sweeps = 0
    while (s == UNDECIDED).any():
        keys = (s.astype(INDEX_DTYPE) + 1) * n + rank
        reach = _neighborhood_max(graph, _neighborhood_max(graph, keys))
        undecided = s == UNDECIDED
        winners = undecided & (reach == keys)
        losers = undecided & ~winners & (reach >= (ROOT + 1) * n)
        s[winners] = ROOT
        s[losers] = NON_ROOT
        sweeps += 1
        logger.debug("mis2 sweep %d: %d roots, %d undecided", sweeps,
                     np.count_nonzero(s == ROOT), np.count_nonzero(s == UNDECIDED))
    return MisState(s, v, r, sweeps)


def aggregate(strength: StrengthGraph, mis: MisState, graph: Optional[SparseMatrix] = None) -> Aggregation:
    """
    Group every node around a root.

    Roots seed the aggregates. Nodes adjacent to a root join it; remaining
    nodes join the aggregate of an adjacent node from the first pass, taking
    the heaviest edge and then the lowest aggregate index. Anything left over
    forms a singleton aggregate.
    """
    graph = neighborhood_graph(strength) if graph is None else graph
    n = mis.n
    rows, cols = graph.row_ids(), graph.col_indices

    root_of = np.full(n, -1, dtype=INDEX_DTYPE)
    roots = mis.roots()
    root_of[roots] = roots

    first = (root_of[rows] == -1) & (mis.s[cols] == ROOT)
    root_of[rows[first]] = cols[first]

    second = (root_of[rows] == -1) & (root_of[cols] != -1)
    if second.any():
        r, target, w = rows[second], root_of[cols[second]], graph.values[second]
        # roots are ordered like their aggregates, so the lowest root is the lowest index
        order = np.lexsort((target, -w, r))
        r, target = r[order], target[order]
        _, pick = np.unique(r, return_index=True)
        root_of[r[pick]] = target[pick]

    leftover = np.flatnonzero(root_of == -1)
    if leftover.shape[0]:
        logger.debug("aggregate: %d leftover nodes become singletons", leftover.shape[0])
        root_of[leftover] = leftover

    roots = np.unique(root_of)
    agg = np.searchsorted(roots, root_of).astype(INDEX_DTYPE)
    return Aggregation(agg, roots.astype(INDEX_DTYPE))
