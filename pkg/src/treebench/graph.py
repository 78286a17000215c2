"""Immutable undirected graph and exact all-pairs hop distances.

The graph container enforces the assumptions every downstream metric
relies on: 0-based dense node indices, no self-loops or duplicate edges,
symmetric adjacency, and connectivity. Distances are unweighted shortest
paths (edge counts) stored densely as 16-bit hop counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    DisconnectedError,
    EmptyInputError,
    FormatError,
    IndexOutOfRangeError,
    SelfLoopError,
    SizeLimitError,
)

MAX_HOPS = int(np.iinfo(np.uint16).max)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Graph:
    """Connected undirected graph in compressed adjacency form.

    ``edges`` holds each undirected edge once as ``(u, v)`` with ``u < v``,
    sorted lexicographically. ``adj_offsets``/``adj_neighbors`` form the
    usual CSR layout with neighbor lists sorted ascending. Instances are
    immutable and safe to share across threads.
    """

    num_nodes: int
    edges: np.ndarray
    adj_offsets: np.ndarray
    adj_neighbors: np.ndarray

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def neighbors(self, u: int) -> np.ndarray:
        self.check_node(u)
        return self.adj_neighbors[self.adj_offsets[u]:self.adj_offsets[u + 1]]

    def degree(self, u: int) -> int:
        self.check_node(u)
        return int(self.adj_offsets[u + 1] - self.adj_offsets[u])

    def has_edge(self, u: int, v: int) -> bool:
        self.check_node(u)
        self.check_node(v)
        nbrs = self.adj_neighbors[self.adj_offsets[u]:self.adj_offsets[u + 1]]
        i = int(np.searchsorted(nbrs, v))
        return i < len(nbrs) and int(nbrs[i]) == v

    def check_node(self, u: int) -> None:
        if not 0 <= u < self.num_nodes:
            raise IndexOutOfRangeError(u, self.num_nodes)

    def edge_set(self) -> set[tuple[int, int]]:
        """Set of (u, v) tuples with u < v; built on demand."""
        return {(int(u), int(v)) for u, v in self.edges}

    def to_sparse(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency as a scipy CSR matrix."""
        data = np.ones(len(self.adj_neighbors), dtype=np.int8)
        return sp.csr_matrix(
            (data, self.adj_neighbors, self.adj_offsets),
            shape=(self.num_nodes, self.num_nodes),
        )

    def is_tree(self) -> bool:
        return self.num_edges == self.num_nodes - 1


@dataclass(frozen=True)
class DistanceMatrix:
    """Dense exact hop-count distances between all node pairs."""

    num_nodes: int
    d: np.ndarray  # (n, n) uint16

    def hops(self, u: int, v: int) -> int:
        return int(self.d[u, v])


def from_edge_list(pairs: Iterable[Sequence[int]]) -> Graph:
    """Build a validated Graph from unordered node-index pairs.

    Duplicate pairs and (u, v)/(v, u) repeats collapse to a single edge.
    Raises ``SelfLoopError`` on any u == v pair, ``DisconnectedError`` if
    the resulting graph is not connected, ``EmptyInputError`` on no pairs.
    """
    arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs)
    if arr.size == 0:
        raise EmptyInputError("edge list is empty")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise FormatError("shape_mismatch", "edge list must be pairs")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.floor(arr)):
            raise FormatError("shape_mismatch", "node indices must be integers")
        arr = arr.astype(np.int64)
    arr = arr.astype(np.int64, copy=False)
    if arr.min() < 0:
        raise IndexOutOfRangeError(int(arr.min()), 0)

    loops = arr[:, 0] == arr[:, 1]
    if loops.any():
        raise SelfLoopError(int(arr[loops][0, 0]))

    canon = np.sort(arr, axis=1)
    edges = np.unique(canon, axis=0)  # dedups and sorts lexicographically
    num_nodes = int(edges.max()) + 1

    # CSR adjacency from both edge directions.
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    counts = np.bincount(src, minlength=num_nodes)
    offsets = np.zeros(num_nodes + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])

    g = Graph(num_nodes, _frozen(edges), _frozen(offsets), _frozen(dst))
    ncomp = _component_count(g)
    if ncomp != 1:
        raise DisconnectedError(ncomp)
    return g


def _component_count(g: Graph) -> int:
    seen = np.zeros(g.num_nodes, dtype=bool)
    ncomp = 0
    for start in range(g.num_nodes):
        if seen[start]:
            continue
        ncomp += 1
        stack = [start]
        seen[start] = True
        while stack:
            u = stack.pop()
            for v in g.adj_neighbors[g.adj_offsets[u]:g.adj_offsets[u + 1]]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
    return ncomp


def degrees(g: Graph) -> np.ndarray:
    """Per-node neighbor counts, indexed by node id."""
    return np.diff(g.adj_offsets)


def apsp(g: Graph, batch: int = 2048) -> DistanceMatrix:
    """Exact unweighted all-pairs shortest-path hop counts.

    Runs breadth-first search from every source, with sources batched so
    each BFS level is one sparse-dense matmul. Results are bit-identical
    regardless of batch size.
    """
    n = g.num_nodes
    adj = g.to_sparse()
    dist = np.full((n, n), MAX_HOPS, dtype=np.uint16)
    np.fill_diagonal(dist, 0)

    for lo in range(0, n, batch):
        hi = min(lo + batch, n)
        m = hi - lo
        # frontier[:, s] marks the current BFS level of source lo + s
        frontier = np.zeros((n, m), dtype=np.int32)
        frontier[np.arange(lo, hi), np.arange(m)] = 1
        reached = frontier.astype(bool)
        level = 0
        while True:
            level += 1
            if level > MAX_HOPS:
                raise SizeLimitError(level, MAX_HOPS, "eccentricity")
            nxt = (adj @ frontier > 0) & ~reached
            if not nxt.any():
                break
            rows, cols = np.nonzero(nxt)
            dist[cols + lo, rows] = level
            reached |= nxt
            frontier = nxt.astype(np.int32)
        if not reached.all():  # unreachable given a validated Graph
            raise DisconnectedError(2)
    return DistanceMatrix(n, _frozen(dist))


# --- edge-list text format ---
# One edge per line: two 0-based decimal node indices separated by a single
# space. Lines starting with '#' are comments. Canonical file name:
# "graph.edges".

def write_edge_list(g: Graph, path: str | Path) -> None:
    lines = [f"{int(u)} {int(v)}" for u, v in g.edges]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path: str | Path) -> Graph:
    pairs = []
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError("shape_mismatch", f"line {ln}: expected two indices")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise FormatError("shape_mismatch", f"line {ln}: {raw!r}") from exc
    if not pairs:
        raise EmptyInputError(f"no edges in {path}")
    return from_edge_list(pairs)
