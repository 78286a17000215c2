"""Initialization-time behavior of attention and sampling aggregators.

When node features are i.i.d. Gaussian, graph attention cannot prefer any
neighbor in expectation: the attention a node pays each neighbor averages
exactly 1/degree, and mean-pool aggregation produces coordinates with
variance 1/degree. These probes measure both effects by Monte Carlo at
initialization; neither aggregator is trained here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import rng
from .graph import Graph, degrees

LEAKY_RELU_SLOPE = 0.2
ATTENTION_INPUT_SCALE = 1.0  # attention vector entries uniform in [-s, s]


@dataclass(frozen=True)
class AttentionStats:
    """Per-directed-edge mean attention versus the uniform 1/degree."""

    src: np.ndarray            # directed edge sources (CSR order)
    dst: np.ndarray            # directed edge targets
    mean_alpha: np.ndarray     # Monte-Carlo mean attention per directed edge
    expected: np.ndarray       # 1/degree(src) per directed edge
    max_dev_per_node: np.ndarray

    def node_deviation(self, node: int) -> float:
        return float(self.max_dev_per_node[node])


@dataclass(frozen=True)
class AggregationStats:
    """Per-node empirical variance of mean-pooled neighbors."""

    variance: np.ndarray   # avg over coordinates and trials of m_i^2
    expected: np.ndarray   # 1/degree
    ratio: np.ndarray      # variance * degree


def _leaky_relu(z: np.ndarray) -> np.ndarray:
    return np.where(z >= 0, z, LEAKY_RELU_SLOPE * z)


def gat_attention_concentration(
    g: Graph, dim: int, trials: int, seed: int
) -> AttentionStats:
    """Monte-Carlo mean of single-head graph-attention weights at init.

    Per trial: features X ~ N(0, I_dim) per node, square weight matrix W
    with N(0, 1/dim) entries, attention vector a uniform in [-s, s]^(2 dim),
    LeakyReLU slope 0.2, softmax over each node's neighbors. The attention
    logit for (i, j) is a^T [W x_i; W x_j] = (W^T a1) . x_i + (W^T a2) . x_j,
    so only the two projected vectors are sampled, from their exact joint
    Gaussian given a; this is distribution-identical to materializing W.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = g.num_nodes
    deg = degrees(g)
    src = np.repeat(np.arange(n), deg)
    dst = g.adj_neighbors
    offsets = g.adj_offsets
    gen = rng.keyed_rng(seed, rng.PROBE_GAT)

    alpha_sum = np.zeros(len(dst))
    for _ in range(trials):
        x = gen.standard_normal((n, dim))
        a1 = gen.uniform(-ATTENTION_INPUT_SCALE, ATTENTION_INPUT_SCALE, dim)
        a2 = gen.uniform(-ATTENTION_INPUT_SCALE, ATTENTION_INPUT_SCALE, dim)
        cov = np.array([[a1 @ a1, a1 @ a2], [a1 @ a2, a2 @ a2]]) / dim
        chol = np.linalg.cholesky(cov + 1e-300 * np.eye(2))
        pq = chol @ gen.standard_normal((2, dim))
        s_i = x @ pq[0]
        s_j = x @ pq[1]

        logits = _leaky_relu(s_i[src] + s_j[dst])
        seg_max = np.maximum.reduceat(logits, offsets[:-1])
        ex = np.exp(logits - seg_max[src])
        seg_sum = np.add.reduceat(ex, offsets[:-1])
        alpha_sum += ex / seg_sum[src]

    mean_alpha = alpha_sum / trials
    expected = 1.0 / deg[src]
    dev = np.abs(mean_alpha - expected)
    max_dev = np.maximum.reduceat(dev, offsets[:-1])
    return AttentionStats(src, dst, mean_alpha, expected, max_dev)


def sage_aggregation_covariance(
    g: Graph, dim: int, trials: int, seed: int
) -> AggregationStats:
    """Empirical variance of mean-aggregated i.i.d. neighbor features.

    For each node the aggregate of N(0, I) neighbor rows has per-coordinate
    variance 1/degree; the estimate averages squared coordinates over all
    trials and dimensions.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = g.num_nodes
    deg = degrees(g).astype(np.float64)
    mean_op = sp.csr_matrix(
        (np.repeat(1.0 / deg, deg.astype(int)), g.adj_neighbors, g.adj_offsets),
        shape=(n, n),
    )
    gen = rng.keyed_rng(seed, rng.PROBE_SAGE)
    acc = np.zeros(n)
    for _ in range(trials):
        x = gen.standard_normal((n, dim))
        agg = mean_op @ x
        acc += np.einsum("ij,ij->i", agg, agg)
    variance = acc / (trials * dim)
    return AggregationStats(variance, 1.0 / deg, variance * deg)
