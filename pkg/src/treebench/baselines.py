"""From-scratch Euclidean link-prediction baselines.

Two encoders over node features X: an MLP with layers sigma(X W) that
ignores the graph, and a GCN with layers sigma(A_norm X W) where A_norm is
the symmetric-normalized adjacency with self-loops. Edge probabilities
come from a Fermi-Dirac decoder on squared embedding distance,

    p(u, v) = 1 / (exp(min((||h_u - h_v||^2 - r) / t, clamp)) + 1)

with the exponent clamped at 20 for numerical stability; r and t are
trained along with the weights. Embeddings are never norm-constrained:
forcing Euclidean representations into the unit ball is a known way to
cripple these baselines, so it is deliberately absent here.

Training is full-batch gradient descent with Adam-style updates, binary
cross-entropy on train edges versus freshly resampled non-edges each
epoch, and early stopping on validation ROC AUC. All gradients are
hand-derived; tests hold them to central finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.stats import rankdata

from . import rng
from .errors import ShapeMismatchError, SingleClassError, SizeLimitError
from .graph import Graph
from .treegen import Dataset, SplitSpec

DENSE_ADJACENCY_CAP = 8192
# Fixed scalar preprocessing: dividing features by sqrt(dim) keeps initial
# squared embedding distances within the decoder's responsive range. This
# is a global rescale of the inputs, not a constraint on representations.
INPUT_SCALE_BY_SQRT_DIM = True
_MIN_TEMPERATURE = 1e-3


@dataclass(frozen=True)
class ModelConfig:
    encoder: str = "mlp"  # "mlp" | "gcn"
    hidden_dims: tuple[int, ...] = (256, 256)
    activation: str = "relu"  # fixed
    dropout: float = 0.0
    epochs: int = 200
    learning_rate: float = 1e-2
    weight_decay: float = 0.0
    patience: int = 40
    seed: int = 0
    # GCN propagation graph: "train" keeps held-out edges out of the
    # adjacency (clean protocol); "full" is the legacy transductive
    # variant that lets aggregation see every edge.
    propagation: str = "train"

    def __post_init__(self):
        if self.encoder not in ("mlp", "gcn"):
            raise ValueError(f"unknown encoder {self.encoder!r}")
        if self.propagation not in ("train", "full"):
            raise ValueError(f"unknown propagation {self.propagation!r}")
        if self.activation != "relu":
            raise ValueError("activation is fixed to relu")
        if any(w < 1 for w in self.hidden_dims):
            raise ValueError("layer widths must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")

    def to_dict(self) -> dict:
        return {
            "encoder": self.encoder,
            "hidden_dims": list(self.hidden_dims),
            "activation": self.activation,
            "dropout": self.dropout,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "weight_decay": self.weight_decay,
            "patience": self.patience,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class FermiDiracParams:
    r: float = 2.0
    t: float = 1.0
    clamp_max: float = 20.0

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("temperature must be positive")


@dataclass
class TrainReport:
    config: ModelConfig
    dataset_id: str
    per_epoch: list[tuple[float, float]]  # (loss, val_auc)
    test_auc: float
    best_epoch: int
    diverged: bool = False

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "dataset_id": self.dataset_id,
            "per_epoch": [[l, a] for l, a in self.per_epoch],
            "test_auc": self.test_auc,
            "best_epoch": self.best_epoch,
            "diverged": self.diverged,
        }


def normalized_adjacency(
    g: Graph, sparse: bool = False, dense_cap: int = DENSE_ADJACENCY_CAP
):
    """D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I."""
    if not sparse and g.num_nodes > dense_cap:
        raise SizeLimitError(g.num_nodes, dense_cap, "dense normalized adjacency")
    mat = _norm_adj_sparse(g.num_nodes, g.edges)
    return mat if sparse else mat.toarray()


def _norm_adj_sparse(num_nodes: int, edges: np.ndarray) -> sp.csr_matrix:
    src = np.concatenate([edges[:, 0], edges[:, 1], np.arange(num_nodes)])
    dst = np.concatenate([edges[:, 1], edges[:, 0], np.arange(num_nodes)])
    a_bar = sp.csr_matrix(
        (np.ones(len(src)), (src, dst)), shape=(num_nodes, num_nodes)
    )
    inv_sqrt = 1.0 / np.sqrt(np.asarray(a_bar.sum(axis=1)).ravel())
    d = sp.diags(inv_sqrt)
    return (d @ a_bar @ d).tocsr()


# --- parameters and forward passes ---

@dataclass
class ModelParams:
    """Trainable state: layer weights plus decoder offset/temperature."""

    weights: list[np.ndarray]
    r: float
    t: float

    def copy(self) -> "ModelParams":
        return ModelParams([w.copy() for w in self.weights], self.r, self.t)


def init_params(
    config: ModelConfig, in_dim: int, fd: FermiDiracParams
) -> ModelParams:
    """Glorot-uniform weights from the config's seeded stream."""
    gen = rng.keyed_rng(config.seed, rng.TRAIN_INIT)
    dims = (in_dim, *config.hidden_dims)
    weights = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(gen.uniform(-limit, limit, size=(fan_in, fan_out)))
    return ModelParams(weights, fd.r, fd.t)


def _check_in_dim(weights, x):
    if x.shape[1] != weights[0].shape[0]:
        raise ShapeMismatchError(
            f"features have dim {x.shape[1]}, first layer expects {weights[0].shape[0]}"
        )


def mlp_forward(weights: list[np.ndarray], x: np.ndarray) -> np.ndarray:
    """Per-node embeddings sigma(... sigma(X W1) W2 ...), relu throughout."""
    _check_in_dim(weights, x)
    h = x
    for w in weights:
        h = np.maximum(h @ w, 0.0)
    return h


def gcn_forward(weights: list[np.ndarray], x: np.ndarray, a_norm) -> np.ndarray:
    """As mlp_forward with each layer pre-multiplied by the normalized
    adjacency. Passing the identity reduces exactly to the MLP."""
    _check_in_dim(weights, x)
    h = x
    for w in weights:
        h = np.maximum(a_norm @ (h @ w), 0.0)
    return h


def fermi_dirac(dist, p: FermiDiracParams):
    """Edge probability from (squared) distance; monotone non-increasing,
    exactly flat once the clamp engages."""
    u = np.minimum((np.asarray(dist, dtype=np.float64) - p.r) / p.t, p.clamp_max)
    out = 1.0 / (np.exp(u) + 1.0)
    if np.ndim(dist) == 0:
        return float(out)
    return out


# --- loss and hand-derived gradients ---

def _forward_cached(params: ModelParams, x, a_norm, masks):
    """Forward pass keeping per-layer tensors for backprop."""
    h = x
    caches = []
    for li, w in enumerate(params.weights):
        inp = h if masks is None else h * masks[li]
        pre = a_norm @ inp if a_norm is not None else inp
        z = pre @ w
        h = np.maximum(z, 0.0)
        caches.append((inp, pre, z))
    return h, caches


def link_loss_and_grads(
    params: ModelParams,
    x: np.ndarray,
    a_norm,
    pairs: np.ndarray,
    labels: np.ndarray,
    clamp_max: float = 20.0,
    weight_decay: float = 0.0,
    masks=None,
):
    """Mean BCE of Fermi-Dirac probabilities over the given node pairs.

    Returns (loss, grad_weights, grad_r, grad_t). The L2 penalty
    0.5 * weight_decay * sum ||W||^2 is part of the returned loss so the
    gradients check against finite differences of the same scalar.
    """
    _check_in_dim(params.weights, x)
    h, caches = _forward_cached(params, x, a_norm, masks)
    ia, ib = pairs[:, 0], pairs[:, 1]
    diff = h[ia] - h[ib]
    dist = np.einsum("ij,ij->i", diff, diff)

    u_raw = (dist - params.r) / params.t
    active = u_raw < clamp_max
    u = np.where(active, u_raw, clamp_max)
    y = labels.astype(np.float64)
    losses = y * np.logaddexp(0.0, u) + (1.0 - y) * np.logaddexp(0.0, -u)
    loss = float(losses.mean())
    if weight_decay:
        loss += 0.5 * weight_decay * sum(float((w * w).sum()) for w in params.weights)

    # dL/du = y - sigmoid(-u); clamped samples contribute nothing downstream
    p = 1.0 / (np.exp(u) + 1.0)
    du = (y - p) / len(y)
    du_act = du * active
    grad_r = float(-du_act.sum() / params.t)
    grad_t = float(-(du_act * (dist - params.r)).sum() / params.t**2)

    ddist = du_act / params.t
    dh = np.zeros_like(h)
    contrib = 2.0 * ddist[:, None] * diff
    np.add.at(dh, ia, contrib)
    np.add.at(dh, ib, -contrib)

    grads = [np.empty_like(w) for w in params.weights]
    for li in range(len(params.weights) - 1, -1, -1):
        inp, pre, z = caches[li]
        dz = dh * (z > 0)
        grads[li] = pre.T @ dz
        if weight_decay:
            grads[li] += weight_decay * params.weights[li]
        dpre = dz @ params.weights[li].T
        dinp = a_norm @ dpre if a_norm is not None else dpre
        if masks is not None:
            dinp = dinp * masks[li]
        dh = dinp
    return loss, grads, grad_r, grad_t


# --- metric ---

def roc_auc(scored) -> float:
    """ROC AUC of (score, label) pairs: the Mann-Whitney rank statistic,
    with ties contributing 1/2."""
    items = list(scored)
    scores = np.array([s for s, _ in items], dtype=np.float64)
    labels = np.array([l for _, l in items])
    return _auc_arrays(scores, labels)


def _auc_arrays(scores: np.ndarray, labels: np.ndarray) -> float:
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("both classes are required")
    ranks = rankdata(scores, method="average")
    r_pos = float(ranks[pos].sum())
    return (r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


# --- training ---

class _Adam:
    def __init__(self, shapes, lr, b1=0.9, b2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, b1, b2, eps
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.step_count = 0

    def step(self, values, grads):
        self.step_count += 1
        out = []
        c1 = 1.0 - self.b1**self.step_count
        c2 = 1.0 - self.b2**self.step_count
        for i, (val, g) in enumerate(zip(values, grads)):
            self.m[i] = self.b1 * self.m[i] + (1 - self.b1) * g
            self.v[i] = self.b2 * self.v[i] + (1 - self.b2) * g * g
            out.append(
                val - self.lr * (self.m[i] / c1) / (np.sqrt(self.v[i] / c2) + self.eps)
            )
        return out


def _sample_negatives(gen, num_nodes, edge_set, count):
    """Uniform non-edge pairs (with replacement) via rejection."""
    out = np.empty((count, 2), dtype=np.int64)
    have = 0
    while have < count:
        cand = gen.integers(0, num_nodes, size=(2 * (count - have) + 8, 2))
        for u, v in cand:
            if u == v:
                continue
            if (int(min(u, v)), int(max(u, v))) in edge_set:
                continue
            out[have] = (u, v)
            have += 1
            if have == count:
                break
    return out


def prepare_features(features: np.ndarray) -> np.ndarray:
    x = features.astype(np.float64)
    if INPUT_SCALE_BY_SQRT_DIM:
        x = x / math.sqrt(x.shape[1])
    return x


def train_link_predictor(
    ds: Dataset,
    splits: SplitSpec,
    config: ModelConfig,
    fd: FermiDiracParams = FermiDiracParams(),
) -> TrainReport:
    """Train one encoder on the split and report seeded, reproducible
    results at the best-validation checkpoint."""
    x = prepare_features(ds.features)
    params = init_params(config, x.shape[1], fd)
    a_norm = None
    if config.encoder == "gcn":
        # Propagation uses training edges only; leaking held-out edges
        # through the adjacency would trivialize the benchmark.
        a_norm = _norm_adj_sparse(ds.graph.num_nodes, splits.train_pos)

    edge_set = ds.graph.edge_set()
    n = ds.graph.num_nodes
    pos = splits.train_pos
    val_pairs = np.concatenate([splits.val_pos, splits.val_neg])
    val_labels = np.concatenate(
        [np.ones(len(splits.val_pos)), np.zeros(len(splits.val_neg))]
    )
    test_pairs = np.concatenate([splits.test_pos, splits.test_neg])
    test_labels = np.concatenate(
        [np.ones(len(splits.test_pos)), np.zeros(len(splits.test_neg))]
    )

    opt = _Adam([w.shape for w in params.weights] + [(), ()], config.learning_rate)
    best = params.copy()
    best_auc = -1.0
    best_epoch = -1
    since_improve = 0
    per_epoch: list[tuple[float, float]] = []
    diverged = False

    for epoch in range(config.epochs):
        neg = _sample_negatives(
            rng.keyed_rng(config.seed, rng.TRAIN_NEG, epoch), n, edge_set, len(pos)
        )
        pairs = np.concatenate([pos, neg])
        labels = np.concatenate([np.ones(len(pos)), np.zeros(len(neg))])
        masks = None
        if config.dropout > 0:
            mgen = rng.keyed_rng(config.seed, rng.TRAIN_NEG, config.epochs + epoch)
            keep = 1.0 - config.dropout
            dims = [x.shape[1], *[w.shape[0] for w in params.weights[1:]]]
            masks = [
                (mgen.uniform(size=(x.shape[0], d)) < keep) / keep for d in dims
            ]
        loss, grads, grad_r, grad_t = link_loss_and_grads(
            params, x, a_norm, pairs, labels, fd.clamp_max,
            config.weight_decay, masks,
        )
        if not math.isfinite(loss):
            diverged = True
            per_epoch.append((loss, float("nan")))
            break
        new_vals = opt.step(
            params.weights + [np.float64(params.r), np.float64(params.t)],
            grads + [np.float64(grad_r), np.float64(grad_t)],
        )
        params.weights = new_vals[:-2]
        params.r = float(new_vals[-2])
        params.t = max(float(new_vals[-1]), _MIN_TEMPERATURE)

        val_auc = _eval_auc(params, x, a_norm, val_pairs, val_labels, fd.clamp_max)
        per_epoch.append((loss, val_auc))
        if val_auc > best_auc:
            best_auc = val_auc
            best_epoch = epoch
            best = params.copy()
            since_improve = 0
        else:
            since_improve += 1
            if since_improve >= config.patience:
                break

    test_auc = _eval_auc(best, x, a_norm, test_pairs, test_labels, fd.clamp_max)
    return TrainReport(
        config=config,
        dataset_id=ds.name,
        per_epoch=per_epoch,
        test_auc=test_auc,
        best_epoch=best_epoch,
        diverged=diverged,
    )


def _eval_auc(params, x, a_norm, pairs, labels, clamp_max) -> float:
    if a_norm is not None:
        h = gcn_forward(params.weights, x, a_norm)
    else:
        h = mlp_forward(params.weights, x)
    diff = h[pairs[:, 0]] - h[pairs[:, 1]]
    dist = np.einsum("ij,ij->i", diff, diff)
    probs = fermi_dirac(dist, FermiDiracParams(params.r, params.t, clamp_max))
    return _auc_arrays(probs, labels)
