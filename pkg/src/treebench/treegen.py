"""Parametric synthetic tree datasets and link-prediction splits.

A dataset is a complete b-ary tree (BFS node numbering, root 0) plus a
feature matrix generated level by level: the root row is a standard
Gaussian draw, and every other row is

    gamma * parent_row + delta * fresh_draw

so gamma controls how much graph structure leaks into the features (0
means fully i.i.d. features) and delta scales the per-node noise. Draws
come from per-node counter-based streams, so regeneration is
byte-identical for a given seed regardless of evaluation order.

On disk a dataset is a directory: ``graph.edges`` (text edge list),
``features.f32`` (binary matrix, header + row-major float32 LE), and
``meta.json``; splits live in an optional ``splits.json``.
"""

from __future__ import annotations

import json
import math
import os
import struct
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import rng
from .errors import (
    DatasetIOError,
    FormatError,
    InsufficientEdgesError,
    SizeLimitError,
)
from .graph import Graph, from_edge_list, read_edge_list, write_edge_list

GENERATOR_VERSION = "0.1.0"
FEATURES_MAGIC = b"TBF1"
FEATURES_FORMAT_VERSION = 1
DEFAULT_NODE_CAP = 1_000_000
DEFAULT_FRACS = (0.85, 0.05, 0.10)


@dataclass(frozen=True)
class TreeParams:
    """Parameters of one synthetic tree dataset."""

    b: int
    levels: int
    gamma: float
    delta: float
    dim: int
    seed: int

    def __post_init__(self):
        if self.b < 1 or self.levels < 1 or self.dim < 1:
            raise ValueError("b, levels and dim must be >= 1")
        if self.gamma < 0 or self.delta < 0:
            raise ValueError("gamma and delta must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def num_nodes(self) -> int:
        if self.b == 1:
            return self.levels + 1
        return (self.b ** (self.levels + 1) - 1) // (self.b - 1)


@dataclass(frozen=True)
class Dataset:
    """Graph plus dense features; params present only for generated data."""

    graph: Graph
    features: np.ndarray  # (num_nodes, dim) float32
    params: TreeParams | None
    meta: dict

    @property
    def name(self) -> str:
        return self.meta.get("name", "dataset")


@dataclass(frozen=True)
class SplitSpec:
    """Link-prediction split: positive edge partition plus negatives."""

    train_pos: np.ndarray
    val_pos: np.ndarray
    test_pos: np.ndarray
    val_neg: np.ndarray
    test_neg: np.ndarray
    fracs: tuple[float, float, float]
    seed: int


def default_name(params: TreeParams) -> str:
    base = f"Tree{params.num_nodes}"
    if params.gamma != 0:
        return f"{base}_{params.gamma:g}"
    return base


def generate_graph(params: TreeParams, node_cap: int = DEFAULT_NODE_CAP) -> Graph:
    """Complete b-ary tree with BFS numbering (root 0, then level order)."""
    n = params.num_nodes
    if n > node_cap:
        raise SizeLimitError(n, node_cap, "tree")
    # Heap-style numbering: children of i are b*i + 1 .. b*i + b.
    b = params.b
    parents = np.repeat(np.arange(n, dtype=np.int64), b)[: n - 1]
    children = np.arange(1, n, dtype=np.int64)
    return from_edge_list(np.column_stack([parents, children]))


def generate_features(params: TreeParams, g: Graph) -> np.ndarray:
    """Feature matrix for the tree, float32, deterministic per seed."""
    n = g.num_nodes
    dim = params.dim
    x = np.empty((n, dim), dtype=np.float64)
    for node in range(n):
        draw = rng.keyed_rng(params.seed, rng.FEATURES, node).standard_normal(dim)
        if node == 0:
            x[node] = draw
        else:
            parent = (node - 1) // params.b
            x[node] = params.gamma * x[parent] + params.delta * draw
    return x.astype(np.float32)


def generate_dataset(params: TreeParams, name: str | None = None) -> Dataset:
    g = generate_graph(params)
    feats = generate_features(params, g)
    meta = {
        "name": name or default_name(params),
        "b": params.b,
        "l": params.levels,
        "gamma": params.gamma,
        "delta": params.delta,
        "dim": params.dim,
        "seed": params.seed,
        "generator_version": GENERATOR_VERSION,
    }
    return Dataset(g, feats, params, meta)


def _round_half(x: float) -> int:
    # Exact .5 rounds down so Tree1111 defaults come out 944/55/111.
    return int(math.ceil(x - 0.5))


def make_splits(
    ds: Dataset,
    fracs: tuple[float, float, float] = DEFAULT_FRACS,
    seed: int = 0,
) -> SplitSpec:
    """Seeded edge partition plus uniformly sampled non-edge negatives.

    Val/test sizes are the rounded-half-up fraction of the edge count;
    train takes the remainder. Negatives match the val/test positive
    counts, are verified non-edges, and are deduplicated. On a tree the
    training positives alone always disconnect the graph (every edge is a
    bridge); that is a property of the protocol, not an error.
    """
    if any(f < 0 for f in fracs) or abs(sum(fracs) - 1.0) > 1e-9:
        raise ValueError("fractions must be non-negative and sum to 1")
    g = ds.graph
    m = g.num_edges
    n_val = _round_half(m * fracs[1])
    n_test = _round_half(m * fracs[2])
    n_train = m - n_val - n_test
    if n_train <= 0 or n_val <= 0 or n_test <= 0:
        raise InsufficientEdgesError(
            f"split sizes train={n_train} val={n_val} test={n_test}"
        )

    perm = rng.keyed_rng(seed, rng.SPLIT_EDGES).permutation(m)
    edges = ds.graph.edges
    train_pos = edges[np.sort(perm[:n_train])]
    val_pos = edges[np.sort(perm[n_train:n_train + n_val])]
    test_pos = edges[np.sort(perm[n_train + n_val:])]

    existing = g.edge_set()
    gen = rng.keyed_rng(seed, rng.SPLIT_NEG)
    negs: list[tuple[int, int]] = []
    chosen: set[tuple[int, int]] = set()
    need = n_val + n_test
    available = g.num_nodes * (g.num_nodes - 1) // 2 - m
    if need > available:
        raise InsufficientEdgesError(
            f"need {need} negatives but only {available} non-edges exist"
        )
    while len(negs) < need:
        cand = gen.integers(0, g.num_nodes, size=(max(64, 2 * need), 2))
        for u, v in cand:
            if u == v:
                continue
            key = (int(min(u, v)), int(max(u, v)))
            if key in existing or key in chosen:
                continue
            chosen.add(key)
            negs.append(key)
            if len(negs) == need:
                break
    neg_arr = np.array(negs, dtype=np.int64)
    return SplitSpec(
        train_pos=train_pos,
        val_pos=val_pos,
        test_pos=test_pos,
        val_neg=neg_arr[:n_val],
        test_neg=neg_arr[n_val:],
        fracs=tuple(fracs),
        seed=seed,
    )


# --- on-disk format ---

def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _features_bytes(features: np.ndarray) -> bytes:
    rows, cols = features.shape
    header = FEATURES_MAGIC + struct.pack(
        "<IQQ", FEATURES_FORMAT_VERSION, rows, cols
    )
    body = np.ascontiguousarray(features, dtype="<f4").tobytes()
    return header + body


def _parse_features(data: bytes) -> np.ndarray:
    if len(data) < 24:
        raise FormatError("shape_mismatch", "features file shorter than header")
    if data[:4] != FEATURES_MAGIC:
        raise FormatError("bad_magic", f"expected {FEATURES_MAGIC!r}")
    version, rows, cols = struct.unpack("<IQQ", data[4:24])
    if version != FEATURES_FORMAT_VERSION:
        raise FormatError("version_mismatch", f"format version {version}")
    expect = rows * cols * 4
    if len(data) - 24 != expect:
        raise FormatError(
            "shape_mismatch",
            f"{len(data) - 24} payload bytes for {rows}x{cols} matrix",
        )
    flat = np.frombuffer(data, dtype="<f4", offset=24)
    return flat.reshape(rows, cols).astype(np.float32)


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode()


def write_dataset(ds: Dataset, directory: str | Path) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    lines = [f"{int(u)} {int(v)}" for u, v in ds.graph.edges]
    _atomic_write(d / "graph.edges", ("\n".join(lines) + "\n").encode())
    _atomic_write(d / "features.f32", _features_bytes(ds.features))
    _atomic_write(d / "meta.json", _json_bytes(ds.meta))


def read_dataset(directory: str | Path) -> Dataset:
    d = Path(directory)
    try:
        meta = json.loads((d / "meta.json").read_text())
        graph = read_edge_list(d / "graph.edges")
        features = _parse_features((d / "features.f32").read_bytes())
    except OSError as exc:
        raise DatasetIOError(str(exc)) from exc
    if features.shape[0] != graph.num_nodes:
        raise FormatError(
            "shape_mismatch",
            f"{features.shape[0]} feature rows for {graph.num_nodes} nodes",
        )
    if not np.all(np.isfinite(features)):
        raise FormatError("shape_mismatch", "non-finite feature values")
    params = None
    keys = ("b", "l", "gamma", "delta", "dim", "seed")
    if all(k in meta for k in keys):
        params = TreeParams(
            b=int(meta["b"]),
            levels=int(meta["l"]),
            gamma=float(meta["gamma"]),
            delta=float(meta["delta"]),
            dim=int(meta["dim"]),
            seed=int(meta["seed"]),
        )
    return Dataset(graph, features, params, meta)


def write_splits(splits: SplitSpec, directory: str | Path) -> None:
    d = Path(directory)
    obj = {
        "fracs": list(splits.fracs),
        "seed": splits.seed,
        "train_pos": splits.train_pos.tolist(),
        "val_pos": splits.val_pos.tolist(),
        "test_pos": splits.test_pos.tolist(),
        "val_neg": splits.val_neg.tolist(),
        "test_neg": splits.test_neg.tolist(),
    }
    _atomic_write(d / "splits.json", _json_bytes(obj))


def read_splits(directory: str | Path) -> SplitSpec:
    d = Path(directory)
    try:
        obj = json.loads((d / "splits.json").read_text())
    except OSError as exc:
        raise DatasetIOError(str(exc)) from exc
    as_arr = lambda key: np.array(obj[key], dtype=np.int64).reshape(-1, 2)
    return SplitSpec(
        train_pos=as_arr("train_pos"),
        val_pos=as_arr("val_pos"),
        test_pos=as_arr("test_pos"),
        val_neg=as_arr("val_neg"),
        test_neg=as_arr("test_neg"),
        fracs=tuple(obj["fracs"]),
        seed=int(obj["seed"]),
    )
