"""Gromov delta-hyperbolicity via the four-point condition.

For four nodes, form the three pairings of pairwise-distance sums, sort
them descending as S1 >= S2 >= S3, and take (S1 - S2) / 2. The graph's
delta is the supremum over all node quadruples (repeats allowed). Trees
give exactly 0; the further from 0, the less tree-like the graph.

Deltas are half-integers on the hop metric, so all comparisons happen on
doubled integer values; floats appear only in the returned result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import IndexOutOfRangeError, SizeLimitError
from .graph import DistanceMatrix

EXACT_SIZE_LIMIT = 512


@dataclass(frozen=True)
class DeltaResult:
    """Outcome of a delta computation.

    ``delta`` is a non-negative half-integer; ``witness`` is a quadruple
    that re-evaluates to it. ``mode`` is "exact" or "sampled"; sampled
    results carry the sample count and seed and are lower bounds on the
    exact value (the sampled estimator is this toolkit's extension for
    graphs too large for the O(n^4) scan).
    """

    delta: float
    witness: tuple[int, int, int, int]
    mode: str
    num_samples: int | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        out = {"delta": self.delta, "witness": list(self.witness), "mode": self.mode}
        if self.mode == "sampled":
            out["num_samples"] = self.num_samples
            out["seed"] = self.seed
        return out


def delta_quadruple(dm: DistanceMatrix, x: int, y: int, u: int, v: int) -> float:
    """Four-point delta of one quadruple, in any argument order."""
    n = dm.num_nodes
    for i in (x, y, u, v):
        if not 0 <= i < n:
            raise IndexOutOfRangeError(i, n)
    d = dm.d
    s = sorted(
        (
            int(d[x, y]) + int(d[u, v]),
            int(d[x, u]) + int(d[y, v]),
            int(d[x, v]) + int(d[y, u]),
        ),
        reverse=True,
    )
    return (s[0] - s[1]) / 2.0


def _plane(D: np.ndarray, x: int, y: int) -> np.ndarray:
    """Doubled deltas of all quadruples (x, y, u, v) as an (n, n) array."""
    a = int(D[x, y]) + D                     # d(x,y) + d(u,v)
    b = D[x][:, None] + D[y][None, :]        # d(x,u) + d(y,v)
    c = b.T                                  # d(x,v) + d(y,u)
    hi = np.maximum(np.maximum(a, b), c)
    lo = np.minimum(np.minimum(a, b), c)
    mid = a + b + c - hi - lo
    return hi - mid


def delta_exact(
    dm: DistanceMatrix,
    size_limit: int = EXACT_SIZE_LIMIT,
    force: bool = False,
) -> DeltaResult:
    """Maximum four-point delta over all quadruples, O(n^4).

    The witness is the lexicographically smallest maximizing quadruple.
    Raises ``SizeLimitError`` for graphs above ``size_limit`` nodes unless
    ``force`` is set.
    """
    n = dm.num_nodes
    if n > size_limit and not force:
        raise SizeLimitError(n, size_limit, "exact-mode graph")
    D = dm.d.astype(np.int32)

    # The quadruple delta is invariant under x<->y, u<->v and pair swap,
    # so scanning x <= y planes finds the maximum value.
    best = -1
    plane_max = np.zeros((n, n), dtype=np.int32)
    for x in range(n):
        for y in range(x, n):
            m = int(_plane(D, x, y).max())
            plane_max[x, y] = plane_max[y, x] = m
            if m > best:
                best = m

    # Second pass: first plane in full lexicographic (x, y) order that
    # attains the maximum; row-major argmax inside it completes the
    # lexicographically smallest witness.
    witness = (0, 0, 0, 0)
    for x in range(n):
        ys = np.nonzero(plane_max[x] == best)[0]
        if len(ys):
            y = int(ys[0])
            flat = int(np.argmax(_plane(D, x, y) == best))
            witness = (x, y, flat // n, flat % n)
            break
    return DeltaResult(best / 2.0, witness, "exact")


def delta_sampled(dm: DistanceMatrix, num_samples: int, seed: int) -> DeltaResult:
    """Max four-point delta over uniformly sampled quadruples.

    Deterministic given the seed (counter-based stream); always a lower
    bound on ``delta_exact``.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    n = dm.num_nodes
    gen = rng.keyed_rng(seed, rng.DELTA_SAMPLE)
    quads = gen.integers(0, n, size=(num_samples, 4))
    D = dm.d.astype(np.int32)
    x, y, u, v = quads.T
    a = D[x, y] + D[u, v]
    b = D[x, u] + D[y, v]
    c = D[x, v] + D[y, u]
    hi = np.maximum(np.maximum(a, b), c)
    lo = np.minimum(np.minimum(a, b), c)
    doubled = hi - (a + b + c - hi - lo)
    i = int(np.argmax(doubled))  # first maximizing sample
    return DeltaResult(
        int(doubled[i]) / 2.0,
        tuple(int(t) for t in quads[i]),
        "sampled",
        num_samples=num_samples,
        seed=seed,
    )
