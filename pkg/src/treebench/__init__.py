"""treebench: synthetic tree benchmarks and graph-geometry diagnostics.

Subpackages cover the full pipeline: graph containers and exact hop
distances (graph), Gromov four-point delta (hyperbolicity), per-edge
Ollivier-Ricci curvature (ricci), hyperboloid-model embedding primitives
(hyperboloid), the parametric Tree(b, levels, gamma, delta) dataset
family (treegen), Euclidean link-prediction baselines and probes
(baselines, probes, sweep), and a CLI (cli).
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    baselines,
    graph,
    hyperbolicity,
    hyperboloid,
    probes,
    ricci,
    sweep,
    treegen,
)
