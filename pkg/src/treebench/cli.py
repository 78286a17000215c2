"""Command-line interface.

Subcommands map one-to-one onto library operations: ``generate`` and
``split`` produce dataset directories, ``diagnose delta`` / ``diagnose
ricci`` measure graph geometry, ``embed`` lays a tree out in the
hyperbolic plane, ``train`` fits one baseline, and ``sweep`` runs the
gamma grid. Machine-readable JSON goes to stdout, human summaries to
stderr. Exit codes: 0 success, 1 usage error, 2 data or solver error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import (
    FermiDiracParams,
    ModelConfig,
    train_link_predictor,
)
from .errors import TreebenchError
from .graph import apsp
from .hyperbolicity import delta_exact, delta_sampled
from .hyperboloid import average_distortion, tree_embed
from .ricci import DEFAULT_BIN_WIDTH, curvature_profile
from .sweep import DEFAULT_GRID, REDUCED_DIM, gamma_sweep
from .treegen import (
    DEFAULT_FRACS,
    TreeParams,
    generate_dataset,
    make_splits,
    read_dataset,
    write_dataset,
    write_splits,
)

THREADS_ENV = "TREEBENCH_THREADS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV)
    if env and env.isdigit():
        return max(1, int(env))
    return os.cpu_count() or 1


def _atomic_text(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _fracs(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated fractions")
    return tuple(parts)


def _gamma_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treebench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"treebench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("generate", help="generate a synthetic tree dataset")
    p.add_argument("--b", type=int, required=True, help="branch factor (>= 1)")
    p.add_argument("--levels", type=int, required=True, help="tree depth below the root")
    p.add_argument("--gamma", type=float, default=0.0, help="parental feature dependence")
    p.add_argument("--delta", type=float, default=1.0, help="feature noise scale")
    p.add_argument("--dim", type=int, default=1000, help="feature dimension")
    p.add_argument("--seed", type=int, default=0, help="generation seed")
    p.add_argument("--out", required=True, help="output dataset directory")

    p = sub.add_parser("split", help="write link-prediction splits for a dataset")
    p.add_argument("--dataset", required=True, help="dataset directory")
    p.add_argument("--fracs", type=_fracs, default=DEFAULT_FRACS,
                   help="train,val,test fractions (default 0.85,0.05,0.10)")
    p.add_argument("--seed", type=int, default=0, help="split seed")

    p = sub.add_parser("diagnose", help="geometric diagnostics")
    dsub = p.add_subparsers(dest="diagnostic", required=True, metavar="WHAT")

    pd = dsub.add_parser("delta", help="Gromov four-point delta of the graph")
    pd.add_argument("--dataset", required=True, help="dataset directory")
    mode = pd.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="scan all quadruples (default)")
    mode.add_argument("--samples", type=int, help="sample this many quadruples instead")
    pd.add_argument("--seed", type=int, default=0, help="sampling seed")
    pd.add_argument("--size-limit", type=int, default=512,
                    help="node cap for exact mode")
    pd.add_argument("--force", action="store_true",
                    help="run exact mode past the node cap")

    pr = dsub.add_parser("ricci", help="per-edge Ollivier-Ricci curvature")
    pr.add_argument("--dataset", required=True, help="dataset directory")
    pr.add_argument("--hist-width", type=float, default=DEFAULT_BIN_WIDTH,
                    help="histogram bin width")
    pr.add_argument("--out", required=True, help="output CSV path")
    pr.add_argument("--threads", type=int, help="worker thread cap")

    p = sub.add_parser("embed", help="embed a tree dataset in the hyperbolic plane")
    p.add_argument("--dataset", required=True, help="dataset directory")
    p.add_argument("--curvature", type=float, default=-1.0, help="curvature K < 0")
    p.add_argument("--tau", type=float, default=1.0, help="geodesic edge length")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("train", help="train a link-prediction baseline")
    p.add_argument("--dataset", required=True, help="dataset directory (with splits.json)")
    p.add_argument("--model", choices=("mlp", "gcn"), default="mlp")
    p.add_argument("--seed", type=int, default=0, help="training seed")
    p.add_argument("--config", help="JSON file with ModelConfig overrides")
    p.add_argument("--epochs", type=int, help="override epoch count")
    p.add_argument("--lr", type=float, help="override learning rate")
    p.add_argument("--out", help="write the full training report JSON here")

    p = sub.add_parser("sweep", help="gamma sweep with per-point tuning")
    p.add_argument("--gammas", type=_gamma_list, required=True,
                   help="comma-separated gamma values")
    p.add_argument("--trials", type=int, default=5, help="seeds per gamma")
    p.add_argument("--b", type=int, default=10, help="branch factor")
    p.add_argument("--levels", type=int, default=3, help="tree depth")
    p.add_argument("--delta", type=float, default=1.0, help="feature noise scale")
    p.add_argument("--dim", type=int, default=REDUCED_DIM,
                   help=f"feature dimension (default {REDUCED_DIM}, reduced profile)")
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--model", choices=("mlp", "gcn"), default="mlp")
    p.add_argument("--config", help="JSON file with ModelConfig overrides")
    p.add_argument("--out", required=True, help="output CSV path")

    return parser


def _load_config(args, encoder: str) -> ModelConfig:
    """flags > config JSON > built-in defaults"""
    overrides = {}
    if getattr(args, "config", None):
        overrides.update(json.loads(Path(args.config).read_text()))
    cfg = ModelConfig(encoder=encoder)
    if "hidden_dims" in overrides:
        overrides["hidden_dims"] = tuple(overrides["hidden_dims"])
    fields = {k: v for k, v in overrides.items() if k in ModelConfig.__dataclass_fields__}
    cfg = replace(cfg, **fields, encoder=encoder)
    if getattr(args, "epochs", None):
        cfg = replace(cfg, epochs=args.epochs)
    if getattr(args, "lr", None):
        cfg = replace(cfg, learning_rate=args.lr)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _cmd_generate(args) -> int:
    params = TreeParams(args.b, args.levels, args.gamma, args.delta, args.dim, args.seed)
    ds = generate_dataset(params)
    write_dataset(ds, args.out)
    print(f"wrote {ds.name}: {ds.graph.num_nodes} nodes, "
          f"{ds.graph.num_edges} edges, dim {args.dim} -> {args.out}", file=sys.stderr)
    _emit({"name": ds.name, "nodes": ds.graph.num_nodes,
           "edges": ds.graph.num_edges, "dim": args.dim, "out": args.out})
    return 0


def _cmd_split(args) -> int:
    ds = read_dataset(args.dataset)
    splits = make_splits(ds, args.fracs, args.seed)
    write_splits(splits, args.dataset)
    counts = {
        "train_pos": len(splits.train_pos),
        "val_pos": len(splits.val_pos),
        "test_pos": len(splits.test_pos),
        "val_neg": len(splits.val_neg),
        "test_neg": len(splits.test_neg),
    }
    print(f"split {ds.name}: {counts}", file=sys.stderr)
    _emit({"dataset": ds.name, "seed": args.seed, **counts})
    return 0


def _cmd_delta(args) -> int:
    ds = read_dataset(args.dataset)
    dm = apsp(ds.graph)
    if args.samples:
        res = delta_sampled(dm, args.samples, args.seed)
    else:
        res = delta_exact(dm, size_limit=args.size_limit, force=args.force)
    print(f"delta({ds.name}) = {res.delta} [{res.mode}]", file=sys.stderr)
    _emit(res.to_dict())
    return 0


def _cmd_ricci(args) -> int:
    ds = read_dataset(args.dataset)
    dm = apsp(ds.graph)
    profile = curvature_profile(ds.graph, dm, bin_width=args.hist_width,
                                max_workers=_threads(args))
    lines = ["x,y,kappa,transport_cost"]
    for ec in profile.edges:
        lines.append(f"{ec.edge[0]},{ec.edge[1]},{ec.kappa!r},{ec.transport_cost!r}")
    _atomic_text(Path(args.out), "\n".join(lines) + "\n")
    kappas = profile.kappas()
    print(f"ricci({ds.name}): {len(profile.edges)} edges, "
          f"kappa in [{kappas.min():.4f}, {kappas.max():.4f}] -> {args.out}",
          file=sys.stderr)
    _emit({"dataset": ds.name, "bin_width": args.hist_width,
           "histogram": profile.histogram_dicts()})
    return 0


def _cmd_embed(args) -> int:
    ds = read_dataset(args.dataset)
    emb = tree_embed(ds.graph, args.curvature, args.tau)
    distortion = average_distortion(ds.graph, emb, args.curvature, args.tau)
    lines = ["node,x0,x1,x2"]
    for node in range(ds.graph.num_nodes):
        c = emb[node].coords
        lines.append(f"{node},{c[0]!r},{c[1]!r},{c[2]!r}")
    _atomic_text(Path(args.out), "\n".join(lines) + "\n")
    print(f"embedded {ds.name} at K={args.curvature}, tau={args.tau}: "
          f"avg distortion {distortion:.6f} -> {args.out}", file=sys.stderr)
    _emit({"K": args.curvature, "tau": args.tau, "distortion": distortion})
    return 0


def _cmd_train(args) -> int:
    from .treegen import read_splits

    ds = read_dataset(args.dataset)
    splits = read_splits(args.dataset)
    cfg = _load_config(args, args.model)
    report = train_link_predictor(ds, splits, cfg)
    payload = report.to_dict()
    if args.out:
        _atomic_text(Path(args.out), json.dumps(payload, sort_keys=True, indent=2) + "\n")
    print(f"trained {args.model} on {ds.name}: test AUC {report.test_auc:.4f} "
          f"(best epoch {report.best_epoch})", file=sys.stderr)
    _emit({"dataset": ds.name, "model": args.model,
           "test_auc": report.test_auc, "best_epoch": report.best_epoch,
           "diverged": report.diverged})
    return 0


def _cmd_sweep(args) -> int:
    base_params = TreeParams(args.b, args.levels, 0.0, args.delta, args.dim, args.seed)
    base_config = _load_config(args, args.model)
    table = gamma_sweep(
        args.gammas, base_params, base_config,
        grid=DEFAULT_GRID, trials_per_point=args.trials, seed=args.seed,
    )
    csv_lines = ["gamma,mean_auc,std_auc,n_trials"]
    for row in table.to_rows():
        csv_lines.append(f"{row['gamma']!r},{row['mean_auc']!r},"
                         f"{row['std_auc']!r},{row['n_trials']}")
    _atomic_text(Path(args.out), "\n".join(csv_lines) + "\n")
    for p in table.points:
        print(f"gamma={p.gamma:g}: {p.mean_auc:.4f} +/- {p.std_auc:.4f} "
              f"({p.n_trials} trials)", file=sys.stderr)
    print(json.dumps({"points": table.to_rows()}, sort_keys=True))
    return 0


_HANDLERS = {
    "generate": _cmd_generate,
    "split": _cmd_split,
    "embed": _cmd_embed,
    "train": _cmd_train,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "diagnose":
            handler = _cmd_delta if args.diagnostic == "delta" else _cmd_ricci
            return handler(args)
        return _HANDLERS[args.command](args)
    except TreebenchError as exc:
        print(f"treebench: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"treebench: io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
