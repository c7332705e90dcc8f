"""Command-line interface: ``hetnet <command> [options]``.

Every command reads one graph (a bundled dataset, a graph file or a GML file),
optionally projects it onto one layer and re-weights its blocks, runs one analysis
and writes the result to standard output or ``--output``. Diagnostics go to
standard error.

Exit codes are 0 on success, 2 for usage errors, 3 for invalid data and 4 for
numerical failures.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Sequence, TextIO

import attr

from . import __version__
from . import io as hio
from .centrality import METHODS, CentralityParams, compute_centrality, spectral_radius
from .community import Partition, detect_communities
from .config import Settings
from .evaluation import nmi
from .exceptions import DataError, NumericalError
from .graph import (
    LayeredGraph,
    LayerWeights,
    NModeMatrix,
    apply_layer_weights,
    build_nmode,
    projection_graph,
)
from .ranking import SCOPES, alpha_sweep, classify_roles, rank_within_groups
from .utils import natural_key, parse_grid

logger = logging.getLogger(__name__)

PROG = "hetnet"
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _grid_or_none(val):
    return None if val is None else parse_grid(val)


@attr.s(frozen=True, kw_only=True)
class RunConfig:
    """Everything a command needs, gathered from the command line.

    At most one input source (``builtin``, ``graph`` or ``gml``) may be set.
    """

    builtin: str | None = attr.ib(default=None)
    graph: Path | None = attr.ib(default=None, converter=attr.converters.optional(Path))
    gml: Path | None = attr.ib(default=None, converter=attr.converters.optional(Path))
    conferences: bool = attr.ib(default=True)
    projection: str = attr.ib(
        default="none", validator=attr.validators.in_(("none", "binary", "weighted"))
    )
    target: str | None = attr.ib(default=None)
    via: str | None = attr.ib(default=None)
    intra_weights: dict[str, float] = attr.ib(factory=dict)
    inter_weights: dict[tuple[str, str], float] = attr.ib(factory=dict)
    alpha: float = attr.ib(default=0.0, converter=float)
    grid: tuple[float, ...] | None = attr.ib(default=None, converter=_grid_or_none)
    beta: float = attr.ib(default=1.0, converter=float, validator=attr.validators.gt(0))
    method: str = attr.ib(default="exact", validator=attr.validators.in_(METHODS))
    terms: int | None = attr.ib(default=None)
    output_format: str = attr.ib(default="tsv")
    output: Path | None = attr.ib(default=None, converter=attr.converters.optional(Path))
    truth: str | None = attr.ib(default=None)
    partition: Path | None = attr.ib(
        default=None, converter=attr.converters.optional(Path)
    )
    partitions: tuple[Path, ...] = attr.ib(factory=tuple, converter=tuple)
    scope: str = attr.ib(default="community", validator=attr.validators.in_(SCOPES))
    settings: Settings = attr.ib(factory=Settings)

    @builtin.validator
    def _source_vld(self, att, val):
        sources = [s for s in (self.builtin, self.graph, self.gml) if s is not None]
        if len(sources) > 1:
            raise ValueError("give at most one of --builtin, --graph and --gml")

    @grid.validator
    def _grid_vld(self, att, val):
        if val is not None and any(b <= a for a, b in zip(val, val[1:])):
            raise ValueError(f"the alpha grid must be strictly increasing. Got {val}")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        """Build the configuration of a parsed command line."""
        settings = Settings()
        overrides = {
            "eigen_tol": getattr(args, "tol", None),
            "max_iter": getattr(args, "max_iter", None),
            "bridge_threshold": getattr(args, "bridge_threshold", None),
            "series_terms": getattr(args, "terms", None),
        }
        settings = attr.evolve(
            settings, **{k: v for k, v in overrides.items() if v is not None}
        )
        return cls(
            builtin=getattr(args, "builtin", None),
            graph=getattr(args, "graph", None),
            gml=getattr(args, "gml", None),
            conferences=not getattr(args, "no_conferences", False),
            projection=getattr(args, "projection", "none"),
            target=getattr(args, "target", None),
            via=getattr(args, "via", None),
            intra_weights=dict(getattr(args, "intra_weight", None) or []),
            inter_weights=dict(getattr(args, "inter_weight", None) or []),
            alpha=getattr(args, "alpha", 0.0),
            grid=getattr(args, "grid", None),
            beta=getattr(args, "beta", 1.0),
            method=getattr(args, "method", "exact"),
            terms=getattr(args, "terms", None),
            output_format=getattr(args, "output_format", None) or args.default_format,
            output=getattr(args, "output", None),
            truth=getattr(args, "truth", None),
            partition=getattr(args, "partition", None),
            partitions=getattr(args, "partitions", None) or (),
            scope=getattr(args, "scope", "community"),
            settings=settings,
        )


def load_input(cfg: RunConfig) -> LayeredGraph:
    """The graph named by the configuration, projected if requested."""
    if cfg.builtin is not None:
        graph = hio.load_builtin(cfg.builtin)
    elif cfg.graph is not None:
        graph = hio.load_graph(cfg.graph)
    elif cfg.gml is not None:
        graph = hio.load_gml_subset(cfg.gml, conferences=cfg.conferences)
    else:
        raise ValueError("one of --builtin, --graph or --gml is required")

    if cfg.projection == "none":
        return graph
    if len(graph.layers) < 2 and (cfg.target is None or cfg.via is None):
        raise ValueError("projecting a one-layer graph needs --target and --via")
    target = cfg.target if cfg.target is not None else graph.layers[0].name
    via = cfg.via if cfg.via is not None else graph.layers[1].name
    return projection_graph(graph, target, via, weighted=cfg.projection == "weighted")


def load_matrix(cfg: RunConfig) -> NModeMatrix:
    """The N-mode matrix of the configured graph, with layer weights applied."""
    A = build_nmode(load_input(cfg))
    if not cfg.intra_weights and not cfg.inter_weights:
        return A
    weights = LayerWeights.for_layers(
        len(A.layers),
        intra={A.layer_index(k): w for k, w in cfg.intra_weights.items()},
        inter={
            (A.layer_index(k), A.layer_index(l)): w
            for (k, l), w in cfg.inter_weights.items()
        },
    )
    return apply_layer_weights(A, weights)


def load_truth(cfg: RunConfig) -> Partition | None:
    """The ground-truth partition named by ``--truth``, if any.

    ``--truth`` is a bundled partition name, ``conferences`` (the conference values
    of the ``--gml`` file) or the path of a partition file.
    """
    if cfg.truth is None:
        return None
    if cfg.truth in hio.BUILTIN_PARTITIONS:
        return hio.load_builtin_partition(cfg.truth)
    if cfg.truth == "conferences":
        if cfg.gml is None:
            raise ValueError("--truth conferences needs a --gml input")
        return hio.load_gml_truth(cfg.gml)
    return hio.read_partition(cfg.truth)


def score_against(found: Partition, truth: Partition) -> float:
    """NMI of a partition against a truth that may cover only some of its nodes."""
    return nmi(found.restrict(truth.labels), truth)


def _emit(cfg: RunConfig, write: Callable[[TextIO], None]):
    if cfg.output is None:
        write(sys.stdout)
    else:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fl:
            write(fl)


def _sep(cfg: RunConfig) -> str:
    return "," if cfg.output_format == "csv" else "\t"


def cmd_communities(cfg: RunConfig) -> int:
    """Detect communities at one alpha."""
    A = load_matrix(cfg)
    result = detect_communities(
        A,
        cfg.alpha,
        beta=cfg.beta,
        method=cfg.method,
        terms=cfg.terms,
        settings=cfg.settings,
    )
    truth = load_truth(cfg)
    score = None if truth is None else score_against(result.partition, truth)

    if cfg.output_format == "json":
        payload = {
            "command": "communities",
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "method": cfg.method,
            "q": result.q,
            "q_normalized": result.q_normalized,
            "w": result.w,
            "n_communities": result.partition.n_communities,
            "communities": result.partition.as_dict(),
            "splits": [attr.asdict(s) for s in result.splits],
            "nmi": score,
        }
        _emit(cfg, lambda fl: hio.write_json(payload, fl))
        return 0

    def write(fl):
        fl.write(f"# alpha={cfg.alpha!r} beta={cfg.beta!r} method={cfg.method}\n")
        fl.write(
            f"# q={result.q!r} q_normalized={result.q_normalized!r} w={result.w} "
            f"communities={result.partition.n_communities}\n"
        )
        for s in result.splits:
            fl.write(
                f"# split size={s.size} sizes={s.sizes[0]}+{s.sizes[1]} "
                f"eigenvalue={s.eigenvalue!r} delta_q={s.delta_q!r}\n"
            )
        if score is not None:
            fl.write(f"# nmi={score!r}\n")
        hio.write_partition(result.partition, fl)

    _emit(cfg, write)
    return 0


def _sweep_partition(cfg: RunConfig, A: NModeMatrix) -> Partition:
    if cfg.partition is not None:
        return hio.read_partition(cfg.partition)
    return detect_communities(
        A,
        max(cfg.grid),
        beta=cfg.beta,
        method=cfg.method,
        terms=cfg.terms,
        settings=cfg.settings,
    ).partition


def _rank_table(cfg: RunConfig):
    if cfg.grid is None:
        raise ValueError("this command needs --grid")
    A = load_matrix(cfg)
    p = _sweep_partition(cfg, A)
    scores = alpha_sweep(
        A,
        cfg.grid,
        beta=cfg.beta,
        method=cfg.method,
        terms=cfg.terms,
        settings=cfg.settings,
        within=p if cfg.scope == "community" else None,
    )
    return rank_within_groups(scores, p, settings=cfg.settings)


def cmd_rank(cfg: RunConfig) -> int:
    """Rank nodes within communities over an alpha grid and label their roles."""
    rt = _rank_table(cfg)
    roles = classify_roles(rt, settings=cfg.settings) if len(rt.grid) > 1 else None
    rows = sorted(range(len(rt.labels)), key=lambda i: natural_key(rt.labels[i]))

    if cfg.output_format == "json":
        payload = {
            "command": "rank",
            "beta": cfg.beta,
            "scope": cfg.scope,
            "grid": list(rt.grid),
            "nodes": [
                {
                    "label": rt.labels[i],
                    "community": int(rt.partition.assignment[i]),
                    "ranks": rt.ranks[i],
                    "delta_rank": None if roles is None else roles[i].delta_rank,
                    "role": None if roles is None else roles[i].role,
                }
                for i in rows
            ],
        }
        _emit(cfg, lambda fl: hio.write_json(payload, fl))
        return 0

    sep = _sep(cfg)

    def write(fl):
        header = ["label", "community"] + [f"rank@{a!r}" for a in rt.grid]
        fl.write(sep.join(header + ["delta_rank", "role"]) + "\n")
        for i in rows:
            fields = [rt.labels[i], str(rt.partition.assignment[i])]
            fields += [repr(float(r)) for r in rt.ranks[i]]
            if roles is None:
                fields += ["", ""]
            else:
                fields += [repr(roles[i].delta_rank), roles[i].role]
            fl.write(sep.join(fields) + "\n")

    _emit(cfg, write)
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    """Write the plot-ready table of scores and ranks over an alpha grid."""
    rt = _rank_table(cfg)
    if cfg.output_format == "json":
        community = rt.partition.as_dict()
        payload = {
            "command": "sweep",
            "beta": cfg.beta,
            "scope": cfg.scope,
            "grid": list(rt.grid),
            "rows": [
                {
                    "label": label,
                    "alpha": alpha,
                    "score": rt.table.scores[i, k],
                    "rank": rt.ranks[i, k],
                    "community": community[label],
                }
                for i, label in sorted(enumerate(rt.labels), key=lambda t: natural_key(t[1]))
                for k, alpha in enumerate(rt.grid)
            ],
        }
        _emit(cfg, lambda fl: hio.write_json(payload, fl))
    else:
        _emit(cfg, lambda fl: hio.write_ranks_csv(rt, fl))
    return 0


def cmd_nmi(cfg: RunConfig) -> int:
    """Print the normalized mutual information of two partition files."""
    if len(cfg.partitions) != 2:
        raise ValueError("nmi needs exactly two partition files")
    a, b = (hio.read_partition(path) for path in cfg.partitions)
    value = nmi(a, b)
    if cfg.output_format == "json":
        payload = {"command": "nmi", "nmi": value, "files": [str(p) for p in cfg.partitions]}
        _emit(cfg, lambda fl: hio.write_json(payload, fl))
    else:
        _emit(cfg, lambda fl: fl.write(f"{value!r}\n"))
    return 0


def cmd_centrality(cfg: RunConfig) -> int:
    """Print per-node b-centrality scores at one alpha."""
    A = load_matrix(cfg)
    C = compute_centrality(
        A,
        CentralityParams(alpha=cfg.alpha, beta=cfg.beta),
        method=cfg.method,
        terms=cfg.terms,
        settings=cfg.settings,
    )
    if cfg.output_format == "json":
        payload = {
            "command": "centrality",
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "method": cfg.method,
            "terms": C.terms,
            "scores": dict(zip(C.labels, C.scores.tolist())),
        }
        _emit(cfg, lambda fl: hio.write_json(payload, fl))
        return 0

    sep = _sep(cfg)

    def write(fl):
        fl.write(f"label{sep}score\n")
        for label, score in sorted(zip(C.labels, C.scores), key=lambda t: natural_key(t[0])):
            fl.write(f"{label}{sep}{float(score)!r}\n")

    _emit(cfg, write)
    return 0


def cmd_spectral_radius(cfg: RunConfig) -> int:
    """Print the largest eigenvalue and the alpha bound it implies."""
    info = spectral_radius(load_matrix(cfg), cfg.settings)
    if cfg.output_format == "json":
        payload = {
            "command": "spectral-radius",
            "lambda_max": info.lambda_max,
            "max_alpha": None if info.lambda_max == 0 else info.bound,
            "iterations": info.iterations,
            "residual": info.residual,
        }
        _emit(cfg, lambda fl: hio.write_json(payload, fl))
        return 0

    sep = _sep(cfg)
    _emit(
        cfg,
        lambda fl: fl.write(
            f"lambda_max{sep}{info.lambda_max!r}\nmax_alpha{sep}{info.bound!r}\n"
        ),
    )
    return 0


def cmd_project(cfg: RunConfig) -> int:
    """Write the one-layer projection of a graph."""
    if cfg.projection == "none":
        cfg = attr.evolve(cfg, projection="weighted")
    graph = load_input(cfg)
    if cfg.output_format == "json":
        payload = {
            "command": "project",
            "directed": graph.directed,
            "layers": {layer.name: list(layer.labels) for layer in graph.layers},
            "edges": [[e.source.label, e.target.label, e.weight] for e in graph.edges],
        }
        _emit(cfg, lambda fl: hio.write_json(payload, fl))
    else:
        _emit(cfg, lambda fl: hio.save_graph(graph, fl))
    return 0


def _key_value(text: str) -> tuple[str, float]:
    key, sep, value = text.rpartition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected NAME=WEIGHT. Got '{text}'")
    try:
        return key, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"weight '{value}' is not a number") from None


def _pair_value(text: str) -> tuple[tuple[str, str], float]:
    key, weight = _key_value(text)
    src, sep, dst = key.partition(":")
    if not sep or not src or not dst:
        raise argparse.ArgumentTypeError(f"expected SRC:DST=WEIGHT. Got '{text}'")
    return (src, dst), weight


def _add_input(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("input")
    source = group.add_mutually_exclusive_group()
    source.add_argument("--builtin", choices=hio.BUILTINS, help="a bundled dataset")
    source.add_argument("--graph", help="a graph file")
    source.add_argument("--gml", help="a GML file of teams and games")
    group.add_argument(
        "--no-conferences",
        action="store_true",
        help="do not add a conference layer to a GML graph",
    )
    group.add_argument(
        "--projection",
        choices=("none", "binary", "weighted"),
        default="none",
        help="project the graph onto one layer first",
    )
    group.add_argument("--target", help="layer to project onto (default: the first)")
    group.add_argument("--via", help="layer to project through (default: the second)")
    group.add_argument(
        "--intra-weight",
        type=_key_value,
        action="append",
        metavar="LAYER=W",
        help="weight of the links within a layer (repeatable)",
    )
    group.add_argument(
        "--inter-weight",
        type=_pair_value,
        action="append",
        metavar="SRC:DST=W",
        help="weight of the links from one layer to another (repeatable)",
    )


def _add_centrality(parser: argparse.ArgumentParser, alpha: bool = True):
    group = parser.add_argument_group("centrality")
    if alpha:
        group.add_argument("--alpha", type=float, default=0.0, help="indirect-link weight")
    group.add_argument("--beta", type=float, default=1.0, help="direct-link weight")
    group.add_argument("--method", choices=METHODS, default="exact")
    group.add_argument("--terms", type=int, help="series terms (default 3)")


def _add_numerics(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("numerics")
    group.add_argument("--tol", type=float, help="eigensolver tolerance")
    group.add_argument("--max-iter", type=int, help="eigensolver iteration limit")


def _add_output(parser: argparse.ArgumentParser, formats: Sequence[str], default: str):
    parser.add_argument("--output-format", choices=formats, help=f"default: {default}")
    parser.add_argument("-o", "--output", help="write to this file instead of stdout")
    parser.set_defaults(default_format=default)


def build_parser() -> argparse.ArgumentParser:
    """The argument parser of the ``hetnet`` command."""
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Communities, centrality and rankings of heterogeneous networks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("communities", help="detect communities at one alpha")
    _add_input(p)
    _add_centrality(p)
    _add_numerics(p)
    p.add_argument("--truth", help="ground truth to report the NMI against")
    _add_output(p, ("tsv", "json"), "tsv")
    p.set_defaults(func=cmd_communities)

    for name, func, formats, default, text in (
        ("rank", cmd_rank, ("tsv", "csv", "json"), "tsv", "rank nodes and label roles"),
        ("sweep", cmd_sweep, ("csv", "json"), "csv", "scores and ranks over a grid"),
    ):
        p = sub.add_parser(name, help=text)
        _add_input(p)
        _add_centrality(p, alpha=False)
        _add_numerics(p)
        p.add_argument("--grid", required=True, help="alphas as start:end:step or a,b,c")
        p.add_argument("--partition", help="partition file (default: detect at the largest alpha)")
        p.add_argument("--bridge-threshold", type=float, help="default 1.0")
        p.add_argument(
            "--scope",
            choices=SCOPES,
            default="community",
            help="score paths into the node's own community or into the whole graph",
        )
        _add_output(p, formats, default)
        p.set_defaults(func=func)

    p = sub.add_parser("nmi", help="NMI of two partition files")
    p.add_argument("partitions", nargs=2, metavar="PARTITION")
    _add_output(p, ("tsv", "json"), "tsv")
    p.set_defaults(func=cmd_nmi)

    p = sub.add_parser("centrality", help="per-node b-centrality scores")
    _add_input(p)
    _add_centrality(p)
    _add_numerics(p)
    _add_output(p, ("tsv", "csv", "json"), "tsv")
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("spectral-radius", help="largest eigenvalue and alpha bound")
    _add_input(p)
    _add_numerics(p)
    _add_output(p, ("tsv", "json"), "tsv")
    p.set_defaults(func=cmd_spectral_radius)

    p = sub.add_parser("project", help="one-layer projection of a graph")
    _add_input(p)
    _add_output(p, ("tsv", "json"), "tsv")
    p.set_defaults(func=cmd_project)

    return parser


def _configure_logging(verbosity: int):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )
    logging.captureWarnings(True)


def _fail(err: Exception, code: int) -> int:
    print(f"{PROG}: error: {err}", file=sys.stderr)
    logger.debug("failure details", exc_info=err)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    """Run the ``hetnet`` command and return its exit code."""
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        cfg = RunConfig.from_args(args)
        return args.func(cfg)
    except NumericalError as e:
        return _fail(e, EXIT_NUMERICAL)
    except (DataError, OSError) as e:
        return _fail(e, EXIT_DATA)
    except (ValueError, TypeError) as e:
        return _fail(e, EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
