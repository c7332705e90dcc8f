"""Reading and writing graphs, partitions and rank tables; bundled datasets.

Graph files are UTF-8 text with ``#`` comments, a header and two sections::

    directed: false
    layers: women events
    [nodes]
    w1 women
    e1 events
    [edges]
    w1 e1 1.0

Fields are separated by whitespace, so labels may not contain spaces. The edge
weight is optional and defaults to 1. The ``layers`` header is optional too; if
present, every node must belong to one of the listed layers and the layers are
ordered as listed, otherwise they are ordered by first appearance.
"""
from __future__ import annotations

import contextlib
import csv
import json
import logging
from os import PathLike
from pathlib import Path
from typing import Any, Iterator, TextIO, Union

import networkx as nx
import numpy as np

from .community import Partition
from .exceptions import (
    DuplicateEdgeError,
    GMLFormatError,
    GraphFormatError,
    InvalidWeightError,
    UnknownDatasetError,
)
from .graph import LayeredGraph, projection_graph
from .ranking import RankTable
from .utils import natural_key

logger = logging.getLogger(__name__)

DATA_PATH = Path(__file__).parent / "data"
JSON_VERSION = 1

Destination = Union[str, PathLike, TextIO]

BUILTINS = (
    "southern_women",
    "southern_women_binary_projection",
    "southern_women_weighted_projection",
)
BUILTIN_PARTITIONS = ("southern_women_truth", "southern_women_truth_bipartite")


@contextlib.contextmanager
def _output(dest: Destination) -> Iterator[TextIO]:
    if hasattr(dest, "write"):
        yield dest
    else:
        with open(dest, "w", encoding="utf-8", newline="") as fl:
            yield fl


def _content_lines(path: str | PathLike) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as fl:
        for lineno, raw in enumerate(fl, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line


def _parse_weight(text: str, lineno: int) -> float:
    try:
        weight = float(text)
    except ValueError:
        raise GraphFormatError(f"weight '{text}' is not a number", lineno) from None
    if not np.isfinite(weight) or weight < 0:
        raise InvalidWeightError(
            f"line {lineno}: weight {text} must be finite and non-negative"
        )
    return weight


def load_graph(path: str | PathLike) -> LayeredGraph:
    """Read a layered graph from a graph file.

    Raises
    ------
    GraphFormatError
        On malformed lines, unknown sections, unknown node labels or nodes in
        undeclared layers. The message names the line.
    InvalidWeightError
        On negative or non-finite weights.
    DuplicateEdgeError
        If a node pair is listed twice.
    """
    directed = False
    declared: list[str] | None = None
    section = None
    layers: dict[str, list[str]] = {}
    known: set[str] = set()
    edges, pairs = [], set()

    for lineno, line in _content_lines(path):
        if line.startswith("["):
            if line not in ("[nodes]", "[edges]"):
                raise GraphFormatError(f"unknown section {line}", lineno)
            section = line[1:-1]
            continue

        if section is None:
            key, sep, value = line.partition(":")
            key, value = key.strip().lower(), value.strip()
            if not sep:
                raise GraphFormatError("expected a 'key: value' header line", lineno)
            if key == "directed":
                if value.lower() not in ("true", "false"):
                    raise GraphFormatError(
                        f"directed must be true or false. Got '{value}'", lineno
                    )
                directed = value.lower() == "true"
            elif key == "layers":
                declared = value.split()
                if not declared or len(set(declared)) != len(declared):
                    raise GraphFormatError("layers must be unique, non-empty names", lineno)
                layers = {name: [] for name in declared}
            else:
                raise GraphFormatError(f"unknown header key '{key}'", lineno)

        elif section == "nodes":
            parts = line.split()
            if len(parts) != 2:
                raise GraphFormatError("expected 'label layer'", lineno)
            label, layer = parts
            if declared is not None and layer not in declared:
                raise GraphFormatError(
                    f"node '{label}' is in undeclared layer '{layer}'", lineno
                )
            if label in known:
                raise GraphFormatError(f"node '{label}' is listed twice", lineno)
            known.add(label)
            layers.setdefault(layer, []).append(label)

        else:
            parts = line.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError("expected 'source target [weight]'", lineno)
            for label in parts[:2]:
                if label not in known:
                    raise GraphFormatError(f"unknown node label '{label}'", lineno)
            src, dst = parts[:2]
            key = (src, dst) if directed else tuple(sorted((src, dst)))
            if key in pairs:
                raise DuplicateEdgeError(
                    f"line {lineno}: duplicate edge between '{src}' and '{dst}'"
                )
            pairs.add(key)
            weight = _parse_weight(parts[2], lineno) if len(parts) == 3 else 1.0
            edges.append((src, dst, weight))

    graph = LayeredGraph.from_labels(list(layers.items()), edges, directed=directed)
    logger.debug(
        "read %s: %d nodes in %d layers, %d edges",
        path, graph.n_nodes, len(graph.layers), len(graph.edges),
    )
    return graph


def save_graph(graph: LayeredGraph, dest: Destination):
    """Write a layered graph in the format read by :func:`load_graph`."""
    for label in graph.labels:
        if len(label.split()) != 1 or "#" in label:
            raise ValueError(f"label '{label}' cannot be written to a graph file")

    with _output(dest) as fl:
        fl.write(f"directed: {'true' if graph.directed else 'false'}\n")
        fl.write(f"layers: {' '.join(layer.name for layer in graph.layers)}\n")
        fl.write("[nodes]\n")
        for layer in graph.layers:
            for label in layer.labels:
                fl.write(f"{label} {layer.name}\n")
        fl.write("[edges]\n")
        for edge in graph.edges:
            fl.write(f"{edge.source.label} {edge.target.label} {edge.weight!r}\n")


def _southern_women() -> LayeredGraph:
    women, edges = [], []
    events = None
    for lineno, line in _content_lines(DATA_PATH / "southern_women.tsv"):
        fields = line.split("\t")
        if events is None:
            events = fields[2:]
            continue
        label, _name, *attended = fields
        women.append(label)
        edges.extend(
            (label, event) for event, flag in zip(events, attended) if flag == "1"
        )
    return LayeredGraph.from_labels({"women": women, "events": events}, edges)


def load_builtin(name: str) -> LayeredGraph:
    """Load a bundled dataset.

    Parameters
    ----------
    name
        ``"southern_women"`` (18 women by 14 events), or its one-mode projection
        onto the women, ``"southern_women_binary_projection"`` (linked if they met)
        or ``"southern_women_weighted_projection"`` (weighted by the number of
        events attended together).

    Raises
    ------
    UnknownDatasetError
        If ``name`` is not a bundled dataset.
    """
    if name not in BUILTINS:
        raise UnknownDatasetError(
            f"unknown dataset '{name}'. Available: {', '.join(BUILTINS)}"
        )
    graph = _southern_women()
    if name == "southern_women":
        return graph
    return projection_graph(
        graph, "women", "events", weighted=name.endswith("weighted_projection")
    )


def load_builtin_partition(name: str) -> Partition:
    """Load a bundled ground-truth partition.

    ``"southern_women_truth"`` splits the women into w1-w9 and w10-w18;
    ``"southern_women_truth_bipartite"`` adds events e1-e8 and e9-e14 to the two
    groups.
    """
    women = [[f"w{i}" for i in range(1, 10)], [f"w{i}" for i in range(10, 19)]]
    if name == "southern_women_truth":
        return Partition.from_groups(women)
    if name == "southern_women_truth_bipartite":
        events = [[f"e{i}" for i in range(1, 9)], [f"e{i}" for i in range(9, 15)]]
        return Partition.from_groups([w + e for w, e in zip(women, events)])
    raise UnknownDatasetError(
        f"unknown partition '{name}'. Available: {', '.join(BUILTIN_PARTITIONS)}"
    )


def _read_gml(path: str | PathLike) -> nx.Graph:
    try:
        return nx.read_gml(path, label="id")
    except (nx.NetworkXError, ValueError) as e:
        raise GMLFormatError(f"{path}: {e}") from e


def _team_labels(g: nx.Graph) -> dict[Any, str]:
    labels = {node: str(data.get("label", node)) for node, data in g.nodes(data=True)}
    if len(set(labels.values())) != len(labels):
        raise GMLFormatError("node labels in the GML file are not unique")
    return labels


def _conference(data: dict) -> str:
    value = data.get("value")
    return "Independents" if value is None else f"conference{value}"


def load_gml_subset(path: str | PathLike, conferences: bool = True) -> LayeredGraph:
    """Read a graph of teams and games from a GML file.

    Every node becomes a team, labelled by its ``label`` field. With
    ``conferences``, the ``value`` field of each team names its conference: a
    second layer holds one node per conference (``conference<value>``) with a
    membership edge to each of its teams. Teams without a value join a shared
    ``Independents`` conference.

    Raises
    ------
    GMLFormatError
        If the file cannot be parsed (the message keeps the parser's position) or
        if ``conferences`` is requested but no node has a ``value``.
    """
    g = _read_gml(path)
    labels = _team_labels(g)
    teams = list(labels.values())
    edges = [(labels[u], labels[v]) for u, v in g.edges()]
    layers = [("teams", teams)]

    if conferences:
        nodes = list(g.nodes(data=True))
        if not any("value" in data for _, data in nodes):
            raise GMLFormatError(
                f"{path} has no 'value' fields to build conferences from; "
                "disable conference synthesis for the one-mode graph"
            )
        membership = {labels[node]: _conference(data) for node, data in nodes}
        names = sorted(set(membership.values()), key=natural_key)
        layers.append(("conferences", names))
        for team, conf in membership.items():
            edges.append((team, conf))
            if g.is_directed():
                edges.append((conf, team))

    graph = LayeredGraph.from_labels(layers, edges, directed=g.is_directed())
    logger.info(
        "read %s: %d teams, %d layers, %d edges",
        path, len(teams), len(graph.layers), len(graph.edges),
    )
    return graph


def load_gml_truth(path: str | PathLike) -> Partition:
    """The partition of teams into conferences given by a GML file's ``value``s."""
    g = _read_gml(path)
    labels = _team_labels(g)
    return Partition.from_mapping(
        {labels[node]: _conference(data) for node, data in g.nodes(data=True)}
    )


def write_partition(p: Partition, dest: Destination):
    """Write a partition as ``label<TAB>community`` rows sorted by label."""
    with _output(dest) as fl:
        fl.write("label\tcommunity\n")
        for label, c in sorted(p.as_dict().items(), key=lambda t: natural_key(t[0])):
            fl.write(f"{label}\t{c}\n")


def read_partition(path: str | PathLike) -> Partition:
    """Read a partition written by :func:`write_partition`.

    Community numbers are renumbered canonically (by smallest member label).
    """
    mapping = {}
    header = False
    for lineno, line in _content_lines(path):
        fields = line.split("\t")
        if not header:
            if [f.strip() for f in fields] != ["label", "community"]:
                raise GraphFormatError("expected the header 'label<TAB>community'", lineno)
            header = True
            continue
        if len(fields) != 2:
            raise GraphFormatError("expected 'label<TAB>community'", lineno)
        label, community = (f.strip() for f in fields)
        if label in mapping:
            raise GraphFormatError(f"node '{label}' is listed twice", lineno)
        mapping[label] = community
    return Partition.from_mapping(mapping)


def write_ranks_csv(rt: RankTable, dest: Destination):
    """Write a rank table as ``label,alpha,score,rank,community`` rows.

    Rows are sorted by label, then by alpha.
    """
    community = rt.partition.as_dict()
    rows = sorted(range(len(rt.labels)), key=lambda i: natural_key(rt.labels[i]))
    with _output(dest) as fl:
        writer = csv.writer(fl, lineterminator="\n")
        writer.writerow(["label", "alpha", "score", "rank", "community"])
        for i in rows:
            label = rt.labels[i]
            for k, alpha in enumerate(rt.grid):
                writer.writerow(
                    [
                        label,
                        repr(alpha),
                        repr(float(rt.table.scores[i, k])),
                        repr(float(rt.ranks[i, k])),
                        community[label],
                    ]
                )


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def write_json(payload: dict[str, Any], dest: Destination):
    """Write a JSON document with a ``version`` field and sorted keys."""
    with _output(dest) as fl:
        json.dump(
            {"version": JSON_VERSION, **payload},
            fl,
            sort_keys=True,
            indent=2,
            default=_json_default,
        )
        fl.write("\n")
