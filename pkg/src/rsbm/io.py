"""Text formats for graphs and labels.

Edge list::

    # rsbm n=<n> d1=<d1> d2=<d2> seed=<seed> sampler=<name>
    u v
    ...

one edge per line, 0-indexed, ``u < v``, sorted lexicographically. Graphs
that are not RSBM samples use the header ``# graph num_vertices=<N>``. The
labels file holds one ``1`` or ``-1`` per line, line ``i`` for vertex ``i``.
Writers are deterministic, so equal inputs give byte-identical files.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ParseError
from .graph import Graph, PlantedInstance
from .model import RsbmParams

__all__ = [
    "format_edge_list",
    "write_edge_list",
    "read_edge_list",
    "write_labels",
    "read_labels",
    "EdgeListHeader",
]


class EdgeListHeader(dict):
    """Key/value pairs parsed from the header line."""

    @property
    def params(self):
        if {"n", "d1", "d2"} <= self.keys():
            return RsbmParams(int(self["n"]), int(self["d1"]), int(self["d2"]))
        return None


def format_edge_list(graph, params=None, seed=None, sampler=None):
    if isinstance(graph, PlantedInstance):
        params = graph.params if params is None else params
        seed = graph.seed if seed is None else seed
        sampler = graph.sampler if sampler is None else sampler
        graph = graph.graph
    if params is not None:
        head = f"# rsbm n={params.n} d1={params.d1} d2={params.d2} seed={seed} sampler={sampler}"
    else:
        head = f"# graph num_vertices={graph.num_vertices}"
    lines = [head]
    lines.extend(f"{u} {v}" for u, v in graph.edges().tolist())
    return "\n".join(lines) + "\n"


def write_edge_list(path, graph, params=None, seed=None, sampler=None):
    with open(path, "w", newline="\n") as fh:
        fh.write(format_edge_list(graph, params, seed, sampler))


def _parse_header(line, lineno):
    tokens = line.lstrip("#").split()
    header = EdgeListHeader(kind=tokens[0] if tokens else "")
    for tok in tokens[1:]:
        if "=" not in tok:
            raise ParseError(f"bad header token {tok!r}", lineno)
        key, value = tok.split("=", 1)
        header[key] = value
    return header


def read_edge_list(path):
    """Parse an edge-list file; returns ``(graph, header)``.

    Raises ``ParseError`` naming the offending line.
    """
    header = EdgeListHeader()
    edges = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if lineno == 1:
                    header = _parse_header(line, lineno)
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"expected two vertex ids, got {line!r}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"vertex ids must be integers, got {line!r}", lineno) from None
            if u < 0 or v < 0:
                raise ParseError(f"negative vertex id in {line!r}", lineno)
            if u == v:
                raise ParseError(f"self-loop {line!r}", lineno)
            edges.append((u, v))

    try:
        if "n" in header:
            num_vertices = 2 * int(header["n"])
        elif "num_vertices" in header:
            num_vertices = int(header["num_vertices"])
        else:
            num_vertices = 1 + max((max(e) for e in edges), default=0)
    except ValueError:
        raise ParseError("bad vertex count in header", 1) from None
    for u, v in edges:
        if max(u, v) >= num_vertices:
            raise ParseError(f"vertex id {max(u, v)} out of range for {num_vertices} vertices")
    codes = [min(e) * num_vertices + max(e) for e in edges]
    if len(set(codes)) != len(codes):
        raise ParseError("repeated edge")
    graph = Graph.from_edges(num_vertices, np.array(edges, dtype=np.int64).reshape(-1, 2))
    return graph, header


def write_labels(path, labels):
    with open(path, "w", newline="\n") as fh:
        fh.write("".join(f"{int(s)}\n" for s in labels))


def read_labels(path, num_vertices=None):
    out = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line not in ("1", "-1", "+1"):
                raise ParseError(f"label must be 1 or -1, got {line!r}", lineno)
            out.append(int(line))
    labels = np.array(out, dtype=np.int8)
    if num_vertices is not None and labels.size != num_vertices:
        raise ParseError(f"{labels.size} labels for {num_vertices} vertices")
    return labels
