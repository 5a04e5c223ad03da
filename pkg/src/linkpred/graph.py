"""Attributed undirected graphs: loading, validation and structural statistics."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ParseError, ReferentialError, ValidationError

ATTRIBUTE_COLUMNS = ("status", "gender", "major", "minor", "dorm", "year", "high_school")
ATTRIBUTE_HEADER = ("node_id",) + ATTRIBUTE_COLUMNS

_YEAR_MIN, _YEAR_MAX = 1900, 2100


@dataclass(frozen=True)
class AttributeRecord:
    """Per-node demographic codes; 0 means missing (source-data convention)."""

    status: int = 0
    gender: int = 0
    major: int = 0
    minor: int = 0
    dorm: int = 0
    year: int = 0
    high_school: int = 0


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    d: float
    C: float


class AttributedGraph:
    """Immutable simple undirected graph with dense node ids [0, n).

    Neighbor lists are kept sorted so pair metrics can intersect them
    directly; the canonical edge set (u < v) backs O(1) membership tests.
    Original node ids from the source files are retained in `original_ids`.
    """

    def __init__(self, node_count, edges, attributes=None, network_id="", original_ids=None):
        if node_count < 0:
            raise ValidationError("node_count must be non-negative")
        canonical = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValidationError(f"self-loop on node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValidationError(f"edge ({u},{v}) outside [0,{node_count})")
            canonical.add((u, v) if u < v else (v, u))

        neighbor_sets = [[] for _ in range(node_count)]
        for u, v in canonical:
            neighbor_sets[u].append(v)
            neighbor_sets[v].append(u)

        self.node_count = int(node_count)
        self.network_id = str(network_id)
        self.edge_set = frozenset(canonical)
        self._adjacency = [np.array(sorted(ns), dtype=np.int64) for ns in neighbor_sets]
        self._degrees = np.array([len(a) for a in self._adjacency], dtype=np.int64)

        if attributes is None:
            attributes = np.zeros((node_count, len(ATTRIBUTE_COLUMNS)), dtype=np.int64)
        attributes = np.asarray(attributes, dtype=np.int64)
        if attributes.shape != (node_count, len(ATTRIBUTE_COLUMNS)):
            raise ValidationError(
                f"attribute matrix shape {attributes.shape} != ({node_count},{len(ATTRIBUTE_COLUMNS)})"
            )
        _validate_years(attributes[:, ATTRIBUTE_COLUMNS.index("year")])
        self._attributes = attributes
        self._attributes.setflags(write=False)

        if original_ids is None:
            original_ids = tuple(str(i) for i in range(node_count))
        self.original_ids = tuple(original_ids)

    # -- basic queries -------------------------------------------------

    @property
    def num_edges(self) -> int:
        return len(self.edge_set)

    def check_node(self, node: int) -> int:
        node = int(node)
        if not 0 <= node < self.node_count:
            raise DomainError(f"unknown node {node} (graph has {self.node_count} nodes)")
        return node

    def neighbors(self, node: int) -> np.ndarray:
        return self._adjacency[self.check_node(node)]

    def degree(self, node: int) -> int:
        return int(self._degrees[self.check_node(node)])

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self.edge_set

    def edges(self):
        """Canonical (u < v) edge list in sorted order."""
        return sorted(self.edge_set)

    def attribute(self, node: int) -> AttributeRecord:
        row = self._attributes[self.check_node(node)]
        return AttributeRecord(*(int(x) for x in row))

    @property
    def attributes(self) -> np.ndarray:
        """Read-only (n, 7) matrix, columns ordered as ATTRIBUTE_COLUMNS."""
        return self._attributes

    def remove_edges(self, pairs) -> "AttributedGraph":
        """New graph without the given edges; all must currently exist."""
        doomed = set()
        for u, v in pairs:
            pair = (u, v) if u < v else (v, u)
            if pair not in self.edge_set:
                raise DomainError(f"edge {pair} not in graph")
            doomed.add(pair)
        return AttributedGraph(
            self.node_count,
            self.edge_set - doomed,
            attributes=self._attributes,
            network_id=self.network_id,
            original_ids=self.original_ids,
        )


def _validate_years(years: np.ndarray) -> None:
    bad = years[(years != 0) & ((years < _YEAR_MIN) | (years > _YEAR_MAX))]
    if bad.size:
        raise ValidationError(f"implausible year value {int(bad[0])}")


def load_graph(edge_file, attribute_file, network_id="") -> AttributedGraph:
    """Load and validate a network from an edge list plus an attribute CSV.

    The attribute file defines the node universe and the dense re-indexing
    order; every id in the edge file must appear there. Duplicate and
    reversed edge lines are deduplicated; self-loops are rejected.
    """
    index, attributes, original_ids = _read_attributes(Path(attribute_file))
    edges = _read_edges(Path(edge_file), index)
    return AttributedGraph(
        len(original_ids),
        edges,
        attributes=attributes,
        network_id=network_id,
        original_ids=original_ids,
    )


def _read_attributes(path: Path):
    index: dict[str, int] = {}
    rows = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty attribute file") from None
        if tuple(h.strip() for h in header) != ATTRIBUTE_HEADER:
            raise ParseError(f"{path}: expected header {','.join(ATTRIBUTE_HEADER)}", line_number=1)
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(ATTRIBUTE_HEADER):
                raise ParseError(f"{path}: expected {len(ATTRIBUTE_HEADER)} fields, got {len(row)}", line_no)
            node_id = row[0].strip()
            if node_id in index:
                raise ParseError(f"{path}: duplicate node id {node_id!r}", line_no)
            try:
                values = [int(cell.strip()) if cell.strip() else 0 for cell in row[1:]]
            except ValueError:
                raise ParseError(f"{path}: non-integer attribute in {row!r}", line_no) from None
            index[node_id] = len(rows)
            rows.append(values)
    if not rows:
        raise ParseError(f"{path}: no attribute rows")
    return index, np.array(rows, dtype=np.int64), tuple(index)


def _read_edges(path: Path, index: dict[str, int]):
    edges = []
    with path.open() as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.replace(",", " ").split()
            if len(tokens) != 2:
                raise ParseError(f"{path}: expected two node ids, got {raw.strip()!r}", line_no)
            try:
                u, v = index[tokens[0]], index[tokens[1]]
            except KeyError as exc:
                raise ReferentialError(
                    f"{path} line {line_no}: node id {exc.args[0]!r} not in attribute file"
                ) from None
            if u == v:
                raise ValidationError(f"{path} line {line_no}: self-loop on {tokens[0]!r}")
            edges.append((u, v))
    return edges


def clustering_coefficient(g: AttributedGraph, node: int) -> float:
    """Fraction of closed neighbor pairs: 2*triangles / (deg*(deg-1))."""
    nbrs = g.neighbors(node)
    deg = len(nbrs)
    if deg < 2:
        return 0.0
    closed = 0
    for v in nbrs:
        closed += np.intersect1d(nbrs, g.neighbors(int(v)), assume_unique=True).size
    return closed / (deg * (deg - 1))


def graph_stats(g: AttributedGraph) -> GraphStats:
    if g.node_count == 0:
        raise DomainError("graph_stats undefined for an empty graph")
    n, m = g.node_count, g.num_edges
    c = float(np.mean([clustering_coefficient(g, u) for u in range(n)]))
    return GraphStats(n=n, m=m, d=2.0 * m / n, C=c)


def degree_histogram(g: AttributedGraph):
    """Ascending (degree, count) pairs; counts sum to the node count."""
    counts = np.bincount(g.degrees, minlength=1)
    return [(int(d), int(c)) for d, c in enumerate(counts) if c > 0]


def write_degree_histogram(path, g: AttributedGraph) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["degree", "count"])
        writer.writerows(degree_histogram(g))
