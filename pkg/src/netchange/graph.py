"""Labeled undirected graphs, minimum DFS codes and subgraph containment.

A `Snapshot` is one observed state of the network; a `Pattern` is a connected
labeled graph identified by its minimum DFS code. Both are immutable, so every
function here is safe to call from many threads or processes at once.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import networkx as nx
from networkx.algorithms import isomorphism as iso

from .errors import PatternError

# Label used for inputs that carry no node or edge label
NULL_LABEL = "∅"

# Labels end up inside code strings and tab-separated files
_LABEL_RE = re.compile(r"^[^\s(),]+$")

_CODE_EDGE_RE = re.compile(r"\((\d+),(\d+),([^\s(),]+),([^\s(),]+),([^\s(),]+)\)")

_NODE_MATCH = iso.categorical_node_match("label", None)
_EDGE_MATCH = iso.categorical_edge_match("label", None)


def check_label(label: object) -> str:
    """Return `label` if it is a usable symbol, raise PatternError otherwise."""
    if not isinstance(label, str) or not _LABEL_RE.match(label):
        raise PatternError(f"invalid label {label!r}: must be a non-empty symbol without whitespace, '(', ')' or ','")
    return label


def _normalize(nodes: Iterable[tuple[int, str]], edges: Iterable[tuple[int, int, str]]):
    """Sort nodes by id and edges by endpoint pair, with the smaller endpoint first; None labels become NULL_LABEL."""
    norm_nodes = tuple(sorted((int(n), NULL_LABEL if l is None else l) for n, l in nodes))
    norm_edges = tuple(sorted((min(a, b), max(a, b), NULL_LABEL if l is None else l) for a, b, l in edges))
    return norm_nodes, norm_edges


def _validate(nodes: Sequence[tuple[int, str]], edges: Sequence[tuple[int, int, str]], what: str) -> None:
    ids = [n for n, _ in nodes]
    if len(set(ids)) != len(ids):
        raise PatternError(f"{what}: duplicate node id")
    for _, label in nodes:
        check_label(label)
    known = set(ids)
    pairs = set()
    for a, b, label in edges:
        check_label(label)
        if a not in known or b not in known:
            raise PatternError(f"{what}: edge ({a}, {b}) references an unknown node")
        if a == b:
            raise PatternError(f"{what}: self-loop on node {a}")
        if a > b:
            raise PatternError(f"{what}: edge ({a}, {b}) is not normalized")
        if (a, b) in pairs:
            raise PatternError(f"{what}: more than one edge between nodes {a} and {b}")
        pairs.add((a, b))


class _LabeledGraph:
    """Derived views shared by snapshots and patterns."""

    nodes: tuple[tuple[int, str], ...]
    edges: tuple[tuple[int, int, str], ...]

    @cached_property
    def labels(self) -> dict[int, str]:
        return dict(self.nodes)

    @cached_property
    def adjacency(self) -> dict[int, dict[int, str]]:
        """Node id -> {neighbor id: edge label}."""
        adj: dict[int, dict[int, str]] = {n: {} for n, _ in self.nodes}
        for a, b, label in self.edges:
            adj[a][b] = label
            adj[b][a] = label
        return adj

    @cached_property
    def node_label_counts(self) -> Counter:
        return Counter(label for _, label in self.nodes)

    @cached_property
    def edge_label_counts(self) -> Counter:
        return Counter(label for _, _, label in self.edges)

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        for n, label in self.nodes:
            g.add_node(n, label=label)
        for a, b, label in self.edges:
            g.add_edge(a, b, label=label)
        return g


@dataclass(frozen=True)
class Snapshot(_LabeledGraph):
    """The network observed at discrete time point `time_index`."""

    time_index: int
    nodes: tuple[tuple[int, str], ...]
    edges: tuple[tuple[int, int, str], ...]

    def __post_init__(self):
        if isinstance(self.time_index, bool) or not isinstance(self.time_index, int) or self.time_index < 0:
            raise PatternError(f"snapshot time index must be a nonnegative integer, got {self.time_index!r}")
        _validate(self.nodes, self.edges, f"snapshot t={self.time_index}")

    @classmethod
    def build(cls, time_index: int, nodes: Iterable[tuple[int, str]], edges: Iterable[tuple[int, int, str]] = ()) -> Snapshot:
        """Build a snapshot from unordered node and edge collections."""
        norm_nodes, norm_edges = _normalize(nodes, edges)
        return cls(time_index, norm_nodes, norm_edges)


class DFSEdge(NamedTuple):
    """One entry of a DFS code: (discovery index, discovery index, labels)."""

    frm: int
    to: int
    frm_label: str
    edge_label: str
    to_label: str

    @property
    def is_forward(self) -> bool:
        return self.frm < self.to


def format_code(dfs_code: Sequence[DFSEdge]) -> str:
    return "".join(f"({e.frm},{e.to},{e.frm_label},{e.edge_label},{e.to_label})" for e in dfs_code)


def parse_code(code: str) -> tuple[DFSEdge, ...]:
    """Inverse of format_code."""
    edges = []
    pos = 0
    for m in _CODE_EDGE_RE.finditer(code):
        if m.start() != pos:
            break
        edges.append(DFSEdge(int(m.group(1)), int(m.group(2)), m.group(3), m.group(4), m.group(5)))
        pos = m.end()
    if pos != len(code) or not edges:
        raise PatternError(f"malformed pattern code {code!r}")
    return tuple(edges)


def rightmost_path(dfs_code: Sequence[DFSEdge]) -> list[int]:
    """Discovery indices from the rightmost vertex back to the root."""
    parent = {e.to: e.frm for e in dfs_code if e.is_forward}
    node = max(e.to for e in dfs_code if e.is_forward)
    path = [node]
    while node in parent:
        node = parent[node]
        path.append(node)
    return path


def extension_key(edge: DFSEdge) -> tuple:
    """Order of candidate extensions of one DFS code prefix.

    Backward edges precede forward ones; backward edges to shallower vertices come
    first; forward edges grown from deeper vertices come first; labels break ties.
    """
    if edge.is_forward:
        return (1, -edge.frm, edge.edge_label, edge.to_label)
    return (0, edge.to, edge.edge_label)


def rightmost_extensions(order: tuple[int, ...], dfs_code: Sequence[DFSEdge], rmpath: Sequence[int],
                         adjacency: Mapping[int, Mapping[int, str]], labels: Mapping[int, str],
                         used: set[frozenset] | None = None, min_label: str | None = None):
    """Yield (extension edge, extended order) for one embedding of `dfs_code`.

    `order[i]` is the host node discovered at index i. Host graphs are simple, so an
    edge between two embedded nodes is used iff the code already holds that index pair.
    """
    if used is None:
        used = {frozenset((e.frm, e.to)) for e in dfs_code}
    rm = rmpath[0]
    rm_node = order[rm]
    rm_adj = adjacency[rm_node]
    for j in reversed(rmpath[1:]):
        label = rm_adj.get(order[j])
        if label is not None and frozenset((rm, j)) not in used:
            yield DFSEdge(rm, j, labels[rm_node], label, labels[order[j]]), order
    embedded = set(order)
    new_index = len(order)
    for i in rmpath:
        node = order[i]
        for nbr, label in adjacency[node].items():
            if nbr in embedded:
                continue
            if min_label is not None and labels[nbr] < min_label:
                continue
            yield DFSEdge(i, new_index, labels[node], label, labels[nbr]), order + (nbr,)


def _is_connected(nodes: Sequence[tuple[int, str]], edges: Sequence[tuple[int, int, str]]) -> bool:
    g = nx.Graph()
    g.add_nodes_from(n for n, _ in nodes)
    g.add_edges_from((a, b) for a, b, _ in edges)
    return g.number_of_nodes() > 0 and nx.is_connected(g)


def min_dfs_code(nodes: Sequence[tuple[int, str]], edges: Sequence[tuple[int, int, str]]) -> tuple[DFSEdge, ...]:
    """Lexicographically smallest DFS code of a connected graph with at least one edge."""
    labels = dict(nodes)
    adjacency: dict[int, dict[int, str]] = {n: {} for n in labels}
    for a, b, label in edges:
        adjacency[a][b] = label
        adjacency[b][a] = label

    # Smallest first edge over both orientations of every edge
    first = min(min((labels[a], l, labels[b]), (labels[b], l, labels[a])) for a, b, l in edges)
    states = []
    for a, b, l in edges:
        for u, v in ((a, b), (b, a)):
            if (labels[u], l, labels[v]) == first:
                states.append(((u, v), {frozenset((0, 1))}))
    code = [DFSEdge(0, 1, *first)]

    # Grow the code one minimal extension at a time, keeping every embedding that realizes it
    while len(code) < len(edges):
        rmpath = rightmost_path(code)
        best_key = None
        best_edge = None
        survivors = []
        for order, used in states:
            for ext, new_order in rightmost_extensions(order, code, rmpath, adjacency, labels, used):
                key = extension_key(ext)
                if best_key is None or key < best_key:
                    best_key, best_edge, survivors = key, ext, [(new_order, used)]
                elif key == best_key:
                    survivors.append((new_order, used))
        if best_edge is None:
            raise PatternError("graph is not connected")
        pair = frozenset((best_edge.frm, best_edge.to))
        states = [(order, used | {pair}) for order, used in survivors]
        code.append(best_edge)
    return tuple(code)


def _canonical(nodes: Sequence[tuple[int, str]], edges: Sequence[tuple[int, int, str]]) -> str:
    if not edges:
        raise PatternError("pattern must have at least one edge")
    if not _is_connected(nodes, edges):
        raise PatternError("pattern must be connected")
    return format_code(min_dfs_code(nodes, edges))


@dataclass(frozen=True, eq=False)
class Pattern(_LabeledGraph):
    """Connected labeled graph; two patterns are equal iff their codes are."""

    nodes: tuple[tuple[int, str], ...]
    edges: tuple[tuple[int, int, str], ...]
    code: str = field(default="")

    def __post_init__(self):
        _validate(self.nodes, self.edges, "pattern")
        if not self.code:
            object.__setattr__(self, "code", _canonical(self.nodes, self.edges))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Pattern) and self.code == other.code

    def __hash__(self) -> int:
        return hash(self.code)

    def __repr__(self) -> str:
        return f"Pattern({self.code})"

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @classmethod
    def build(cls, nodes: Iterable[tuple[int, str]], edges: Iterable[tuple[int, int, str]], max_edges: int | None = None) -> Pattern:
        norm_nodes, norm_edges = _normalize(nodes, edges)
        if max_edges is not None and len(norm_edges) > max_edges:
            raise PatternError(f"pattern has {len(norm_edges)} edges, more than the cap of {max_edges}")
        return cls(norm_nodes, norm_edges)

    @classmethod
    def from_dfs_code(cls, dfs_code: Sequence[DFSEdge]) -> Pattern:
        """Build the pattern spelled by a DFS code known to be minimal."""
        nodes: dict[int, str] = {}
        edges = []
        for e in dfs_code:
            nodes.setdefault(e.frm, e.frm_label)
            nodes.setdefault(e.to, e.to_label)
            edges.append((min(e.frm, e.to), max(e.frm, e.to), e.edge_label))
        norm_nodes, norm_edges = _normalize(nodes.items(), edges)
        return cls(norm_nodes, norm_edges, format_code(dfs_code))

    @classmethod
    def parse(cls, code: str) -> Pattern:
        """Rebuild a pattern from its code string, rejecting codes that are not minimal."""
        pattern = cls.from_dfs_code(parse_code(code))
        if canonical_code(pattern) != code:
            raise PatternError(f"{code!r} is not a minimum DFS code")
        return pattern


def canonical_code(pattern: Pattern) -> str:
    """Minimum DFS code string of `pattern`, recomputed from its nodes and edges."""
    return _canonical(pattern.nodes, pattern.edges)


def is_subgraph(pattern: Pattern, snapshot: Snapshot) -> bool:
    """True iff `pattern` has a label-preserving, non-induced embedding in `snapshot`."""
    if len(pattern.edges) > len(snapshot.edges) or len(pattern.nodes) > len(snapshot.nodes):
        return False

    # Label multisets must fit before any matching is attempted
    if pattern.node_label_counts - snapshot.node_label_counts:
        return False
    if pattern.edge_label_counts - snapshot.edge_label_counts:
        return False

    matcher = iso.GraphMatcher(snapshot.graph, pattern.graph, node_match=_NODE_MATCH, edge_match=_EDGE_MATCH)
    return matcher.subgraph_is_monomorphic()
