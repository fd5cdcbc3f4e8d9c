"""Frequent connected pattern mining and exact relative frequencies per time window.

Mining grows minimum DFS codes by rightmost extension, keeping for every code the
embeddings it has in each snapshot of the window. A code is abandoned as soon as
its frequency drops to alpha or below, or when it is not the minimum code of the
pattern it spells.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import utils
from .errors import ConfigError, InvariantError
from .utils import as_fraction
from .graph import (
    DFSEdge, Pattern, Snapshot, extension_key, is_subgraph, min_dfs_code, parse_code, rightmost_extensions,
    rightmost_path,
)
from .windowing import TimeWindow


@dataclass(frozen=True)
class MiningConfig:
    alpha: Fraction = Fraction(3, 10)
    max_edges: int = 3

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        if not 0 <= self.alpha <= 1:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}", module="miner")
        if self.max_edges < 1:
            raise ConfigError(f"max_edges must be >= 1, got {self.max_edges}", module="miner")


@dataclass(frozen=True)
class FrequencyEntry:
    pattern: Pattern
    support: int
    window_size: int

    @property
    def frequency(self) -> Fraction:
        return Fraction(self.support, self.window_size)


@dataclass
class FrequencyTable:
    """Per-window map from pattern code to its support and exact relative frequency."""

    window_id: int
    window_size: int
    entries: dict[str, FrequencyEntry] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, code: str) -> bool:
        return code in self.entries

    def add(self, pattern: Pattern, support: int) -> None:
        if not 0 <= support <= self.window_size:
            raise InvariantError(f"support {support} outside [0, {self.window_size}]", module="miner")
        self.entries[pattern.code] = FrequencyEntry(pattern, support, self.window_size)

    def frequency(self, code: str) -> Fraction:
        return self.entries[code].frequency

    def patterns(self) -> list[Pattern]:
        return [self.entries[code].pattern for code in sorted(self.entries)]

    def codes(self) -> list[str]:
        return sorted(self.entries)

    def restrict(self, codes: Iterable[str]) -> FrequencyTable:
        """Copy holding only the given codes."""
        keep = set(codes)
        return FrequencyTable(self.window_id, self.window_size,
                              {c: e for c, e in self.entries.items() if c in keep})


def support(pattern: Pattern, window: TimeWindow) -> int:
    """Number of snapshots in `window` that contain `pattern`."""
    return sum(1 for snapshot in window.snapshots if is_subgraph(pattern, snapshot))


def frequency(pattern: Pattern, window: TimeWindow) -> Fraction:
    """|{G in W : pattern is a subgraph of G}| / |W|, exactly."""
    return Fraction(support(pattern, window), len(window))


# Host node ids reached at each discovery index, one tuple per embedding
Projection = Mapping[int, list[tuple[int, ...]]]


def evaluate_patterns(patterns: Iterable[Pattern], window: TimeWindow,
                      known: FrequencyTable | None = None) -> FrequencyTable:
    """Exact frequency of every given pattern in `window`, not filtered by alpha.

    Supports already in `known` (the window's mined table) are taken as they are; the
    rest are counted along the prefix tree of their DFS codes.
    """
    if known is not None and (known.window_id, known.window_size) != (window.window_id, len(window)):
        raise InvariantError(f"table of window {known.window_id} given for window {window.window_id}", module="miner")
    table = FrequencyTable(window.window_id, len(window))
    missing: dict[str, Pattern] = {}
    for pattern in patterns:
        if known is not None and pattern.code in known:
            table.add(pattern, known.entries[pattern.code].support)
        else:
            missing.setdefault(pattern.code, pattern)
    if missing:
        supports = count_supports(missing, window)
        for code in sorted(missing):
            table.add(missing[code], supports[code])
    return table


class _CodeTrie:
    """Prefix tree of DFS codes; `code` is set on nodes that end a wanted code."""

    __slots__ = ("children", "code")

    def __init__(self):
        self.children: dict[DFSEdge, _CodeTrie] = {}
        self.code: str | None = None

    def insert(self, dfs_code: Iterable[DFSEdge], code: str) -> None:
        node = self
        for edge in dfs_code:
            node = node.children.setdefault(edge, _CodeTrie())
        node.code = code


def count_supports(codes: Iterable[str], window: TimeWindow) -> dict[str, int]:
    """Support of every given minimum DFS code in `window`.

    Embeddings are grown by rightmost extension along the prefix tree of the codes,
    so a prefix shared by many codes is matched once.
    """
    trie = _CodeTrie()
    supports = {}
    for code in codes:
        trie.insert(parse_code(code), code)
        supports[code] = 0
    if not trie.children:
        return supports

    roots: dict[DFSEdge, dict[int, list[tuple[int, ...]]]] = defaultdict(lambda: defaultdict(list))
    for gid, snapshot in enumerate(window.snapshots):
        labels = snapshot.labels
        for a, b, label in snapshot.edges:
            for u, v in ((a, b), (b, a)):
                edge = DFSEdge(0, 1, labels[u], label, labels[v])
                if edge in trie.children:
                    roots[edge][gid].append((u, v))

    dfs_code: list[DFSEdge] = []
    for edge, node in trie.children.items():
        if edge in roots:
            dfs_code.append(edge)
            _count_along(node, dfs_code, roots[edge], window.snapshots, supports)
            dfs_code.pop()
    return supports


def _count_along(node: _CodeTrie, dfs_code: list[DFSEdge], projection: Projection,
                 snapshots: Sequence[Snapshot], supports: dict[str, int]) -> None:
    if node.code is not None:
        supports[node.code] = len(projection)
    if not node.children:
        return

    rmpath = rightmost_path(dfs_code)
    min_label = dfs_code[0].frm_label
    used = {frozenset((e.frm, e.to)) for e in dfs_code}
    children: dict[DFSEdge, dict[int, list[tuple[int, ...]]]] = defaultdict(lambda: defaultdict(list))
    for gid, embeddings in projection.items():
        snapshot = snapshots[gid]
        for order in embeddings:
            for ext, new_order in rightmost_extensions(order, dfs_code, rmpath, snapshot.adjacency,
                                                       snapshot.labels, used, min_label):
                if ext in node.children:
                    children[ext][gid].append(new_order)

    for ext, child in node.children.items():
        if ext in children:
            dfs_code.append(ext)
            _count_along(child, dfs_code, children[ext], snapshots, supports)
            dfs_code.pop()


class _WindowMiner:
    """Mining state confined to one window."""

    def __init__(self, window: TimeWindow, config: MiningConfig):
        self.snapshots = window.snapshots
        self.size = len(window)
        self.config = config
        self.table = FrequencyTable(window.window_id, self.size)
        self.code: list[DFSEdge] = []

    def _frequent(self, count: int) -> bool:
        return Fraction(count, self.size) > self.config.alpha

    def _is_min(self) -> bool:
        if len(self.code) == 1:
            return True
        nodes = {}
        edges = []
        for e in self.code:
            nodes.setdefault(e.frm, e.frm_label)
            nodes.setdefault(e.to, e.to_label)
            edges.append((min(e.frm, e.to), max(e.frm, e.to), e.edge_label))
        return min_dfs_code(list(nodes.items()), edges) == tuple(self.code)

    def run(self) -> FrequencyTable:
        roots: dict[DFSEdge, dict[int, list[tuple[int, ...]]]] = defaultdict(lambda: defaultdict(list))
        for gid, snapshot in enumerate(self.snapshots):
            labels = snapshot.labels
            for a, b, label in snapshot.edges:
                for u, v in ((a, b), (b, a)):
                    if labels[u] <= labels[v]:
                        roots[DFSEdge(0, 1, labels[u], label, labels[v])][gid].append((u, v))
        for edge in sorted(roots):
            self.code.append(edge)
            self._grow(roots[edge])
            self.code.pop()
        return self.table

    def _grow(self, projection: Projection) -> None:
        count = len(projection)
        if not self._frequent(count) or not self._is_min():
            return
        self.table.add(Pattern.from_dfs_code(self.code), count)
        if len(self.code) >= self.config.max_edges:
            return

        rmpath = rightmost_path(self.code)
        min_label = self.code[0].frm_label
        used = {frozenset((e.frm, e.to)) for e in self.code}
        children: dict[DFSEdge, dict[int, list[tuple[int, ...]]]] = defaultdict(lambda: defaultdict(list))
        for gid, embeddings in projection.items():
            snapshot = self.snapshots[gid]
            for order in embeddings:
                for ext, new_order in rightmost_extensions(order, self.code, rmpath, snapshot.adjacency,
                                                           snapshot.labels, used, min_label):
                    children[ext][gid].append(new_order)

        for ext in sorted(children, key=lambda e: (extension_key(e), e)):
            child = children[ext]
            if not self._frequent(len(child)):
                continue
            self.code.append(ext)
            self._grow(child)
            self.code.pop()


def mine_frequent(window: TimeWindow, config: MiningConfig) -> FrequencyTable:
    """All connected patterns with at most `max_edges` edges and frequency strictly above alpha.

    Because the threshold is strict, alpha = 1 always yields an empty table.
    """
    table = _WindowMiner(window, config).run()
    utils.append_log(f"Window {window.window_id}: {len(table)} frequent patterns "
                     f"(alpha={config.alpha}, max_edges={config.max_edges})")
    return table
