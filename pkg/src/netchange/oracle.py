"""Brute-force reference implementations for small inputs.

Everything here is exponential on purpose and refuses inputs beyond
`OracleLimits`. Nothing reuses the DFS-code machinery or the VF2 matcher: classes
are found by trying every node permutation and occurrences by enumerating every
edge subset.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Sequence

from .errors import InvariantError, OracleLimitError
from .graph import Pattern
from .miner import FrequencyTable
from .utils import as_fraction
from .windowing import TimeWindow

MAX_CATEGORIES = 64


@dataclass(frozen=True)
class OracleLimits:
    max_nodes: int = 8
    max_pattern_edges: int = 4
    max_snapshots: int = 20

    def __post_init__(self):
        if not 1 <= self.max_nodes <= 8:
            raise OracleLimitError(f"max_nodes must lie in [1, 8], got {self.max_nodes}")
        if not 1 <= self.max_pattern_edges <= 4:
            raise OracleLimitError(f"max_pattern_edges must lie in [1, 4], got {self.max_pattern_edges}")
        if not 1 <= self.max_snapshots <= 20:
            raise OracleLimitError(f"max_snapshots must lie in [1, 20], got {self.max_snapshots}")


def _connected(edges: Sequence[tuple[int, int, str]]) -> bool:
    adj = defaultdict(set)
    for a, b, _ in edges:
        adj[a].add(b)
        adj[b].add(a)
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        for nbr in adj[stack.pop()]:
            if nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    return len(seen) == len(adj)


def _brute_key(labels: dict[int, str], edges: Sequence[tuple[int, int, str]]) -> tuple:
    """Smallest (labels, edge list) over every renumbering of the nodes."""
    nodes = sorted(labels)
    best = None
    for perm in permutations(range(len(nodes))):
        index = dict(zip(nodes, perm))
        node_part = [None] * len(nodes)
        for node, i in index.items():
            node_part[i] = labels[node]
        edge_part = sorted((min(index[a], index[b]), max(index[a], index[b]), l) for a, b, l in edges)
        key = (tuple(node_part), tuple(edge_part))
        if best is None or key < best:
            best = key
    return best


def oracle_mine(window: TimeWindow, alpha: object, max_edges: int,
                limits: OracleLimits = OracleLimits()) -> FrequencyTable:
    """Frequent patterns of `window` by enumerating every connected edge subset of every snapshot."""
    if len(window) > limits.max_snapshots:
        raise OracleLimitError(f"window has {len(window)} snapshots, limit is {limits.max_snapshots}")
    if max_edges > limits.max_pattern_edges:
        raise OracleLimitError(f"max_edges {max_edges} exceeds limit {limits.max_pattern_edges}")
    for snapshot in window.snapshots:
        if len(snapshot.nodes) > limits.max_nodes:
            raise OracleLimitError(f"snapshot t={snapshot.time_index} has {len(snapshot.nodes)} nodes, limit is {limits.max_nodes}")
    alpha = as_fraction(alpha)

    representatives: dict[tuple, tuple] = {}
    containing: dict[tuple, set[int]] = defaultdict(set)
    for gid, snapshot in enumerate(window.snapshots):
        labels = dict(snapshot.nodes)
        for size in range(1, max_edges + 1):
            for subset in combinations(snapshot.edges, size):
                if not _connected(subset):
                    continue
                sub_labels = {n: labels[n] for a, b, _ in subset for n in (a, b)}
                key = _brute_key(sub_labels, subset)
                representatives.setdefault(key, key)
                containing[key].add(gid)

    table = FrequencyTable(window.window_id, len(window))
    codes_seen: dict[str, tuple] = {}
    for key in sorted(representatives):
        node_part, edge_part = key
        pattern = Pattern.build(enumerate(node_part), edge_part)
        if pattern.code in codes_seen:
            raise InvariantError(f"non-isomorphic classes share code {pattern.code}", module="oracle")
        codes_seen[pattern.code] = key
        count = len(containing[key])
        if Fraction(count, len(window)) > alpha:
            table.add(pattern, count)
    return table


def oracle_isomorphic(a: Pattern, b: Pattern, limits: OracleLimits = OracleLimits()) -> bool:
    """True iff some node bijection carries `a` onto `b`, found by trying them all."""
    for p in (a, b):
        if len(p.nodes) > limits.max_nodes:
            raise OracleLimitError(f"pattern with {len(p.nodes)} nodes exceeds limit {limits.max_nodes}")
    if len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return False
    a_nodes = [n for n, _ in a.nodes]
    b_labels = dict(b.nodes)
    a_labels = dict(a.nodes)
    b_edges = {(frozenset((x, y)), l) for x, y, l in b.edges}
    for image in permutations(b_labels):
        mapping = dict(zip(a_nodes, image))
        if any(a_labels[n] != b_labels[mapping[n]] for n in a_nodes):
            continue
        if all((frozenset((mapping[x], mapping[y])), l) in b_edges for x, y, l in a.edges):
            return True
    return False


def _admissible_chains(categories: Sequence[str | None], start: int, period: int, jitter: int):
    """Every chain from `start` that cannot be extended, by exhaustive branching."""
    n = len(categories)
    stack = [(start,)]
    while stack:
        chain = stack.pop()
        target = start + len(chain) * period
        nexts = [p for p in range(n) if categories[p] == categories[start]
                 and p > chain[-1] and abs(p - target) <= jitter]
        if not nexts:
            yield chain
        stack.extend(chain + (p,) for p in nexts)


def _chain_rank(chain: tuple[int, ...], start: int, period: int) -> tuple:
    """Longer first, then closest to each target, then earlier."""
    return -len(chain), [(abs(p - (start + k * period)), p) for k, p in enumerate(chain)]


def oracle_periods(categories: Sequence[str | None], period_max: int, jitter: int,
                   min_repetitions: int) -> list[tuple[int, str, tuple[int, ...]]]:
    """Every (period, category, chain) by exhaustive scanning, same chain rules as the detector."""
    n = len(categories)
    if n > MAX_CATEGORIES:
        raise OracleLimitError(f"category sequence of length {n} exceeds limit {MAX_CATEGORIES}")
    raw = []
    for start in range(n):
        for period in range(1, period_max + 1):
            category = categories[start]
            if category is None:
                continue
            chains = _admissible_chains(categories, start, period, jitter)
            chain = min(chains, key=lambda c: _chain_rank(c, start, period))
            if len(chain) >= min_repetitions:
                raw.append((period, category, chain))

    result = []
    for period, category, chain in raw:
        dominated = False
        for other_period, other_category, other in raw:
            if (other_period, other_category) == (period, category) and len(other) > len(chain) \
                    and set(chain) <= set(other):
                dominated = True
                break
        if not dominated:
            result.append((period, category, chain))
    return sorted(result)


def oracle_chain_valid(occurrences: Sequence[int], period: int, jitter: int) -> bool:
    """Occurrence k lies within `jitter` of occurrences[0] + k * period, strictly increasing."""
    if not occurrences:
        return False
    start = occurrences[0]
    for k, p in enumerate(occurrences):
        if abs(p - (start + k * period)) > jitter:
            return False
        if k and p <= occurrences[k - 1]:
            return False
    return True


def _gr(numerator: Fraction, denominator: Fraction) -> Fraction | float | None:
    if denominator == 0:
        return None if numerator == 0 else float("inf")
    return numerator / denominator


def oracle_trends(tables: Sequence[FrequencyTable]) -> set[tuple[str, tuple[int, ...], str]]:
    """Strict trends via growth rates: '+' when GR(P, W_i+1, W_i) > 1, '-' when GR(P, W_i, W_i+1) > 1."""
    codes = sorted(set().union(*(t.entries for t in tables)))
    ids = [t.window_id for t in tables]
    found = set()
    for code in codes:
        row = [t.entries[code].frequency for t in tables]
        steps = []
        for i in range(len(row) - 1):
            up = _gr(row[i + 1], row[i])
            down = _gr(row[i], row[i + 1])
            if up is not None and up > 1:
                steps.append("+")
            elif down is not None and down > 1:
                steps.append("-")
            else:
                steps.append(None)
        start = 0
        for i in range(1, len(steps) + 1):
            if i == len(steps) or steps[i] != steps[start]:
                if steps[start] is not None:
                    found.add((code, tuple(ids[start:i + 1]), steps[start]))
                start = i
    return found
