"""Seeded synthetic snapshot streams and random graphs.

Every generator takes a `random.Random` seed and nothing else random, so a seed
always reproduces the same stream.
"""

from __future__ import annotations

import random
from typing import Sequence

from netchange.graph import Pattern, Snapshot
from netchange.windowing import TimeWindow

NODE_LABELS = ("A", "B", "C", "D", "E")
EDGE_LABELS = ("x", "y", "z", "w", "v")


def random_edges(rng: random.Random, num_nodes: int, num_edges: int, edge_labels: Sequence[str],
                 connected: bool = False) -> list[tuple[int, int, str]]:
    """Up to `num_edges` distinct node pairs; with `connected` a random spanning tree comes first."""
    pairs: set[tuple[int, int]] = set()
    if connected:
        for v in range(1, num_nodes):
            pairs.add((rng.randrange(v), v))
    all_pairs = [(a, b) for a in range(num_nodes) for b in range(a + 1, num_nodes)]
    rng.shuffle(all_pairs)
    for pair in all_pairs:
        if len(pairs) >= num_edges:
            break
        pairs.add(pair)
    return [(a, b, rng.choice(edge_labels)) for a, b in sorted(pairs)]


def random_snapshot(rng: random.Random, time_index: int, num_nodes: int = 8, num_edges: int = 12,
                    node_labels: Sequence[str] = NODE_LABELS[:2],
                    edge_labels: Sequence[str] = EDGE_LABELS[:2]) -> Snapshot:
    nodes = [(n, rng.choice(node_labels)) for n in range(num_nodes)]
    return Snapshot.build(time_index, nodes, random_edges(rng, num_nodes, num_edges, edge_labels))


def random_window(rng: random.Random, window_id: int = 0, num_snapshots: int = 10, **snapshot_args) -> TimeWindow:
    snapshots = tuple(random_snapshot(rng, t, **snapshot_args) for t in range(num_snapshots))
    return TimeWindow(window_id, 0, snapshots)


def random_pattern(rng: random.Random, num_nodes: int = 4, extra_edges: int = 1,
                   node_labels: Sequence[str] = NODE_LABELS[:2],
                   edge_labels: Sequence[str] = EDGE_LABELS[:2]) -> Pattern:
    """Connected pattern: a random spanning tree plus up to `extra_edges` more edges."""
    nodes = [(n, rng.choice(node_labels)) for n in range(num_nodes)]
    tree = num_nodes - 1
    edges = random_edges(rng, num_nodes, tree + extra_edges, edge_labels, connected=True)
    return Pattern.build(nodes, edges)


def permuted(pattern: Pattern, rng: random.Random) -> Pattern:
    """The same pattern with its node ids shuffled."""
    ids = [n for n, _ in pattern.nodes]
    image = ids[:]
    rng.shuffle(image)
    mapping = dict(zip(ids, image))
    return Pattern.build(
        [(mapping[n], label) for n, label in pattern.nodes],
        [(mapping[a], mapping[b], label) for a, b, label in pattern.edges],
    )


def _relabeled_copy(time_index: int, nodes: Sequence[tuple[int, str]], edges: Sequence[tuple[int, int, str]],
                    rng: random.Random) -> Snapshot:
    """Copy of a fixed graph under fresh node ids, so no identity is shared across snapshots."""
    ids = list(range(100, 100 + len(nodes)))
    rng.shuffle(ids)
    mapping = {n: ids[i] for i, (n, _) in enumerate(nodes)}
    return Snapshot.build(
        time_index,
        [(mapping[n], label) for n, label in nodes],
        [(mapping[a], mapping[b], label) for a, b, label in edges],
    )


def _background(rng: random.Random, num_nodes: int = 6, num_edges: int = 7):
    nodes = [(n, rng.choice(NODE_LABELS[:2])) for n in range(num_nodes)]
    return nodes, random_edges(rng, num_nodes, num_edges, EDGE_LABELS[:2], connected=True)


def drift_free(seed: int = 0, num_snapshots: int = 60) -> list[Snapshot]:
    """The same background graph in every snapshot: every frequency is constant."""
    rng = random.Random(seed)
    nodes, edges = _background(rng)
    return [_relabeled_copy(t, nodes, edges, rng) for t in range(num_snapshots)]


def emerging(seed: int = 0, window_size: int = 10, planted_earlier: int = 1, planted_later: int = 9) -> list[Snapshot]:
    """Two windows of a constant background; an isolated C-z-D edge is planted in
    `planted_earlier` snapshots of the first window and `planted_later` of the second."""
    rng = random.Random(seed)
    nodes, edges = _background(rng)
    earlier = set(rng.sample(range(window_size), planted_earlier))
    later = {window_size + i for i in rng.sample(range(window_size), planted_later)}
    stream = []
    for t in range(2 * window_size):
        snapshot = _relabeled_copy(t, nodes, edges, rng)
        if t in earlier or t in later:
            snapshot = Snapshot.build(
                t,
                list(snapshot.nodes) + [(0, "C"), (1, "D")],
                list(snapshot.edges) + [(0, 1, "z")],
            )
        stream.append(snapshot)
    return stream


def label_shift(seed: int = 0, num_snapshots: int = 100, shift_at: int = 50, num_edges: int = 20,
                before: float = 0.9, after: float = 0.1) -> list[Snapshot]:
    """Matchings of `num_edges` edges between A-nodes; edge label x has probability
    `before` up to `shift_at` and `after` from then on, y otherwise."""
    rng = random.Random(seed)
    stream = []
    for t in range(num_snapshots):
        p = before if t < shift_at else after
        nodes = [(n, "A") for n in range(2 * num_edges)]
        edges = [(2 * i, 2 * i + 1, "x" if rng.random() < p else "y") for i in range(num_edges)]
        stream.append(Snapshot.build(t, nodes, edges))
    return stream


def scale(seed: int = 0, num_snapshots: int = 100, num_nodes: int = 100, num_edges: int = 300) -> list[Snapshot]:
    """Independent random snapshots over 3 node labels and 3 edge labels."""
    rng = random.Random(seed)
    return [
        random_snapshot(rng, t, num_nodes, num_edges, NODE_LABELS[:3], EDGE_LABELS[:3])
        for t in range(num_snapshots)
    ]


GENERATORS = {
    "drift-free": drift_free,
    "emerging": emerging,
    "label-shift": label_shift,
    "scale": scale,
}
