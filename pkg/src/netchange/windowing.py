"""Partition an ordered snapshot stream into consecutive time windows."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial.distance import jensenshannon

from . import utils
from .errors import PartitionError
from .graph import Snapshot

log = logging.getLogger(__name__)

FIXED = "fixed"
ADAPTIVE = "adaptive"

# Why a window was closed
CUT_SIZE = "size"
CUT_DIVERGENCE = "divergence"
CUT_MAX_WINDOW = "max_window"
CUT_END = "end"


@dataclass(frozen=True)
class PartitionConfig:
    mode: str = FIXED
    fixed_size: int = 10
    divergence_threshold: float = 0.1
    min_window: int = 5
    max_window: int = 100

    def __post_init__(self):
        if self.mode not in (FIXED, ADAPTIVE):
            raise PartitionError(f"unknown partition mode {self.mode!r}")
        if self.fixed_size < 1:
            raise PartitionError(f"fixed_size must be >= 1, got {self.fixed_size}")
        if not 0 < self.divergence_threshold <= 1:
            raise PartitionError(f"divergence_threshold must lie in (0, 1], got {self.divergence_threshold}")
        if self.min_window < 1 or self.max_window < 1:
            raise PartitionError("min_window and max_window must be positive")
        if self.min_window > self.max_window:
            raise PartitionError(f"min_window ({self.min_window}) exceeds max_window ({self.max_window})")


@dataclass(frozen=True)
class TimeWindow:
    """Contiguous run of snapshots; `start_index` is the position of the first one in the stream."""

    window_id: int
    start_index: int
    snapshots: tuple[Snapshot, ...]
    cut_reason: str = CUT_END

    def __post_init__(self):
        if not self.snapshots:
            raise PartitionError(f"window {self.window_id} is empty")
        times = [s.time_index for s in self.snapshots]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise PartitionError(f"window {self.window_id}: time indices are not strictly increasing")

    def __len__(self) -> int:
        return len(self.snapshots)

    @property
    def first_time(self) -> int:
        return self.snapshots[0].time_index

    @property
    def last_time(self) -> int:
        return self.snapshots[-1].time_index


@dataclass(frozen=True)
class LabelDistribution:
    """Normalized node/edge label histogram; empty for a snapshot without nodes."""

    masses: Mapping[tuple[str, str], float]

    @property
    def empty(self) -> bool:
        return not self.masses


def _check_stream(stream: Sequence[Snapshot]) -> None:
    if not stream:
        raise PartitionError("cannot partition an empty stream")
    times = [s.time_index for s in stream]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise PartitionError("stream time indices are not strictly increasing")


def fixed_partition(stream: Sequence[Snapshot], config: PartitionConfig) -> list[TimeWindow]:
    """Consecutive windows of `fixed_size` snapshots; a shorter remainder window is kept."""
    _check_stream(stream)
    size = config.fixed_size
    windows = []
    for window_id, start in enumerate(range(0, len(stream), size)):
        chunk = tuple(stream[start:start + size])
        reason = CUT_SIZE if start + size < len(stream) else CUT_END
        windows.append(TimeWindow(window_id, start, chunk, reason))
    utils.append_log(f"Fixed partition: {len(stream)} snapshots into {len(windows)} windows of size {size}")
    return windows


def snapshot_distribution(snapshot: Snapshot) -> LabelDistribution:
    """Node-label and edge-label histograms, each side weighted 0.5.

    A side with no observations gives its mass to the other side; a snapshot with
    no nodes yields an empty distribution, treated as uniform when compared.
    """
    node_counts = snapshot.node_label_counts
    edge_counts = snapshot.edge_label_counts
    n_nodes = sum(node_counts.values())
    n_edges = sum(edge_counts.values())
    if n_nodes == 0:
        return LabelDistribution({})
    node_side = 0.5 if n_edges else 1.0
    edge_side = 1.0 - node_side
    masses = {("node", label): node_side * count / n_nodes for label, count in node_counts.items()}
    if n_edges:
        masses.update({("edge", label): edge_side * count / n_edges for label, count in edge_counts.items()})
    return LabelDistribution(masses)


def js_divergence(p: LabelDistribution, q: LabelDistribution) -> float:
    """Jensen-Shannon divergence in bits, in [0, 1]."""
    vocabulary = sorted(set(p.masses) | set(q.masses))
    if not vocabulary or (p.empty and q.empty):
        return 0.0
    uniform = np.full(len(vocabulary), 1.0 / len(vocabulary))
    pv = uniform if p.empty else np.array([p.masses.get(k, 0.0) for k in vocabulary])
    qv = uniform if q.empty else np.array([q.masses.get(k, 0.0) for k in vocabulary])

    # scipy returns the distance, the square root of the divergence; nan when the
    # divergence rounds below zero
    with np.errstate(invalid="ignore"):
        distance = float(jensenshannon(pv, qv, base=2.0))
    if math.isnan(distance):
        return 0.0
    return min(max(distance ** 2, 0.0), 1.0)


class _RunningAggregate:
    """Mean of the distributions of the open window's non-empty snapshots."""

    def __init__(self):
        self.total: Counter = Counter()
        self.count = 0

    def add(self, dist: LabelDistribution) -> None:
        if dist.empty:
            return
        self.total.update(dist.masses)
        self.count += 1

    def distribution(self) -> LabelDistribution:
        if self.count == 0:
            return LabelDistribution({})
        return LabelDistribution({k: v / self.count for k, v in self.total.items()})


def adaptive_partition(stream: Sequence[Snapshot], config: PartitionConfig) -> list[TimeWindow]:
    """Cut before a snapshot whose label distribution diverges from the open window's.

    A divergence cut needs the open window to hold at least `min_window` snapshots;
    a cut is forced once it holds `max_window`.
    """
    _check_stream(stream)
    windows: list[TimeWindow] = []
    start = 0
    aggregate = _RunningAggregate()
    aggregate.add(snapshot_distribution(stream[0]))

    def close(end: int, reason: str) -> None:
        windows.append(TimeWindow(len(windows), start, tuple(stream[start:end]), reason))
        utils.append_log(f"Adaptive partition: window {len(windows) - 1} covers stream[{start}:{end}] ({reason})")

    for i in range(1, len(stream)):
        dist = snapshot_distribution(stream[i])
        open_size = i - start
        reason = None
        if open_size >= config.max_window:
            reason = CUT_MAX_WINDOW
        elif open_size >= config.min_window:
            divergence = js_divergence(dist, aggregate.distribution())
            log.debug("snapshot %d divergence %.6f", stream[i].time_index, divergence)
            if divergence > config.divergence_threshold:
                reason = CUT_DIVERGENCE
        if reason is not None:
            close(i, reason)
            start = i
            aggregate = _RunningAggregate()
        aggregate.add(dist)

    close(len(stream), CUT_END)
    return windows


def partition(stream: Sequence[Snapshot], config: PartitionConfig) -> list[TimeWindow]:
    """Dispatch on `config.mode`."""
    if config.mode == ADAPTIVE:
        return adaptive_partition(stream, config)
    return fixed_partition(stream, config)
