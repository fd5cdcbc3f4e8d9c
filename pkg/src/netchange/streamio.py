"""Read and write snapshot stream files.

A stream file starts with the header line `# netchange-stream v1`, followed by one
tab-separated record per edge:

    time_index  node_a  label_a  node_b  label_b  edge_label

Records are sorted by time_index and all records sharing a time_index form one
snapshot. An isolated node is written with node_b, label_b and edge_label set to
"-". Blank lines and further lines starting with "#" are ignored. Raw timestamps
are not binned: bin them to integer time indices before writing the file.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from . import utils
from .errors import PatternError, StreamFormatError
from .graph import Snapshot, check_label

HEADER = "# netchange-stream v1"
SENTINEL = "-"
_FIELDS = 6


def _parse_int(text: str, what: str, line_number: int) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise StreamFormatError(f"{what} {text!r} is not an integer", line_number) from None
    if value < 0:
        raise StreamFormatError(f"{what} {value} is negative", line_number)
    return value


def _parse_label(text: str, line_number: int) -> str:
    try:
        return check_label(text)
    except PatternError as e:
        raise StreamFormatError(e.message, line_number) from None


class _SnapshotBuilder:
    """Accumulates the records of one time index."""

    def __init__(self, time_index: int):
        self.time_index = time_index
        self.nodes: dict[int, str] = {}
        self.edges: dict[tuple[int, int], str] = {}

    def add_node(self, node: int, label: str, line_number: int) -> None:
        known = self.nodes.setdefault(node, label)
        if known != label:
            raise StreamFormatError(
                f"node {node} labeled {label!r} but earlier labeled {known!r} at t={self.time_index}", line_number)

    def add_edge(self, a: int, b: int, label: str, line_number: int) -> None:
        if a == b:
            raise StreamFormatError(f"self-loop on node {a}", line_number)
        key = (min(a, b), max(a, b))
        known = self.edges.get(key)
        if known == label:
            raise StreamFormatError(f"duplicate edge ({a}, {b}, {label}) at t={self.time_index}", line_number)
        if known is not None:
            raise StreamFormatError(f"second edge between nodes {a} and {b} at t={self.time_index}", line_number)
        self.edges[key] = label

    def build(self) -> Snapshot:
        return Snapshot.build(self.time_index, self.nodes.items(), ((a, b, l) for (a, b), l in self.edges.items()))


def load_stream(path: str | Path) -> list[Snapshot]:
    """One snapshot per distinct time index, in increasing order."""
    path = Path(path)
    snapshots: list[Snapshot] = []
    current: _SnapshotBuilder | None = None
    seen_header = False

    with path.open("rb") as f:
        for line_number, data in enumerate(f, start=1):
            try:
                line = data.decode("utf-8").rstrip("\r\n")
            except UnicodeDecodeError as e:
                raise StreamFormatError(f"invalid UTF-8 at byte {e.start} of the line", line_number) from None
            if not seen_header:
                if line.strip() != HEADER:
                    raise StreamFormatError(f"expected header {HEADER!r}, got {line!r}", line_number)
                seen_header = True
                continue
            if not line.strip() or line.startswith("#"):
                continue

            fields = line.split("\t")
            if len(fields) != _FIELDS:
                raise StreamFormatError(f"expected {_FIELDS} tab-separated fields, got {len(fields)}", line_number)
            time_index = _parse_int(fields[0], "time index", line_number)

            # Start a new snapshot whenever the time index advances
            if current is None or time_index != current.time_index:
                if current is not None:
                    if time_index < current.time_index:
                        raise StreamFormatError(
                            f"time index {time_index} after {current.time_index}: records are not sorted", line_number)
                    snapshots.append(current.build())
                current = _SnapshotBuilder(time_index)

            node_a = _parse_int(fields[1], "node id", line_number)
            current.add_node(node_a, _parse_label(fields[2], line_number), line_number)
            if fields[3] == SENTINEL:
                if fields[4] != SENTINEL or fields[5] != SENTINEL:
                    raise StreamFormatError("isolated-node record must set node_b, label_b and edge_label to '-'", line_number)
                continue
            node_b = _parse_int(fields[3], "node id", line_number)
            current.add_node(node_b, _parse_label(fields[4], line_number), line_number)
            current.add_edge(node_a, node_b, _parse_label(fields[5], line_number), line_number)

    if not seen_header:
        raise StreamFormatError("empty file")
    if current is None:
        raise StreamFormatError("stream holds no records")
    snapshots.append(current.build())

    utils.append_log(f"Loaded {len(snapshots)} snapshots from {path}")
    return snapshots


def format_stream(snapshots: Iterable[Snapshot]) -> str:
    """Normalized stream text: edges sorted by endpoints, then isolated nodes by id."""
    lines = [HEADER]
    for snapshot in sorted(snapshots, key=lambda s: s.time_index):
        t = snapshot.time_index
        labels = snapshot.labels
        touched = set()
        for a, b, label in snapshot.edges:
            lines.append(f"{t}\t{a}\t{labels[a]}\t{b}\t{labels[b]}\t{label}")
            touched.update((a, b))
        for node, label in snapshot.nodes:
            if node not in touched:
                lines.append(f"{t}\t{node}\t{label}\t{SENTINEL}\t{SENTINEL}\t{SENTINEL}")
    return "\n".join(lines) + "\n"


def write_stream(snapshots: Iterable[Snapshot], path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(format_stream(snapshots), encoding="utf-8")
    except OSError as e:
        utils.append_log(f"Failed to write stream to {path}: {e}")
        raise
    else:
        utils.append_log(f"Wrote stream to {path}")
    return path
