from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import pytest

from netchange import utils
from netchange.graph import Pattern, Snapshot
from netchange.miner import FrequencyTable
from netchange.windowing import TimeWindow


def snap(t: int, nodes: dict[int, str], edges: Sequence[tuple[int, int, str]] = ()) -> Snapshot:
    return Snapshot.build(t, nodes.items(), edges)


def window_of(snapshots: Sequence[Snapshot], window_id: int = 0, start: int = 0) -> TimeWindow:
    return TimeWindow(window_id, start, tuple(snapshots))


def edge_pattern(a: str = "A", label: str = "x", b: str = "B") -> Pattern:
    return Pattern.build([(0, a), (1, b)], [(0, 1, label)])


def tables_from_rows(rows: dict[Pattern, Sequence[Fraction]], window_size: int = 10) -> list[FrequencyTable]:
    """One table per window with the given exact frequencies (multiples of 1/window_size)."""
    length = len(next(iter(rows.values())))
    tables = [FrequencyTable(i, window_size) for i in range(length)]
    for pattern, row in rows.items():
        for table, f in zip(tables, row):
            support = Fraction(f) * window_size
            assert support.denominator == 1
            table.add(pattern, int(support))
    return tables


@pytest.fixture(autouse=True)
def no_run_log():
    """Keep the module-level run log path from leaking between tests."""
    utils.set_log_path(None)
    yield
    utils.set_log_path(None)
