"""Report files of a run: windows.csv, patterns.csv, changes.jsonl, summary.txt.

Every collection is written in a fixed sort order so identical inputs give
byte-identical files. Growth rates are written as exact rational strings ("inf"
for +inf) with a float convenience field next to them.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from . import utils
from .detect import (
    INFINITY, LAMBDA, DetectConfig, EmergingChange, PeriodicChange, TrendChange, format_growth_rate, ratio, theta,
)
from .miner import FrequencyTable
from .oracle import oracle_chain_valid
from .windowing import TimeWindow

WINDOWS_CSV = "windows.csv"
PATTERNS_CSV = "patterns.csv"
CHANGES_JSONL = "changes.jsonl"
SUMMARY_TXT = "summary.txt"

Change = EmergingChange | TrendChange | PeriodicChange


def _open_report(out_dir: str | Path, filename: str):
    path = utils.make_file(out_dir, filename)
    return path, path.open("w", encoding="utf-8", newline="")


def write_windows(out_dir: str | Path, windows: Sequence[TimeWindow]) -> Path:
    path, f = _open_report(out_dir, WINDOWS_CSV)
    with f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["window_id", "start", "end", "size", "cut_reason"])
        for w in windows:
            writer.writerow([w.window_id, w.first_time, w.last_time, len(w), w.cut_reason])
    utils.append_log(f"Wrote {len(windows)} windows to {path}")
    return path


def write_patterns(out_dir: str | Path, evaluated: Sequence[FrequencyTable], mined: Sequence[FrequencyTable]) -> Path:
    """Frequency of every pattern of the universe in every window, flagged when frequent there."""
    frequent = {t.window_id: set(t.entries) for t in mined}
    path, f = _open_report(out_dir, PATTERNS_CSV)
    rows = 0
    with f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["window_id", "code", "numerator", "denominator", "frequent"])
        for table in sorted(evaluated, key=lambda t: t.window_id):
            for code in table.codes():
                entry = table.entries[code]
                is_frequent = int(code in frequent.get(table.window_id, ()))
                writer.writerow([table.window_id, code, entry.support, entry.window_size, is_frequent])
                rows += 1
    utils.append_log(f"Wrote {rows} pattern frequencies to {path}")
    return path


def _float(gr) -> float | None:
    return None if gr is None or gr == INFINITY else float(gr)


def change_record(change: Change) -> dict:
    """JSON-ready dict with the same keys for every change type."""
    record = {
        "type": None, "pattern": change.pattern.code, "windows": None, "growth_rate": None,
        "growth_rate_float": None, "sign": None, "period": None, "category": None, "global": None,
    }
    if isinstance(change, EmergingChange):
        record.update({
            "type": "vanishing" if change.vanishing else "emerging",
            "windows": [change.from_window, change.to_window],
            "growth_rate": format_growth_rate(change.growth_rate),
            "growth_rate_float": _float(change.growth_rate),
        })
    elif isinstance(change, TrendChange):
        record.update({
            "type": "trend",
            "windows": list(change.window_span),
            "sign": change.sign,
            "global": change.is_global,
            "mode": change.mode,
            "lambda": None if change.lambda_value is None else str(change.lambda_value),
        })
    else:
        exact_rate = change.growth_rates[0] if change.exact else None
        record.update({
            "type": "periodic",
            "windows": [[i, i + 1] for i in change.occurrence_indices],
            "growth_rate": format_growth_rate(exact_rate),
            "growth_rate_float": _float(exact_rate),
            "period": change.period,
            "category": change.category,
            "occurrences": list(change.occurrence_indices),
            "repetitions": change.repetitions,
            "exact": change.exact,
            "growth_rates": [format_growth_rate(gr) for gr in change.growth_rates],
        })
    return record


def sort_changes(changes: Iterable[Change]) -> list[Change]:
    def key(c: Change):
        if isinstance(c, EmergingChange):
            return (0, c.from_window, c.vanishing, -c.growth_rate, c.pattern.code)
        if isinstance(c, TrendChange):
            return (1, c.pattern.code, c.window_span, c.sign)
        return (2, c.pattern.code, c.period, c.category, c.occurrence_indices)
    return sorted(changes, key=key)


def write_changes(out_dir: str | Path, changes: Iterable[Change]) -> Path:
    ordered = sort_changes(changes)
    path, f = _open_report(out_dir, CHANGES_JSONL)
    with f:
        for change in ordered:
            f.write(json.dumps(change_record(change), sort_keys=True) + "\n")
    utils.append_log(f"Wrote {len(ordered)} changes to {path}")
    return path


def write_summary(out_dir: str | Path, windows: int, patterns: int, changes: Iterable[Change],
                  suppressed_stable: int = 0, skipped: Sequence[str] = ()) -> Path:
    counts = Counter(change_record(c)["type"] for c in changes)
    global_trends = sum(1 for c in changes if isinstance(c, TrendChange) and c.is_global)
    lines = [
        f"windows: {windows}",
        f"patterns: {patterns}",
        f"emerging: {counts['emerging']}",
        f"vanishing: {counts['vanishing']}",
        f"trend: {counts['trend']} (global: {global_trends})",
        f"periodic: {counts['periodic']}",
        f"suppressed stable periodic: {suppressed_stable}",
    ]
    for name in skipped:
        lines.append(f"skipped detector: {name}")
    path, f = _open_report(out_dir, SUMMARY_TXT)
    with f:
        f.write("\n".join(lines) + "\n")
    utils.append_log(f"Wrote summary to {path}")
    return path


def read_patterns(path: str | Path) -> dict[tuple[int, str], Fraction]:
    """(window_id, code) -> frequency, from patterns.csv."""
    frequencies = {}
    with Path(path).open("r", encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            frequencies[(int(row["window_id"]), row["code"])] = Fraction(int(row["numerator"]), int(row["denominator"]))
    return frequencies


def _parse_rate(text: str | None):
    if text is None:
        return None
    return INFINITY if text == "inf" else Fraction(text)


def revalidate_changes(changes_path: str | Path, patterns_path: str | Path, config: DetectConfig) -> list[str]:
    """Recompute every change record from patterns.csv; return a description of each violation."""
    freq = read_patterns(patterns_path)
    problems = []
    with Path(changes_path).open("r", encoding="utf-8") as f:
        for n, line in enumerate(f, start=1):
            record = json.loads(line)
            code = record["pattern"]
            kind = record["type"]
            try:
                if kind in ("emerging", "vanishing"):
                    a, b = record["windows"]
                    gr = ratio(freq[(b, code)], freq[(a, code)]) if kind == "emerging" \
                        else ratio(freq[(a, code)], freq[(b, code)])
                    ok = b == a + 1 and gr is not None and gr > config.beta and gr == _parse_rate(record["growth_rate"])
                elif kind == "trend":
                    row = [freq[(w, code)] for w in record["windows"]]
                    if record.get("mode") == LAMBDA:
                        mean = sum(row[:-1], Fraction(0)) / (len(row) - 1)
                        ok = mean == Fraction(record["lambda"]) and (
                            row[-1] > mean + config.trend_epsilon if record["sign"] == "+"
                            else row[-1] < mean - config.trend_epsilon)
                    else:
                        steps = list(zip(row, row[1:]))
                        ok = all(x < y for x, y in steps) if record["sign"] == "+" else all(x > y for x, y in steps)
                    ok = ok and record["global"] == (len(row) > 2)
                elif kind == "periodic":
                    rates = [ratio(freq[(j, code)], freq[(i, code)]) for i, j in record["windows"]]
                    ok = (
                        None not in rates
                        and all(theta(gr, config) == record["category"] for gr in rates)
                        and oracle_chain_valid(record["occurrences"], record["period"], config.jitter)
                        and len(rates) >= config.min_repetitions
                        and [format_growth_rate(gr) for gr in rates] == record["growth_rates"]
                    )
                else:
                    ok = False
            except KeyError as e:
                problems.append(f"record {n}: missing frequency {e}")
                continue
            if not ok:
                problems.append(f"record {n}: {kind} change of {code} does not hold")
    return problems
