"""Emerging, trend-based and periodic changes of pattern frequencies across windows.

Every detector works on frequency tables of consecutive windows that were
evaluated over one shared pattern universe, so each pattern has an exact
frequency (possibly 0) in every table. Growth rates are exact rationals, plus
+inf when a pattern appears from nothing; 0/0 is undefined (None) and never
takes part in a detection.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from typing import Sequence

from .errors import ConfigError, DetectionError, PatternError
from .graph import Pattern, check_label
from .miner import FrequencyTable, frequency
from .utils import as_fraction
from .windowing import TimeWindow

INFINITY = math.inf

STRICT = "strict"
LAMBDA = "lambda"

INCREASING = "+"
DECREASING = "-"

SHRINKING = "shrinking"
STABLE = "stable"
GROWING = "growing"

# A growth rate is a Fraction or INFINITY; None stands for 0/0
GrowthRate = Fraction | float


@dataclass(frozen=True)
class ThetaBin:
    """Growth rates up to `upper` (inclusive when `closed`) map to `category`."""

    upper: GrowthRate
    category: str
    closed: bool = False

    def admits(self, gr: GrowthRate) -> bool:
        return gr < self.upper or (gr == self.upper and (self.closed or self.upper == INFINITY))


def default_theta_bins(beta: Fraction) -> tuple[ThetaBin, ...]:
    """[0, 1/beta) shrinking, [1/beta, beta] stable, (beta, inf] growing."""
    return (
        ThetaBin(1 / beta, SHRINKING, closed=False),
        ThetaBin(beta, STABLE, closed=True),
        ThetaBin(INFINITY, GROWING, closed=True),
    )


def parse_theta_bins(text: str) -> tuple[ThetaBin, ...]:
    """Read '<1/2:shrinking,<=2:stable,<=inf:growing' style bin lists."""
    bins = []
    for item in text.split(","):
        item = item.strip()
        if ":" not in item:
            raise ConfigError(f"theta bin {item!r} must look like '<bound:category' or '<=bound:category'", module="detect")
        bound, category = (part.strip() for part in item.split(":", 1))
        if bound.startswith("<="):
            closed, bound = True, bound[2:]
        elif bound.startswith("<"):
            closed, bound = False, bound[1:]
        else:
            raise ConfigError(f"theta bin {item!r} must start with '<' or '<='", module="detect")
        try:
            upper = INFINITY if bound.strip().lower() in ("inf", "+inf") else as_fraction(bound)
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"theta bin {item!r}: bad bound ({e})", module="detect") from e
        bins.append(ThetaBin(upper, category, closed))
    return tuple(bins)


def format_growth_rate(gr: GrowthRate | None) -> str | None:
    if gr is None:
        return None
    return "inf" if gr == INFINITY else str(gr)


def format_theta_bins(bins: Sequence[ThetaBin]) -> str:
    return ",".join(f"{'<=' if b.closed else '<'}{format_growth_rate(b.upper)}:{b.category}" for b in bins)


@dataclass(frozen=True)
class DetectConfig:
    beta: Fraction = Fraction(2)
    trend_mode: str = STRICT
    trend_epsilon: Fraction = Fraction(0)
    period_max: int = 6
    jitter: int = 0
    min_repetitions: int = 3
    theta_bins: tuple[ThetaBin, ...] | None = None
    include_stable: bool = False
    report_vanishing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "beta", as_fraction(self.beta))
        object.__setattr__(self, "trend_epsilon", as_fraction(self.trend_epsilon))
        if self.beta <= 1:
            raise ConfigError(f"beta must be > 1, got {self.beta}", module="detect")
        if self.trend_mode not in (STRICT, LAMBDA):
            raise ConfigError(f"trend_mode must be '{STRICT}' or '{LAMBDA}', got {self.trend_mode!r}", module="detect")
        if self.trend_epsilon < 0:
            raise ConfigError("trend_epsilon must be >= 0", module="detect")
        if self.period_max < 1:
            raise ConfigError("period_max must be >= 1", module="detect")
        if self.jitter < 0:
            raise ConfigError("jitter must be >= 0", module="detect")
        if self.min_repetitions < 2:
            raise ConfigError("min_repetitions must be >= 2", module="detect")
        if self.theta_bins is None:
            object.__setattr__(self, "theta_bins", default_theta_bins(self.beta))
        else:
            object.__setattr__(self, "theta_bins", tuple(self.theta_bins))
        self._check_bins()

    def _check_bins(self) -> None:
        bins = self.theta_bins
        if not bins:
            raise ConfigError("theta_bins must not be empty", module="detect")
        uppers = [b.upper for b in bins]
        if any(b <= a for a, b in zip(uppers, uppers[1:])):
            raise ConfigError("theta bin upper bounds must be strictly increasing", module="detect")
        if uppers[-1] != INFINITY:
            raise ConfigError("the last theta bin must be bounded by inf", module="detect")
        if uppers[0] <= 0 and not bins[0].closed:
            raise ConfigError("the first theta bin admits no growth rate", module="detect")
        categories = [b.category for b in bins]
        if len(set(categories)) != len(categories):
            raise ConfigError("theta bin categories must be distinct", module="detect")
        for category in categories:
            try:
                check_label(category)
            except PatternError as e:
                raise ConfigError(f"theta bin category: {e.message}", module="detect") from None


@dataclass(frozen=True)
class EmergingChange:
    """Growth from `from_window` to the next window `to_window` above beta.

    With `vanishing` set the growth rate is taken the other way round: the pattern
    lost frequency by a factor above beta.
    """

    pattern: Pattern
    from_window: int
    to_window: int
    growth_rate: GrowthRate
    vanishing: bool = False


@dataclass(frozen=True)
class TrendChange:
    pattern: Pattern
    window_span: tuple[int, ...]
    sign: str
    mode: str
    lambda_value: Fraction | None = None

    @property
    def is_global(self) -> bool:
        return len(self.window_span) > 2


@dataclass(frozen=True)
class PeriodicChange:
    pattern: Pattern
    period: int
    category: str
    occurrence_indices: tuple[int, ...]
    growth_rates: tuple[GrowthRate, ...]
    exact: bool

    @property
    def repetitions(self) -> int:
        return len(self.occurrence_indices)


def ratio(numerator: Fraction, denominator: Fraction) -> GrowthRate | None:
    """numerator / denominator with x/0 = inf for x > 0 and 0/0 undefined."""
    if denominator == 0:
        return None if numerator == 0 else INFINITY
    return Fraction(numerator) / Fraction(denominator)


def growth_rate(pattern: Pattern, numerator_window: TimeWindow, denominator_window: TimeWindow) -> GrowthRate | None:
    """freq(P, numerator) / freq(P, denominator); None when both are zero."""
    return ratio(frequency(pattern, numerator_window), frequency(pattern, denominator_window))


def theta(gr: GrowthRate | None, config: DetectConfig) -> str:
    """Category of the first bin admitting `gr`."""
    if gr is None:
        raise DetectionError("cannot categorize an undefined growth rate")
    for b in config.theta_bins:
        if b.admits(gr):
            return b.category
    raise DetectionError(f"no theta bin admits growth rate {format_growth_rate(gr)}")


def frequency_rows(tables: Sequence[FrequencyTable]) -> tuple[dict[str, Pattern], dict[str, list[Fraction]]]:
    """Patterns and per-window frequencies of a consecutive, union-evaluated table sequence."""
    for a, b in zip(tables, tables[1:]):
        if b.window_id != a.window_id + 1:
            raise DetectionError(f"windows {a.window_id} and {b.window_id} are not consecutive")
    codes = sorted(set().union(*(t.entries for t in tables)))
    patterns: dict[str, Pattern] = {}
    rows: dict[str, list[Fraction]] = {}
    for code in codes:
        row = []
        for t in tables:
            entry = t.entries.get(code)
            if entry is None:
                raise DetectionError(f"pattern {code} has no frequency in window {t.window_id}; evaluate the pattern universe in every window")
            row.append(entry.frequency)
            patterns.setdefault(code, entry.pattern)
        rows[code] = row
    return patterns, rows


def detect_emerging(table_pair: tuple[FrequencyTable, FrequencyTable], config: DetectConfig) -> list[EmergingChange]:
    """Patterns whose growth rate from the earlier to the later window exceeds beta."""
    earlier, later = table_pair
    patterns, rows = frequency_rows([earlier, later])
    changes = []
    for code, (f_earlier, f_later) in rows.items():
        gr = ratio(f_later, f_earlier)
        if gr is not None and gr > config.beta:
            changes.append(EmergingChange(patterns[code], earlier.window_id, later.window_id, gr))
        if config.report_vanishing:
            gr = ratio(f_earlier, f_later)
            if gr is not None and gr > config.beta:
                changes.append(EmergingChange(patterns[code], earlier.window_id, later.window_id, gr, vanishing=True))
    changes.sort(key=lambda c: (c.vanishing, -c.growth_rate, c.pattern.code))
    return changes


def _step_signs(row: Sequence[Fraction]) -> list[str | None]:
    signs = []
    for a, b in zip(row, row[1:]):
        signs.append(INCREASING if a < b else DECREASING if a > b else None)
    return signs


def _strict_trends(pattern: Pattern, row: Sequence[Fraction], window_ids: Sequence[int]) -> list[TrendChange]:
    """One trend per maximal run of equally signed strict steps."""
    trends = []
    signs = _step_signs(row)
    i = 0
    while i < len(signs):
        sign = signs[i]
        if sign is None:
            i += 1
            continue
        j = i
        while j + 1 < len(signs) and signs[j + 1] == sign:
            j += 1
        trends.append(TrendChange(pattern, tuple(window_ids[i:j + 2]), sign, STRICT))
        i = j + 1
    return trends


def _lambda_trends(pattern: Pattern, row: Sequence[Fraction], window_ids: Sequence[int], epsilon: Fraction) -> list[TrendChange]:
    """Compare each window with the mean frequency of all windows before it."""
    trends = []
    running = Fraction(0)
    for m in range(1, len(row)):
        running += row[m - 1]
        mean = running / m
        if row[m] > mean + epsilon:
            sign = INCREASING
        elif row[m] < mean - epsilon:
            sign = DECREASING
        else:
            continue
        trends.append(TrendChange(pattern, tuple(window_ids[:m + 1]), sign, LAMBDA, mean))
    return trends


def detect_trends(tables: Sequence[FrequencyTable], config: DetectConfig) -> list[TrendChange]:
    if len(tables) < 2:
        raise DetectionError(f"trend detection needs at least 2 windows, got {len(tables)}")
    patterns, rows = frequency_rows(tables)
    window_ids = [t.window_id for t in tables]
    trends = []
    for code, row in rows.items():
        if config.trend_mode == STRICT:
            trends.extend(_strict_trends(patterns[code], row, window_ids))
        else:
            trends.extend(_lambda_trends(patterns[code], row, window_ids, config.trend_epsilon))
    return trends


def _longest_chain(categories: Sequence[str | None], start: int, period: int, jitter: int) -> tuple[int, ...]:
    """Longest chain from `start`; among equally long ones the candidate closest to each
    target wins, ties to the earlier index."""
    n = len(categories)
    category = categories[start]

    @cache
    def extend(k: int, prev: int) -> tuple[int, ...]:
        target = start + k * period
        lo = max(target - jitter, prev + 1)
        hi = min(target + jitter, n - 1)
        candidates = sorted((p for p in range(lo, hi + 1) if categories[p] == category),
                            key=lambda p: (abs(p - target), p))
        best: tuple[int, ...] = ()
        for p in candidates:
            tail = (p,) + extend(k + 1, p)
            if len(tail) > len(best):
                best = tail
        return best

    return (start,) + extend(1, start)


def find_periodic_chains(categories: Sequence[str | None], period_max: int, jitter: int,
                         min_repetitions: int) -> list[tuple[int, str, tuple[int, ...]]]:
    """Occurrence chains of one category recurring every `period` positions.

    The k-th occurrence must lie within `jitter` of start + k * period and after the
    previous one. Each start keeps its longest chain. Chains contained in a longer chain
    with the same period and category are dropped.
    """
    chains: dict[tuple[int, str], list[tuple[int, ...]]] = defaultdict(list)
    for period in range(1, period_max + 1):
        for start, category in enumerate(categories):
            if category is None:
                continue
            chain = _longest_chain(categories, start, period, jitter)
            if len(chain) >= min_repetitions:
                chains[(period, category)].append(chain)

    found = []
    for (period, category), group in chains.items():
        members = [set(c) for c in group]
        for chain, members_of in zip(group, members):
            if any(len(other) > len(members_of) and members_of <= other for other in members):
                continue
            found.append((period, category, chain))
    found.sort()
    return found


def periodic_findings(tables: Sequence[FrequencyTable], config: DetectConfig) -> tuple[list[PeriodicChange], list[PeriodicChange]]:
    """All periodic changes split into (reported, suppressed stable-category ones)."""
    if len(tables) < 3:
        raise DetectionError(f"periodic detection needs at least 3 windows, got {len(tables)}")
    patterns, rows = frequency_rows(tables)
    kept, suppressed = [], []
    for code, row in rows.items():
        # g_i compares window i + 1 against window i
        rates = [ratio(b, a) for a, b in zip(row, row[1:])]
        categories = [None if gr is None else theta(gr, config) for gr in rates]
        for period, category, chain in find_periodic_chains(categories, config.period_max, config.jitter,
                                                            config.min_repetitions):
            raw = tuple(rates[i] for i in chain)
            exact = config.jitter == 0 and all(gr == raw[0] for gr in raw)
            change = PeriodicChange(patterns[code], period, category, chain, raw, exact)
            if category == STABLE and not config.include_stable:
                suppressed.append(change)
            else:
                kept.append(change)
    return kept, suppressed


def detect_periodic(tables: Sequence[FrequencyTable], config: DetectConfig) -> list[PeriodicChange]:
    return periodic_findings(tables, config)[0]
