import random
from fractions import Fraction as F

import pytest

from netchange.detect import (
    GROWING, INFINITY, SHRINKING, STABLE, DetectConfig, ThetaBin, default_theta_bins, detect_emerging,
    detect_periodic, detect_trends, find_periodic_chains, format_theta_bins, growth_rate, parse_theta_bins,
    periodic_findings, ratio, theta,
)
from netchange.errors import ConfigError, DetectionError
from netchange.miner import FrequencyTable, evaluate_patterns
from netchange.oracle import oracle_periods, oracle_trends

from conftest import edge_pattern, snap, tables_from_rows, window_of

P = edge_pattern()
Q = edge_pattern("C", "z", "D")


def test_ratio_edge_cases():
    assert ratio(F(9, 10), F(1, 10)) == 9
    assert ratio(F(1, 2), 0) == INFINITY
    assert ratio(0, 0) is None
    assert ratio(0, F(1, 2)) == 0


def test_growth_rate_between_windows():
    earlier = window_of([snap(t, {0: "A", 1: "B"}, [(0, 1, "x" if t == 0 else "y")]) for t in range(4)])
    later = window_of([snap(t, {0: "A", 1: "B"}, [(0, 1, "x")]) for t in range(4, 8)], window_id=1)
    assert growth_rate(P, later, earlier) == 4
    assert growth_rate(P, earlier, later) == F(1, 4)


def test_growth_rate_of_a_window_with_itself_is_one():
    earlier = window_of([snap(t, {0: "A", 1: "B"}, [(0, 1, "x" if t % 3 else "y")]) for t in range(6)])
    later = window_of([snap(t, {0: "A", 1: "B"}, [(0, 1, "x" if t % 2 else "y")]) for t in range(6, 12)], window_id=1)
    assert growth_rate(P, earlier, earlier) == 1
    assert growth_rate(P, earlier, later) * growth_rate(P, later, earlier) == 1


def _replicated(snapshots, copies, window_id):
    repeated = [s for s in snapshots for _ in range(copies)]
    return window_of([s.__class__(t, s.nodes, s.edges) for t, s in enumerate(repeated)], window_id=window_id)


def test_emerging_ignores_snapshot_replication():
    earlier = [snap(t, {0: "A", 1: "B", 2: "C", 3: "D"}, [(0, 1, "x")] + ([(2, 3, "z")] if t == 0 else []))
               for t in range(5)]
    later = [snap(t, {0: "A", 1: "B", 2: "C", 3: "D"}, [(2, 3, "z")] + ([(0, 1, "x")] if t < 2 else []))
             for t in range(5)]
    found = []
    for copies in (1, 3):
        windows = (_replicated(earlier, copies, 0), _replicated(later, copies, 1))
        pair = tuple(evaluate_patterns([P, Q], w) for w in windows)
        changes = detect_emerging(pair, DetectConfig(beta=2, report_vanishing=True))
        found.append([(c.pattern.code, c.growth_rate, c.vanishing) for c in changes])
    assert found[0] == found[1]
    assert found[0] == [(Q.code, 5, False), (P.code, F(5, 2), True)]


def test_emerging_planted_pattern():
    tables = tables_from_rows({P: [F(1, 10), F(9, 10)], Q: [F(1, 2), F(1, 2)]})
    changes = detect_emerging((tables[0], tables[1]), DetectConfig(beta=3))
    assert len(changes) == 1
    change = changes[0]
    assert change.pattern == P
    assert (change.from_window, change.to_window) == (0, 1)
    assert change.growth_rate == 9 and isinstance(change.growth_rate, F)


def test_emerging_threshold_is_strict():
    tables = tables_from_rows({P: [F(1, 10), F(3, 10)]})
    assert detect_emerging((tables[0], tables[1]), DetectConfig(beta=3)) == []


def test_emerging_from_nothing_is_infinite():
    tables = tables_from_rows({P: [0, F(1, 2)], Q: [0, 0]})
    changes = detect_emerging((tables[0], tables[1]), DetectConfig(beta=2))
    assert [(c.pattern, c.growth_rate) for c in changes] == [(P, INFINITY)]


def test_vanishing_changes_are_opt_in():
    tables = tables_from_rows({P: [F(9, 10), F(1, 10)]})
    assert detect_emerging((tables[0], tables[1]), DetectConfig(beta=3)) == []
    changes = detect_emerging((tables[0], tables[1]), DetectConfig(beta=3, report_vanishing=True))
    assert len(changes) == 1 and changes[0].vanishing and changes[0].growth_rate == 9


def test_emerging_needs_consecutive_windows():
    tables = tables_from_rows({P: [F(1, 10), F(1, 10), F(9, 10)]})
    with pytest.raises(DetectionError):
        detect_emerging((tables[0], tables[2]), DetectConfig())


def test_detection_needs_every_pattern_in_every_window():
    earlier, later = FrequencyTable(0, 10), FrequencyTable(1, 10)
    earlier.add(P, 1)
    later.add(Q, 1)
    with pytest.raises(DetectionError):
        detect_emerging((earlier, later), DetectConfig())


def test_strict_global_trend():
    tables = tables_from_rows({P: [F(2, 10), F(4, 10), F(6, 10)]})
    trends = detect_trends(tables, DetectConfig())
    assert len(trends) == 1
    assert trends[0].sign == "+" and trends[0].window_span == (0, 1, 2) and trends[0].is_global


def test_strict_trends_split_at_turns_and_plateaus():
    tables = tables_from_rows({P: [F(1, 10), F(3, 10), F(2, 10), F(2, 10), F(1, 10), 0]})
    spans = [(t.window_span, t.sign, t.is_global) for t in detect_trends(tables, DetectConfig())]
    assert spans == [((0, 1), "+", False), ((1, 2), "-", False), ((3, 4, 5), "-", True)]


def test_lambda_trend():
    tables = tables_from_rows({P: [F(2, 10), F(4, 10), F(3, 10), F(5, 10)]})
    trends = detect_trends(tables, DetectConfig(trend_mode="lambda"))
    last = [t for t in trends if t.window_span[-1] == 3]
    assert len(last) == 1
    assert last[0].sign == "+" and last[0].lambda_value == F(3, 10)
    assert last[0].window_span == (0, 1, 2, 3)
    assert not [t for t in trends if t.window_span[-1] == 2]


def test_lambda_dead_band():
    tables = tables_from_rows({P: [F(2, 10), F(3, 10)]})
    assert detect_trends(tables, DetectConfig(trend_mode="lambda", trend_epsilon=F(1, 10))) == []
    assert len(detect_trends(tables, DetectConfig(trend_mode="lambda", trend_epsilon=F(1, 20)))) == 1


def test_trends_need_two_windows():
    with pytest.raises(DetectionError):
        detect_trends(tables_from_rows({P: [F(1, 2)]}), DetectConfig())


def test_strict_trends_match_growth_rate_formulation():
    rng = random.Random(7)
    for _ in range(100):
        length = rng.randint(2, 8)
        rows = {P: [F(rng.randint(0, 4), 4) for _ in range(length)],
                Q: [F(rng.randint(0, 4), 4) for _ in range(length)]}
        tables = tables_from_rows(rows, window_size=4)
        found = {(t.pattern.code, t.window_span, t.sign) for t in detect_trends(tables, DetectConfig())}
        assert found == oracle_trends(tables)


def test_default_theta_bins():
    config = DetectConfig(beta=2)
    assert [theta(gr, config) for gr in (0, F(1, 3), F(1, 2), 1, 2, F(5, 2), INFINITY)] == [
        SHRINKING, SHRINKING, STABLE, STABLE, STABLE, GROWING, GROWING,
    ]
    with pytest.raises(DetectionError):
        theta(None, config)


def test_theta_bins_syntax():
    bins = parse_theta_bins("<1/2:shrinking, <=2:stable, <=inf:growing")
    assert bins == default_theta_bins(F(2))
    assert format_theta_bins(bins) == "<1/2:shrinking,<=2:stable,<=inf:growing"
    assert parse_theta_bins("<1:down,<inf:up")[1] == ThetaBin(INFINITY, "up", False)


@pytest.mark.parametrize(
    "text",
    ["<1:a,<=1:b,<=inf:c", "<1:a,<=2:b", "<1:a,<=inf:a", "1:a,<=inf:b", "<x:a,<=inf:b", "<1 a"],
)
def test_bad_theta_bins(text):
    with pytest.raises(ConfigError):
        DetectConfig(theta_bins=parse_theta_bins(text))


@pytest.mark.parametrize(
    "kwargs",
    [{"beta": 1}, {"trend_mode": "loose"}, {"trend_epsilon": -1}, {"period_max": 0}, {"jitter": -1},
     {"min_repetitions": 1}],
)
def test_detect_config_validation(kwargs):
    with pytest.raises(ConfigError):
        DetectConfig(**kwargs)


def test_periodic_growth_every_second_window():
    # growth rates 2, 1, 2, 1, 2
    tables = tables_from_rows({P: [F(1, 10), F(2, 10), F(2, 10), F(4, 10), F(4, 10), F(8, 10)]})
    config = DetectConfig(beta=F(3, 2))
    changes = detect_periodic(tables, config)
    assert len(changes) == 1
    change = changes[0]
    assert (change.period, change.category, change.occurrence_indices) == (2, GROWING, (0, 2, 4))
    assert change.growth_rates == (2, 2, 2)
    assert change.exact and change.repetitions == 3


def test_periodic_jitter():
    # categories growing, stable, stable, growing, stable, growing
    tables = tables_from_rows({P: [F(1, 10), F(2, 10), F(2, 10), F(2, 10), F(4, 10), F(4, 10), F(8, 10)]})
    loose = detect_periodic(tables, DetectConfig(beta=F(3, 2), jitter=1, period_max=2))
    growing = [c for c in loose if c.category == GROWING]
    assert [(c.period, c.occurrence_indices, c.exact) for c in growing] == [(2, (0, 3, 5), False)]
    tight = detect_periodic(tables, DetectConfig(beta=F(3, 2), jitter=0, period_max=2))
    assert [c for c in tight if c.category == GROWING] == []


def test_stable_periodic_changes_are_suppressed_by_default():
    tables = tables_from_rows({P: [F(1, 2)] * 5})
    kept, suppressed = periodic_findings(tables, DetectConfig())
    assert kept == []
    assert suppressed and all(c.category == STABLE for c in suppressed)
    shown = detect_periodic(tables, DetectConfig(include_stable=True))
    assert {(c.period, c.occurrence_indices) for c in shown} == {(c.period, c.occurrence_indices) for c in suppressed}


def test_periodic_skips_undefined_growth_rates():
    tables = tables_from_rows({P: [0, 0, 0, 0, 0]})
    assert periodic_findings(tables, DetectConfig(include_stable=True)) == ([], [])


def test_periodic_needs_three_windows():
    with pytest.raises(DetectionError):
        periodic_findings(tables_from_rows({P: [F(1, 2), F(1, 2)]}), DetectConfig())


def test_sub_chains_are_dropped():
    chains = find_periodic_chains(["g", "g", "g", "g"], period_max=1, jitter=0, min_repetitions=2)
    assert chains == [(1, "g", (0, 1, 2, 3))]


def test_longest_chain_beats_closest_candidate():
    # closest to target 3 is index 4, but only 1 leads on to a third occurrence
    chains = find_periodic_chains(list("aabba"), period_max=3, jitter=2, min_repetitions=3)
    assert (3, "a", (0, 1, 4)) in chains
    assert chains == oracle_periods(list("aabba"), 3, 2, 3)


def test_equally_long_chains_prefer_closest_candidate():
    chains = find_periodic_chains(list("gggg"), period_max=2, jitter=1, min_repetitions=3)
    assert (2, "g", (0, 2, 3)) in chains
    assert (2, "g", (0, 1, 3)) not in chains
    assert oracle_periods(list("gggg"), 2, 1, 3) == chains


def test_periodic_chains_match_exhaustive_search():
    rng = random.Random(2024)
    for _ in range(200):
        n = rng.randint(1, 30)
        categories = [rng.choice(["g", "s", "h", None]) for _ in range(n)]
        period_max = rng.randint(1, 6)
        jitter = rng.randint(0, 2)
        reps = rng.randint(2, 4)
        assert find_periodic_chains(categories, period_max, jitter, reps) == oracle_periods(
            categories, period_max, jitter, reps)
