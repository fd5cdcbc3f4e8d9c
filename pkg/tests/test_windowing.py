import warnings

import pytest

from netchange import windowing
from netchange.errors import PartitionError
from netchange.windowing import (
    CUT_DIVERGENCE, CUT_END, CUT_MAX_WINDOW, CUT_SIZE, LabelDistribution, PartitionConfig, adaptive_partition,
    fixed_partition, js_divergence, partition, snapshot_distribution,
)
from tools.synth_stream.generators import drift_free, label_shift

from conftest import snap


def _stream(n):
    return [snap(t, {0: "A", 1: "B"}, [(0, 1, "x")]) for t in range(n)]


def _concat(windows):
    return [s for w in windows for s in w.snapshots]


@pytest.mark.parametrize("n, size, sizes", [(10, 5, [5, 5]), (7, 3, [3, 3, 1]), (4, 10, [4])])
def test_fixed_partition_sizes(n, size, sizes):
    stream = _stream(n)
    windows = fixed_partition(stream, PartitionConfig(fixed_size=size))
    assert [len(w) for w in windows] == sizes
    assert [w.window_id for w in windows] == list(range(len(sizes)))
    assert _concat(windows) == stream
    assert windows[-1].cut_reason == CUT_END
    assert all(w.cut_reason == CUT_SIZE for w in windows[:-1])


def test_fixed_partition_of_long_stream():
    stream = _stream(1000)
    windows = fixed_partition(stream, PartitionConfig(fixed_size=50))
    assert len(windows) == 20
    assert {len(w) for w in windows} == {50}
    assert [w.start_index for w in windows] == list(range(0, 1000, 50))
    assert _concat(windows) == stream


def test_empty_stream_is_rejected():
    with pytest.raises(PartitionError):
        fixed_partition([], PartitionConfig())
    with pytest.raises(PartitionError):
        adaptive_partition([], PartitionConfig(mode="adaptive"))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"mode": "sliding"},
        {"fixed_size": 0},
        {"divergence_threshold": 0},
        {"divergence_threshold": 1.5},
        {"min_window": 10, "max_window": 5},
    ],
)
def test_partition_config_validation(kwargs):
    with pytest.raises(PartitionError):
        PartitionConfig(**kwargs)


def test_distribution_without_edges_puts_all_mass_on_nodes():
    d = snapshot_distribution(snap(0, {0: "A", 1: "A", 2: "B", 3: "B"}))
    assert d.masses == pytest.approx({("node", "A"): 0.5, ("node", "B"): 0.5})


def test_distribution_splits_mass_between_nodes_and_edges():
    d = snapshot_distribution(snap(0, {0: "A", 1: "A", 2: "B"}, [(0, 1, "x"), (1, 2, "x")]))
    assert d.masses == pytest.approx({("node", "A"): 1 / 3, ("node", "B"): 1 / 6, ("edge", "x"): 0.5})
    assert sum(d.masses.values()) == pytest.approx(1.0, abs=1e-9)


def test_empty_snapshot_has_empty_distribution():
    assert snapshot_distribution(snap(0, {})).empty


def test_identical_label_multisets_have_zero_divergence():
    a = snap(0, {0: "A", 1: "B", 2: "B"}, [(0, 1, "x"), (1, 2, "y")])
    b = snap(1, {5: "B", 6: "A", 7: "B"}, [(5, 6, "y"), (6, 7, "x")])
    assert js_divergence(snapshot_distribution(a), snapshot_distribution(b)) == pytest.approx(0.0, abs=1e-12)


def test_rounding_below_zero_counts_as_no_divergence(monkeypatch):
    p = LabelDistribution({("node", "A"): 1 / 3, ("node", "B"): 2 / 3})
    monkeypatch.setattr(windowing, "jensenshannon", lambda *args, **kwargs: float("nan"))
    assert js_divergence(p, p) == 0.0


def test_many_labels_give_finite_divergence():
    masses = {("node", str(i)): 1 / 7 for i in range(7)}
    p = LabelDistribution(masses)
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        assert js_divergence(p, LabelDistribution(dict(masses))) == pytest.approx(0.0, abs=1e-12)


def test_disjoint_distributions_have_divergence_one():
    p = LabelDistribution({("node", "A"): 1.0})
    q = LabelDistribution({("node", "B"): 1.0})
    assert js_divergence(p, q) == pytest.approx(1.0)


def test_divergence_ignores_label_names():
    a = snapshot_distribution(snap(0, {0: "A", 1: "B", 2: "B"}, [(0, 1, "x")]))
    b = snapshot_distribution(snap(0, {0: "A", 1: "A", 2: "B"}, [(0, 1, "x")]))
    renamed_a = snapshot_distribution(snap(0, {0: "P", 1: "Q", 2: "Q"}, [(0, 1, "z")]))
    renamed_b = snapshot_distribution(snap(0, {0: "P", 1: "P", 2: "Q"}, [(0, 1, "z")]))
    assert js_divergence(a, b) == pytest.approx(js_divergence(renamed_a, renamed_b))


def test_adaptive_single_snapshot():
    windows = adaptive_partition(_stream(1), PartitionConfig(mode="adaptive"))
    assert [len(w) for w in windows] == [1]


def test_adaptive_identical_snapshots_are_capped_by_max_window():
    stream = drift_free(seed=3, num_snapshots=25)
    windows = adaptive_partition(stream, PartitionConfig(mode="adaptive", min_window=2, max_window=10))
    assert [len(w) for w in windows] == [10, 10, 5]
    assert [w.cut_reason for w in windows] == [CUT_MAX_WINDOW, CUT_MAX_WINDOW, CUT_END]
    assert _concat(windows) == stream


def test_adaptive_cuts_at_label_shift():
    config = PartitionConfig(mode="adaptive", divergence_threshold=0.1, min_window=5, max_window=100)
    stream = label_shift(seed=0)
    windows = partition(stream, config)
    assert len(windows) == 2
    assert abs(windows[1].start_index - 50) <= 2
    assert windows[0].cut_reason == CUT_DIVERGENCE
    assert _concat(windows) == stream


def test_adaptive_cut_position_is_stable_across_seeds():
    config = PartitionConfig(mode="adaptive", divergence_threshold=0.1, min_window=5, max_window=100)
    hits = 0
    for seed in range(20):
        windows = adaptive_partition(label_shift(seed=seed), config)
        if len(windows) == 2 and abs(windows[1].start_index - 50) <= 2:
            hits += 1
    assert hits >= 18


def test_adaptive_window_lengths_respect_bounds():
    config = PartitionConfig(mode="adaptive", divergence_threshold=0.01, min_window=4, max_window=7)
    stream = label_shift(seed=5, num_snapshots=60, before=0.5, after=0.5)
    windows = adaptive_partition(stream, config)
    for w in windows[:-1]:
        assert 4 <= len(w) <= 7
    assert len(windows[-1]) <= 7
    assert _concat(windows) == stream
