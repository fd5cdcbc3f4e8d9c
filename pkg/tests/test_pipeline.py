import csv
import json
import os
import time
from fractions import Fraction
from pathlib import Path

import pytest

from netchange import report
from netchange.bootstrap import RunConfig
from netchange.detect import DetectConfig
from netchange.errors import EXIT_OK, EXIT_PARSE, EXIT_USAGE
from netchange.handler import Handler, run_pipeline
from netchange.main import main
from netchange.miner import MiningConfig
from netchange.streamio import write_stream
from netchange.windowing import PartitionConfig
from tools.synth_stream.generators import drift_free, emerging, label_shift, scale

REPORTS = ("windows.csv", "patterns.csv", "changes.jsonl", "summary.txt", "configuration.json")


def _config(out: Path, **detect) -> RunConfig:
    return RunConfig(
        partition=PartitionConfig(fixed_size=10),
        mining=MiningConfig(alpha=Fraction(3, 10), max_edges=3),
        detect=DetectConfig(**detect),
        output_dir=out,
    )


def _records(out: Path) -> list[dict]:
    text = (out / "changes.jsonl").read_text(encoding="utf-8")
    return [json.loads(line) for line in text.splitlines()]


def _summary(out: Path) -> dict[str, str]:
    lines = (out / "summary.txt").read_text(encoding="utf-8").splitlines()
    return dict(line.split(": ", 1) for line in lines if not line.startswith("skipped"))


def test_drift_free_stream_reports_only_suppressed_stable(tmp_path):
    stream = write_stream(drift_free(seed=1), tmp_path / "drift.tsv")
    out = tmp_path / "out"
    assert run_pipeline(_config(out), stream) == EXIT_OK
    assert _records(out) == []
    summary = _summary(out)
    assert summary["windows"] == "6"
    assert summary["emerging"] == summary["trend"].split()[0] == summary["periodic"] == "0"
    assert int(summary["suppressed stable periodic"]) > 0


def test_planted_emerging_pattern(tmp_path):
    stream = write_stream(emerging(seed=2), tmp_path / "emerging.tsv")
    out = tmp_path / "out"
    assert run_pipeline(_config(out, beta=3), stream) == EXIT_OK
    found = [r for r in _records(out) if r["type"] == "emerging"]
    assert len(found) == 1
    record = found[0]
    assert record["pattern"] == "(0,1,C,z,D)"
    assert record["windows"] == [0, 1]
    assert record["growth_rate"] == "9" and record["growth_rate_float"] == 9.0
    assert "skipped detector: periodic" in (out / "summary.txt").read_text(encoding="utf-8")
    assert report.revalidate_changes(out / "changes.jsonl", out / "patterns.csv", DetectConfig(beta=3)) == []


def test_growth_rate_equal_to_beta_is_not_emerging(tmp_path):
    stream = write_stream(emerging(seed=2, planted_earlier=2, planted_later=6), tmp_path / "boundary.tsv")
    out = tmp_path / "out"
    assert run_pipeline(_config(out, beta=3, report_vanishing=True), stream) == EXIT_OK
    assert "(0,1,C,z,D)" in (out / "patterns.csv").read_text(encoding="utf-8")
    assert [r for r in _records(out) if r["type"] in ("emerging", "vanishing")] == []


def test_report_files_and_columns(tmp_path):
    stream = write_stream(emerging(seed=3), tmp_path / "emerging.tsv")
    out = tmp_path / "out"
    assert run_pipeline(_config(out, beta=3), stream) == EXIT_OK
    for name in REPORTS:
        assert (out / name).is_file()
    assert (out / "netchange.log").is_file()

    with (out / "windows.csv").open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert [(r["window_id"], r["start"], r["end"], r["size"], r["cut_reason"]) for r in rows] == [
        ("0", "0", "9", "10", "size"), ("1", "10", "19", "10", "end"),
    ]

    with (out / "patterns.csv").open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    planted = {r["window_id"]: r for r in rows if r["code"] == "(0,1,C,z,D)"}
    assert (planted["0"]["numerator"], planted["0"]["denominator"], planted["0"]["frequent"]) == ("1", "10", "0")
    assert (planted["1"]["numerator"], planted["1"]["denominator"], planted["1"]["frequent"]) == ("9", "10", "1")

    keys = {"type", "pattern", "windows", "growth_rate", "growth_rate_float", "sign", "period", "category", "global"}
    for record in _records(out):
        assert keys <= set(record)


def test_same_run_twice_gives_identical_reports(tmp_path):
    stream = write_stream(emerging(seed=5), tmp_path / "emerging.tsv")
    first, second = tmp_path / "a", tmp_path / "b"
    assert run_pipeline(_config(first, beta=3), stream) == EXIT_OK
    assert run_pipeline(_config(second, beta=3), stream) == EXIT_OK
    for name in REPORTS:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_revalidation_catches_tampered_records(tmp_path):
    stream = write_stream(emerging(seed=2), tmp_path / "emerging.tsv")
    out = tmp_path / "out"
    run_pipeline(_config(out, beta=3), stream)
    records = _records(out)
    for record in records:
        if record["type"] == "emerging":
            record["growth_rate"] = "10"
    (out / "changes.jsonl").write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    problems = report.revalidate_changes(out / "changes.jsonl", out / "patterns.csv", DetectConfig(beta=3))
    assert len(problems) == 1 and "emerging" in problems[0]


def test_handler_steps_share_one_pattern_universe(tmp_path):
    stream = write_stream(emerging(seed=6), tmp_path / "emerging.tsv")
    handler = Handler(_config(tmp_path), stream)
    evaluated = handler.mine()
    codes = [p.code for p in handler.universe]
    assert codes == sorted(codes)
    assert all(table.codes() == codes for table in evaluated)
    for mined, full in zip(handler.mined, evaluated):
        for code, entry in mined.entries.items():
            assert full.entries[code].frequency == entry.frequency


def test_periodic_and_trend_records_revalidate(tmp_path):
    # 60 snapshots in windows of 10; the planted edge alternates between rare and common windows
    snapshots = []
    counts = [1, 4, 1, 4, 1, 4]
    background = drift_free(seed=9, num_snapshots=60)
    for t, snapshot in enumerate(background):
        nodes, edges = list(snapshot.nodes), list(snapshot.edges)
        if t % 10 < counts[t // 10]:
            nodes += [(0, "C"), (1, "D")]
            edges += [(0, 1, "z")]
        snapshots.append(type(snapshot).build(t, nodes, edges))
    stream = write_stream(snapshots, tmp_path / "periodic.tsv")
    out = tmp_path / "out"
    detect = dict(beta=3, period_max=3, min_repetitions=3)
    assert run_pipeline(_config(out, **detect), stream) == EXIT_OK
    records = _records(out)
    periodic = [r for r in records if r["type"] == "periodic" and r["pattern"] == "(0,1,C,z,D)"]
    assert {(r["period"], r["category"], tuple(r["occurrences"])) for r in periodic} == {(2, "growing", (0, 2, 4))}
    assert periodic[0]["exact"] is True and periodic[0]["growth_rates"] == ["4", "4", "4"]
    assert any(r["type"] == "trend" for r in records)
    assert report.revalidate_changes(out / "changes.jsonl", out / "patterns.csv", DetectConfig(**detect)) == []


def test_parallel_mining_matches_serial(tmp_path):
    stream = write_stream(emerging(seed=7), tmp_path / "emerging.tsv")
    serial, parallel = tmp_path / "serial", tmp_path / "parallel"
    assert run_pipeline(_config(serial, beta=3), stream) == EXIT_OK
    config = _config(parallel, beta=3)
    config = RunConfig(config.partition, config.mining, config.detect, config.detectors, parallel, workers=2)
    assert run_pipeline(config, stream) == EXIT_OK
    for name in ("patterns.csv", "changes.jsonl"):
        assert (serial / name).read_bytes() == (parallel / name).read_bytes()


def test_cli_subcommands_write_their_reports(tmp_path):
    stream = write_stream(label_shift(seed=0), tmp_path / "shift.tsv")
    for command, expected in [
        ("partition", {"windows.csv"}),
        ("mine", {"windows.csv", "patterns.csv"}),
        ("detect", {"changes.jsonl", "summary.txt"}),
        ("run", set(REPORTS)),
    ]:
        out = tmp_path / command
        assert main([command, str(stream), "-o", str(out), "--adaptive", "--tau", "0.1", "--max-edges", "1"]) == EXIT_OK
        assert {p.name for p in out.iterdir()} - {"netchange.log"} == expected
    rows = (tmp_path / "run" / "windows.csv").read_text(encoding="utf-8").splitlines()
    assert len(rows) == 3


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.tsv"
    bad.write_text("# netchange-stream v1\n0\t1\tA\t1\tA\tx\n", encoding="utf-8")
    assert main(["run", str(bad), "-o", str(tmp_path / "o1")]) == EXIT_PARSE
    assert main(["run", str(tmp_path / "missing.tsv"), "-o", str(tmp_path / "o2")]) == EXIT_PARSE
    undecodable = tmp_path / "undecodable.tsv"
    undecodable.write_bytes(b"# netchange-stream v1\n0\t1\tA\xff\t2\tB\tx\n")
    assert main(["run", str(undecodable), "-o", str(tmp_path / "o4")]) == EXIT_PARSE
    assert "[stream] line 2:" in capsys.readouterr().err
    assert main(["run", str(bad), "--alpha", "abc", "-o", str(tmp_path / "o3")]) == EXIT_USAGE
    with pytest.raises(SystemExit) as excinfo:
        main(["run"])
    assert excinfo.value.code == EXIT_USAGE


def test_config_file_problems_reach_the_run_log(tmp_path):
    stream = write_stream(drift_free(seed=1, num_snapshots=20), tmp_path / "stream.tsv")
    typo = tmp_path / "typo.toml"
    typo.write_text("[mining]\nalpha = \"abc\"\n", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["partition", str(stream), "-c", str(typo), "-o", str(out)]) == EXIT_OK
    text = (out / "netchange.log").read_text(encoding="utf-8")
    assert "Config 'alpha' invalid" in text
    assert f"Configuration file loaded: {typo}" in text
    assert "Command 'partition'" in text


@pytest.mark.slow
def test_scale_run_is_deterministic(tmp_path):
    stream = write_stream(scale(seed=0), tmp_path / "scale.tsv")
    outputs = []
    elapsed = []
    for name in ("a", "b"):
        out = tmp_path / name
        config = RunConfig(
            partition=PartitionConfig(fixed_size=10),
            mining=MiningConfig(alpha=Fraction(3, 10), max_edges=4),
            output_dir=out,
            workers=8,
        )
        started = time.perf_counter()
        assert run_pipeline(config, stream) == EXIT_OK
        elapsed.append(time.perf_counter() - started)
        outputs.append({n: (out / n).read_bytes() for n in REPORTS})
    assert outputs[0] == outputs[1]
    if (os.cpu_count() or 1) >= 8:
        assert max(elapsed) < 60
