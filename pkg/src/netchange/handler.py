import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from pathlib import Path

from . import bootstrap, report, streamio, utils
from .bootstrap import RunConfig
from .detect import detect_emerging, detect_trends, periodic_findings
from .errors import EXIT_OK, exit_status
from .graph import Pattern, Snapshot
from .miner import FrequencyTable, evaluate_patterns, mine_frequent
from .windowing import TimeWindow, partition

log = logging.getLogger(__name__)

# Windows each detector needs before it can say anything
_MIN_WINDOWS = {"emerging": 2, "trends": 2, "periodic": 3}


class Handler:
    config: RunConfig
    stream_path: Path
    out_dir: Path
    snapshots: list[Snapshot]
    windows: list[TimeWindow]
    mined: list[FrequencyTable]
    evaluated: list[FrequencyTable]
    universe: list[Pattern]

    def __init__(self, config: RunConfig, stream_path: str | Path):

        # Store inputs
        self.config = config
        self.stream_path = Path(stream_path)
        self.out_dir = config.output_dir

        self.snapshots = []
        self.windows = []
        self.mined = []
        self.evaluated = []
        self.universe = []
        self.changes = []
        self.suppressed = []
        self.skipped: list[str] = []

    def _map(self, fn, items, *args) -> list:
        """fn(item, *args) for every item, across worker processes when configured."""
        if self.config.workers > 1 and len(items) > 1:
            with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
                return list(pool.map(fn, items, *(repeat(a) for a in args)))
        return [fn(item, *args) for item in items]

    def load(self) -> list[Snapshot]:
        self.snapshots = streamio.load_stream(self.stream_path)
        return self.snapshots

    def partition(self) -> list[TimeWindow]:
        if not self.snapshots:
            self.load()
        self.windows = partition(self.snapshots, self.config.partition)
        return self.windows

    def mine(self) -> list[FrequencyTable]:
        """Frequent patterns of every window, then the union re-evaluated in every window."""
        if not self.windows:
            self.partition()
        self.mined = self._map(mine_frequent, self.windows, self.config.mining)

        patterns = {}
        for table in self.mined:
            for pattern in table.patterns():
                patterns.setdefault(pattern.code, pattern)
        self.universe = [patterns[code] for code in sorted(patterns)]
        utils.append_log(f"Pattern universe holds {len(self.universe)} patterns over {len(self.windows)} windows")

        self.evaluated = self._map(_evaluate, list(zip(self.windows, self.mined)), self.universe)
        return self.evaluated

    def detect(self) -> list:
        if not self.evaluated:
            self.mine()
        config = self.config.detect
        changes, suppressed, skipped = [], [], []

        for name in self.config.detectors:
            if len(self.evaluated) < _MIN_WINDOWS[name]:
                utils.append_log(f"Skipping {name} detection: {len(self.evaluated)} windows, "
                                 f"needs {_MIN_WINDOWS[name]}")
                skipped.append(name)
                continue

            if name == "emerging":
                found = []
                for i in range(len(self.evaluated) - 1):
                    # Patterns frequent in either window of the pair
                    codes = set(self.mined[i].entries) | set(self.mined[i + 1].entries)
                    pair = (self.evaluated[i].restrict(codes), self.evaluated[i + 1].restrict(codes))
                    found.extend(detect_emerging(pair, config))
            elif name == "trends":
                found = detect_trends(self.evaluated, config)
            else:
                found, hidden = periodic_findings(self.evaluated, config)
                suppressed.extend(hidden)
                if hidden:
                    utils.append_log(f"Suppressed {len(hidden)} stable periodic changes")

            utils.append_log(f"{name} detection: {len(found)} changes")
            changes.extend(found)

        self.changes, self.suppressed, self.skipped = changes, suppressed, skipped
        return changes

    def run(self, command: str = "run") -> list[Path]:
        """Execute `command` and write its reports; returns the written paths."""
        written = []
        if command in ("partition", "mine", "run"):
            self.partition()
            written.append(report.write_windows(self.out_dir, self.windows))
        if command in ("mine", "run"):
            self.mine()
            written.append(report.write_patterns(self.out_dir, self.evaluated, self.mined))
        if command in ("detect", "run"):
            self.detect()
            written.append(report.write_changes(self.out_dir, self.changes))
            written.append(report.write_summary(
                self.out_dir, len(self.windows), len(self.universe), self.changes,
                suppressed_stable=len(self.suppressed), skipped=self.skipped,
            ))
        if command == "run":
            written.append(bootstrap.create_config_json(self.out_dir, self.config))
        return written


def _evaluate(mined: tuple[TimeWindow, FrequencyTable], patterns: list[Pattern]) -> FrequencyTable:
    window, table = mined
    return evaluate_patterns(patterns, window, known=table)


def run_pipeline(config: RunConfig, stream_path: str | Path, command: str = "run") -> int:
    """Run `command` end to end and return the exit status; failures are reported on stderr."""

    try:
        out_dir = bootstrap.init_output_dir(config.output_dir)

        # The CLI starts the log before reading the config; keep those lines
        if utils.log_path() != out_dir / bootstrap.LOG_FILE:
            bootstrap.create_log_file(out_dir)
        utils.append_log(f"Command '{command}' on {stream_path}")
        Handler(config, stream_path).run(command)
    except Exception as e:
        utils.append_log(f"Run failed: {e}")
        log.debug("Run failed", exc_info=True)
        print(f"netchange: {e}", file=sys.stderr)
        return exit_status(e)
    finally:
        utils.set_log_path(None)
    return EXIT_OK
