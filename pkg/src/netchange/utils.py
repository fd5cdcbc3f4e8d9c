from __future__ import annotations

from fractions import Fraction
from pathlib import Path
import time
import argparse
import logging
import sys

from .errors import EXIT_USAGE

log = logging.getLogger(__name__)
_LOG_PATH: Path | None = None

SUBCOMMANDS = ("partition", "mine", "detect", "run")


def _utc_time_part() -> str:
    """Return the current UTC time as HH:MM:SS."""

    return time.strftime("%H:%M:%S", time.gmtime())


def set_log_path(log_path: str | Path | None) -> None:
    """Set the run log file that `append_log` appends to; None disables the file."""
    global _LOG_PATH
    _LOG_PATH = None if log_path is None else Path(log_path)


def log_path() -> Path | None:
    """The run log file `append_log` currently writes to."""
    return _LOG_PATH


def append_log(line: str) -> None:
    """Append a line to the run log with a UTC time prefix.

    The line always goes to the `logging` module at DEBUG level; it is written to the
    run log file only once `set_log_path` has been called.

    Args:
        line: Message to append (a trailing newline is added automatically).
    """

    # If debug mode enabled, print all logged lines to console
    log.debug(line)

    if _LOG_PATH is None:
        return

    # Open file and append line
    with _LOG_PATH.open("a", encoding="utf-8") as f:
        f.write(f"{_utc_time_part()}: {line.rstrip()}\n")


def make_file(out_dir: str | Path, filename: str) -> Path:
    """Create `filename` under `out_dir`, creating the directory if needed.

    Args:
        out_dir: Directory for runtime output
        filename: Name of file with suffix
    """

    # Make directory if it doesn't already exist
    out_path = Path(out_dir).expanduser()
    out_path.mkdir(parents=True, exist_ok=True)

    # Set file path with directory/filename and create file
    out_file = out_path / filename
    out_file.touch(exist_ok=True)

    return out_file


def as_fraction(value: object) -> Fraction:
    """Exact rational from an int, Fraction, decimal/rational string or float (via its shortest repr)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the configuration/usage status instead of argparse's 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_flags(p: argparse.ArgumentParser, default_data_dir: Path) -> None:
    """Flags shared by every subcommand; all default to None so the config file keeps precedence."""

    p.add_argument("stream", help="Path to the snapshot stream file")

    # Debugging mode, prints log entries to console
    p.add_argument("--debug", action="store_true", help="Enable debug logging")

    # Path to TOML configuration file
    p.add_argument(
        "-c",
        "--config",
        default="default_config.toml",
        help="Path to TOML config, or a filename under configs/ (default: default_config.toml)",
    )

    # Output directory for reports and the run log
    p.add_argument(
        "-o",
        "--out",
        default=default_data_dir,
        help="Directory where reports and the run log are written (default: ROOT/data)",
    )

    partition = p.add_argument_group("partitioning")
    partition.add_argument("--window-size", type=int, help="Snapshots per window in fixed mode")
    partition.add_argument("--adaptive", action=argparse.BooleanOptionalAction, default=None,
                           help="Use adaptive partitioning (--no-adaptive forces fixed windows)")
    partition.add_argument("--tau", type=str, help="Jensen-Shannon divergence threshold for adaptive cuts")
    partition.add_argument("--min-window", type=int, help="Smallest window a divergence cut may close")
    partition.add_argument("--max-window", type=int, help="Window length that forces a cut")

    mining = p.add_argument_group("mining")
    mining.add_argument("--alpha", type=str, help="Minimum relative frequency (strict)")
    mining.add_argument("--max-edges", type=int, help="Largest pattern size in edges")
    mining.add_argument("--workers", type=int, help="Processes used to mine windows in parallel")

    detect = p.add_argument_group("detection")
    detect.add_argument("--beta", type=str, help="Growth-rate threshold for emerging changes")
    detect.add_argument("--trend-mode", choices=("strict", "lambda"), help="Trend test")
    detect.add_argument("--trend-epsilon", type=str, help="Dead band around the mean frequency in lambda mode")
    detect.add_argument("--period-max", type=int, help="Largest period searched")
    detect.add_argument("--jitter", type=int, help="Tolerance on periodic occurrence positions")
    detect.add_argument("--min-repetitions", type=int, help="Occurrences needed for a periodic change")
    detect.add_argument("--theta-bins", type=str, help="Growth-rate categories, e.g. '<1/2:shrinking,<=2:stable,<=inf:growing'")
    detect.add_argument("--detectors", type=str, help="Comma-separated subset of emerging,trends,periodic")
    detect.add_argument("--include-stable", action=argparse.BooleanOptionalAction, default=None,
                        help="Report stable periodic changes")
    detect.add_argument("--vanishing", action=argparse.BooleanOptionalAction, default=None,
                        help="Also report vanishing patterns")


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command-line arguments for a netchange run."""

    p = _ArgumentParser(
        prog="netchange",
        description="Detect emerging, trend-based and periodic changes in evolving networks",
    )

    # Get repository root
    ROOT = Path(__file__).resolve().parents[2]
    default_data_dir = ROOT / "data"

    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    helps = {
        "partition": "Split the stream into time windows (windows.csv)",
        "mine": "Partition and mine frequent patterns (windows.csv, patterns.csv)",
        "detect": "Detect changes (changes.jsonl, summary.txt)",
        "run": "Full pipeline, every report plus configuration.json",
    }
    for name in SUBCOMMANDS:
        _add_run_flags(sub.add_parser(name, help=helps[name]), default_data_dir)

    return p.parse_args(argv)
