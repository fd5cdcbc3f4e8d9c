import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from argparse import Namespace
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import utils
from .detect import DetectConfig, format_theta_bins, parse_theta_bins
from .errors import ConfigError
from .miner import MiningConfig
from .windowing import ADAPTIVE, FIXED, PartitionConfig

CONFIG_JSON = "configuration.json"
LOG_FILE = "netchange.log"

DETECTORS = ("emerging", "trends", "periodic")

# Default parameters, used for missing or invalid configuration keys
_DEFAULT_PARTITION: dict[str, object] = {
    "mode": FIXED,
    "window_size": 10,
    "tau": 0.1,
    "min_window": 5,
    "max_window": 100,
}

_DEFAULT_MINING: dict[str, object] = {
    "alpha": Fraction(3, 10),
    "max_edges": 3,
}

_DEFAULT_DETECT: dict[str, object] = {
    "beta": Fraction(2),
    "trend_mode": "strict",
    "trend_epsilon": Fraction(0),
    "period_max": 6,
    "jitter": 0,
    "min_repetitions": 3,
    "theta_bins": "",
    "detectors": ",".join(DETECTORS),
    "include_stable": False,
    "vanishing": False,
}

_DEFAULT_RUN: dict[str, object] = {
    "workers": 1,
}

# CLI flag -> (section, key); flags left at None keep the config file value
_FLAG_KEYS: dict[str, tuple[str, str]] = {
    "window_size": ("partition", "window_size"),
    "tau": ("partition", "tau"),
    "min_window": ("partition", "min_window"),
    "max_window": ("partition", "max_window"),
    "alpha": ("mining", "alpha"),
    "max_edges": ("mining", "max_edges"),
    "beta": ("detect", "beta"),
    "trend_mode": ("detect", "trend_mode"),
    "trend_epsilon": ("detect", "trend_epsilon"),
    "period_max": ("detect", "period_max"),
    "jitter": ("detect", "jitter"),
    "min_repetitions": ("detect", "min_repetitions"),
    "theta_bins": ("detect", "theta_bins"),
    "detectors": ("detect", "detectors"),
    "include_stable": ("detect", "include_stable"),
    "vanishing": ("detect", "vanishing"),
    "workers": ("run", "workers"),
}


@dataclass(frozen=True)
class RunConfig:
    partition: PartitionConfig = field(default_factory=PartitionConfig)
    mining: MiningConfig = field(default_factory=MiningConfig)
    detect: DetectConfig = field(default_factory=DetectConfig)
    detectors: tuple[str, ...] = DETECTORS
    output_dir: Path = Path("data")
    workers: int = 1

    def __post_init__(self):
        unknown = set(self.detectors) - set(DETECTORS)
        if unknown:
            raise ConfigError(f"unknown detectors {sorted(unknown)}; choose from {', '.join(DETECTORS)}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    def to_dict(self) -> dict:
        """Resolved settings as written to configuration.json (the output directory is left out)."""
        p, m, d = self.partition, self.mining, self.detect
        return {
            "partition": {
                "mode": p.mode, "window_size": p.fixed_size, "tau": p.divergence_threshold,
                "min_window": p.min_window, "max_window": p.max_window,
            },
            "mining": {"alpha": str(m.alpha), "max_edges": m.max_edges},
            "detect": {
                "beta": str(d.beta), "trend_mode": d.trend_mode, "trend_epsilon": str(d.trend_epsilon),
                "period_max": d.period_max, "jitter": d.jitter, "min_repetitions": d.min_repetitions,
                "theta_bins": format_theta_bins(d.theta_bins), "detectors": list(self.detectors),
                "include_stable": d.include_stable, "vanishing": d.report_vanishing,
            },
            "run": {"workers": self.workers},
        }


def _coerce_int(val: object) -> int | None:
    """If input is not an integer, tries to make it one; None when that fails."""

    if isinstance(val, bool):
        return None
    if isinstance(val, int):
        return val
    if isinstance(val, float) and val.is_integer():
        return int(val)
    if isinstance(val, str):
        s = val.strip()
        try:
            return int(s, 10) if s else None
        except ValueError:
            return None
    return None


def _coerce_rational(val: object) -> Fraction | None:
    try:
        return utils.as_fraction(val)
    except (TypeError, ValueError, ZeroDivisionError):
        return None


def _set_default(dst: dict, key: str, default: object, why: str) -> None:
    """Sets input key to default value."""

    utils.append_log(f"Config '{key}' invalid ({why}); using default {default!r}")
    dst[key] = default


def _clamp_int(dst: dict, key: str, default: int, lo: int, hi: int) -> None:
    """Forces an integer key into [lo, hi]; non-integers fall back to the default."""

    raw = dst.get(key, None)
    n = _coerce_int(raw)
    if n is None:
        _set_default(dst, key, default, f"not an int: {raw!r}")
        return
    if n < lo or n > hi:
        clamped = min(max(n, lo), hi)
        utils.append_log(f"Config '{key}' = {n} outside [{lo}, {hi}]; clamped to {clamped}")
        n = clamped
    dst[key] = n


def _check_rational(dst: dict, key: str, default: Fraction, lo: Fraction, hi: Fraction | None = None) -> None:
    """Parses a rational key exactly; out-of-range or unreadable values fall back to the default."""

    raw = dst.get(key, None)
    q = _coerce_rational(raw)
    if q is None:
        _set_default(dst, key, default, f"not a number: {raw!r}")
        return
    if q < lo or (hi is not None and q > hi):
        _set_default(dst, key, default, f"{q} outside [{lo}, {'inf' if hi is None else hi}]")
        return
    dst[key] = q


def _enum_str(dst: dict, key: str, default: str, allowed: set[str]) -> None:
    """Checks whether input string matches allowed values."""

    raw = dst.get(key, None)
    s = raw.strip().lower() if isinstance(raw, str) else None
    if s not in allowed:
        _set_default(dst, key, default, f"must be one of {sorted(allowed)}; got {raw!r}")
        return
    dst[key] = s


def _check_bool(dst: dict, key: str, default: bool) -> None:
    if not isinstance(dst.get(key), bool):
        _set_default(dst, key, default, f"not a boolean: {dst.get(key)!r}")


def _load_config(config: str | Path) -> dict:
    """Load a TOML configuration, by path or by filename under ROOT/configs.

    Falls back to default_config.toml if the requested config can't be loaded.
    """

    # Establish configuration path
    ROOT = Path(__file__).resolve().parents[2]
    configs_dir = ROOT / "configs"
    literal = Path(config).expanduser()
    primary_path = literal if literal.is_file() else configs_dir / Path(config)
    fallback_path = configs_dir / "default_config.toml"

    def _try_load(path: Path) -> dict:
        with path.open("rb") as f:
            return tomllib.load(f)

    try:
        cfg = _try_load(primary_path)

    # If it fails, fallback to default_config.toml
    except (FileNotFoundError, tomllib.TOMLDecodeError, OSError) as e1:
        utils.append_log(f"Failed to load configuration file at {primary_path}: {e1}")

        # If primary already is the fallback, don't loop
        if primary_path.resolve() == fallback_path.resolve():
            raise ConfigError(f"cannot load configuration {primary_path}: {e1}") from e1

        utils.append_log(f"Falling back to default configuration at {fallback_path}")
        try:
            cfg = _try_load(fallback_path)
        except (FileNotFoundError, tomllib.TOMLDecodeError, OSError) as e2:
            utils.append_log(f"Failed to load fallback configuration at {fallback_path}: {e2}")
            raise ConfigError(f"failed to load config {primary_path} and fallback {fallback_path}") from e2
        else:
            utils.append_log(f"Fallback configuration file loaded: {fallback_path}")
            return cfg
    else:
        utils.append_log(f"Configuration file loaded: {primary_path}")
        return cfg


def _section(cfg: dict, name: str, defaults: dict) -> dict:
    raw = cfg.get(name, {})
    if not isinstance(raw, dict):
        utils.append_log(f"Config section [{name}] is not a table; using defaults")
        raw = {}
    section = dict(raw)
    for k in sorted(set(section) - set(defaults)):
        utils.append_log(f"Config key '{name}.{k}' is not recognized; ignored")
        del section[k]

    # Fill missing keys with defaults
    for k, v in defaults.items():
        section.setdefault(k, v)
    return section


def _validate_file_values(partition: dict, mining: dict, detect: dict, run: dict) -> None:
    _enum_str(partition, "mode", _DEFAULT_PARTITION["mode"], {FIXED, ADAPTIVE})
    _clamp_int(partition, "window_size", _DEFAULT_PARTITION["window_size"], 1, 1_000_000)
    _check_rational(partition, "tau", Fraction(str(_DEFAULT_PARTITION["tau"])), Fraction(0), Fraction(1))
    if partition["tau"] == 0:
        _set_default(partition, "tau", _DEFAULT_PARTITION["tau"], "must be > 0")
    partition["tau"] = float(partition["tau"])
    _clamp_int(partition, "min_window", _DEFAULT_PARTITION["min_window"], 1, 1_000_000)
    _clamp_int(partition, "max_window", _DEFAULT_PARTITION["max_window"], 1, 1_000_000)

    _check_rational(mining, "alpha", _DEFAULT_MINING["alpha"], Fraction(0), Fraction(1))
    _clamp_int(mining, "max_edges", _DEFAULT_MINING["max_edges"], 1, 64)

    _check_rational(detect, "beta", _DEFAULT_DETECT["beta"], Fraction(1))
    if detect["beta"] == 1:
        _set_default(detect, "beta", _DEFAULT_DETECT["beta"], "must be > 1")
    _enum_str(detect, "trend_mode", _DEFAULT_DETECT["trend_mode"], {"strict", "lambda"})
    _check_rational(detect, "trend_epsilon", _DEFAULT_DETECT["trend_epsilon"], Fraction(0))
    _clamp_int(detect, "period_max", _DEFAULT_DETECT["period_max"], 1, 10_000)
    _clamp_int(detect, "jitter", _DEFAULT_DETECT["jitter"], 0, 10_000)
    _clamp_int(detect, "min_repetitions", _DEFAULT_DETECT["min_repetitions"], 2, 10_000)
    for key in ("theta_bins", "detectors"):
        if not isinstance(detect[key], str):
            _set_default(detect, key, _DEFAULT_DETECT[key], f"not a string: {detect[key]!r}")
    _check_bool(detect, "include_stable", _DEFAULT_DETECT["include_stable"])
    _check_bool(detect, "vanishing", _DEFAULT_DETECT["vanishing"])

    _clamp_int(run, "workers", _DEFAULT_RUN["workers"], 1, 256)


def _apply_flags(sections: dict[str, dict], args: Namespace | None) -> None:
    """Explicit CLI flags override config file values; they are validated by the config types, not defaulted."""
    if args is None:
        return
    for flag, (section, key) in _FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        if key in ("alpha", "beta", "trend_epsilon", "tau"):
            q = _coerce_rational(value)
            if q is None:
                raise ConfigError(f"--{flag.replace('_', '-')}: {value!r} is not a number")
            value = float(q) if key == "tau" else q
        sections[section][key] = value
        utils.append_log(f"Flag --{flag.replace('_', '-')} overrides {section}.{key} = {value!r}")
    adaptive = getattr(args, "adaptive", None)
    if adaptive is not None:
        sections["partition"]["mode"] = ADAPTIVE if adaptive else FIXED
        utils.append_log(f"Flag --{'' if adaptive else 'no-'}adaptive overrides partition.mode")


def _parse_detectors(text: str) -> tuple[str, ...]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    unknown = sorted(set(names) - set(DETECTORS))
    if unknown:
        raise ConfigError(f"unknown detectors {unknown}; choose from {', '.join(DETECTORS)}")
    # Keep the canonical order regardless of how they were listed
    return tuple(n for n in DETECTORS if n in names)


def parse_config(config: str | Path = "default_config.toml", args: Namespace | None = None) -> RunConfig:
    """Resolve defaults < config file < CLI flags into a validated RunConfig."""

    cfg = _load_config(config)
    sections = {
        "partition": _section(cfg, "partition", _DEFAULT_PARTITION),
        "mining": _section(cfg, "mining", _DEFAULT_MINING),
        "detect": _section(cfg, "detect", _DEFAULT_DETECT),
        "run": _section(cfg, "run", _DEFAULT_RUN),
    }
    _validate_file_values(sections["partition"], sections["mining"], sections["detect"], sections["run"])
    _apply_flags(sections, args)

    partition, mining, detect, run = (sections[k] for k in ("partition", "mining", "detect", "run"))
    theta_text = detect["theta_bins"].strip()
    run_config = RunConfig(
        partition=PartitionConfig(
            mode=partition["mode"],
            fixed_size=partition["window_size"],
            divergence_threshold=partition["tau"],
            min_window=partition["min_window"],
            max_window=partition["max_window"],
        ),
        mining=MiningConfig(alpha=mining["alpha"], max_edges=mining["max_edges"]),
        detect=DetectConfig(
            beta=detect["beta"],
            trend_mode=detect["trend_mode"],
            trend_epsilon=detect["trend_epsilon"],
            period_max=detect["period_max"],
            jitter=detect["jitter"],
            min_repetitions=detect["min_repetitions"],
            theta_bins=parse_theta_bins(theta_text) if theta_text else None,
            include_stable=detect["include_stable"],
            report_vanishing=detect["vanishing"],
        ),
        detectors=_parse_detectors(detect["detectors"]),
        output_dir=Path(getattr(args, "out", None) or "data").expanduser(),
        workers=run["workers"],
    )

    utils.append_log(f"Configuration parsed - {json.dumps(run_config.to_dict(), sort_keys=True)}")
    return run_config


def init_output_dir(out_dir: str | Path) -> Path:
    """Create the directory that receives reports and the run log."""

    path = Path(out_dir).expanduser()
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        utils.append_log(f"Failed to create output directory {path}: {e}")
        raise
    return path


def create_log_file(out_dir: str | Path) -> Path:
    """Start a fresh run log under `out_dir` and write an init line."""

    log_path = Path(out_dir) / LOG_FILE
    log_path.unlink(missing_ok=True)
    log_path = utils.make_file(out_dir, LOG_FILE)
    utils.set_log_path(log_path)

    utils.append_log("netchange run log initialized")
    utils.append_log(f"Path to log: {log_path}")
    return log_path


def create_config_json(out_dir: str | Path, run_config: RunConfig) -> Path:
    """Write the resolved configuration to configuration.json."""

    json_path = Path(out_dir) / CONFIG_JSON
    try:
        with json_path.open("w", encoding="utf-8") as f:
            json.dump(run_config.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as e:
        utils.append_log(f"Failed to write configuration.json at {json_path}: {e}")
        raise
    else:
        utils.append_log(f"Wrote configuration to {json_path}")
    return json_path
