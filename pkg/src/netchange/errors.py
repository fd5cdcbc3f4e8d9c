"""Module-tagged exceptions and the exit codes the CLI maps them to."""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INTERNAL = 3


class NetchangeError(Exception):
    """Base error; renders as "[module] message"."""

    module = "netchange"
    exit_code = EXIT_INTERNAL

    def __init__(self, message: str, module: str | None = None):
        super().__init__(message)
        self.message = message
        if module is not None:
            self.module = module

    def __str__(self) -> str:
        return f"[{self.module}] {self.message}"


class ConfigError(NetchangeError, ValueError):
    module = "config"
    exit_code = EXIT_USAGE


class StreamFormatError(NetchangeError, ValueError):
    """Raised by the StreamFile reader; carries the offending line number when known."""

    module = "stream"
    exit_code = EXIT_PARSE

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class PatternError(NetchangeError, ValueError):
    module = "graph"


class PartitionError(NetchangeError, ValueError):
    module = "windowing"
    exit_code = EXIT_USAGE


class DetectionError(NetchangeError, ValueError):
    module = "detect"


class OracleLimitError(NetchangeError, ValueError):
    module = "oracle"


class InvariantError(NetchangeError):
    """An internal consistency check failed."""


def exit_status(exc: BaseException) -> int:
    """Exit code for an exception escaping a run: tagged errors carry their own, I/O failures count as parse errors."""
    if isinstance(exc, NetchangeError):
        return exc.exit_code
    if isinstance(exc, OSError):
        return EXIT_PARSE
    return EXIT_INTERNAL
