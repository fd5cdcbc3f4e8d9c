import logging
import sys
from pathlib import Path

from . import bootstrap, utils
from .errors import exit_status
from .handler import run_pipeline

log = logging.getLogger(__name__)


# Sets up debug tool to print log entries to console
def setup_logging(debug: bool) -> None:
    level = logging.DEBUG if debug else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stdout,
    )


def main(argv: list[str] | None = None) -> int:
    """Entry point for `python -m netchange` and the console script; returns the exit status."""

    # Parse arguments from CLI execution; usage errors exit here with status 1
    args = utils.parse_args(argv)

    setup_logging(args.debug)
    if args.debug:
        log.debug("Debugging enabled...")

    # Start the run log first so config loading and defaulting are recorded
    out_dir = Path(args.out).expanduser()
    try:
        bootstrap.init_output_dir(out_dir)
        bootstrap.create_log_file(out_dir)

        # Defaults < config file < explicit flags
        config = bootstrap.parse_config(args.config, args)
    except Exception as e:
        utils.append_log(f"Run failed: {e}")
        utils.set_log_path(None)
        print(f"netchange: {e}", file=sys.stderr)
        return exit_status(e)

    return run_pipeline(config, args.stream, args.command)


if __name__ == "__main__":
    sys.exit(main())
