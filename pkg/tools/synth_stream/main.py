import argparse
import sys

from netchange.streamio import write_stream

from .generators import GENERATORS


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(
        prog="python -m tools.synth_stream",
        description="Write a seeded synthetic snapshot stream",
    )
    p.add_argument("kind", choices=sorted(GENERATORS), help="Kind of stream to generate")
    p.add_argument("path", help="Stream file to write")
    p.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    args = p.parse_args(argv)

    snapshots = GENERATORS[args.kind](seed=args.seed)
    write_stream(snapshots, args.path)
    print(f"Wrote {len(snapshots)} snapshots ({args.kind}, seed {args.seed}) to {args.path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
