"""Regenerate the CLI golden files in tests/golden/ (review the diff before committing)."""

import argparse
import json
import sys
from pathlib import Path

from padic_lab.cli import run

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", help="subset of golden names (default: all)")
    args = ap.parse_args()
    commands = json.loads((GOLDEN / "commands.json").read_text())
    for name, argv in commands.items():
        if args.names and name not in args.names:
            continue
        status, text = run(argv)
        if status:
            print(f"{name}: exit {status}, not written", file=sys.stderr)
            continue
        (GOLDEN / f"{name}.json").write_text(text)
        print(f"{name}: {len(text)} bytes")


if __name__ == "__main__":
    main()
