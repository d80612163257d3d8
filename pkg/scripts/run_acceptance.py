#!/usr/bin/env python3
"""Run the acceptance suite and keep the determinism artifacts."""
import argparse
import sys
from pathlib import Path

from nexpansive.acceptance import run_all


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/acceptance")
    args = ap.parse_args()
    results = run_all(Path(args.out))
    for r in results:
        print(f"{r.line()}  ({r.seconds:.1f} s)")
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
