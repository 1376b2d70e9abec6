#!/usr/bin/env python3
"""Run the acceptance criteria and write per-criterion JSON next to the log lines.

usage: python3 scripts/run_acceptance.py [--criteria 1,2,8] [--json results/acceptance.json]
"""

import argparse
import json
import sys
from pathlib import Path

from semigroup_lab.acceptance import CRITERIA


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--criteria", help="comma-separated subset")
    p.add_argument("--json", default="results/acceptance.json")
    args = p.parse_args()
    numbers = [int(n) for n in args.criteria.split(",")] if args.criteria else sorted(CRITERIA)
    results = []
    for n in numbers:
        r = CRITERIA[n]()
        print(r.report(), flush=True)
        results.append(r.to_dict())
    out = Path(args.json)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(results, indent=2) + "\n")
    failed = [r["criterion"] for r in results if not r["passed"]]
    print(f"{len(results) - len(failed)}/{len(results)} passed" + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
