"""Clone google/nomulus and analyze its history up to 2018-09-04.

Prints the commit total and the entity-class range from summary.json.
Needs network access for the clone (skipped if --clone already exists).
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path

from nosqlschema.cli import main as cli_main

URL = "https://github.com/google/nomulus.git"
CUTOFF = "2018-09-04T00:00:00"


def parse_args():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--clone", type=Path, default=Path("work/nomulus"), help="clone location")
    p.add_argument("--out", type=Path, default=Path("work/nomulus-report"), help="report directory")
    p.add_argument("--jobs", default="auto")
    return p.parse_args()


def main():
    args = parse_args()
    if not (args.clone / ".git").exists():
        args.clone.parent.mkdir(parents=True, exist_ok=True)
        subprocess.run(["git", "clone", URL, str(args.clone)], check=True)
    code = cli_main([
        "analyze", "--repo", str(args.clone), "--before", CUTOFF, "--mapper", "objectify",
        "--out", str(args.out), "--jobs", args.jobs, "--deterministic", "--label", "google/nomulus",
    ])
    if code:
        return code
    summary = json.loads((args.out / "summary.json").read_text())
    ents = summary["entity_classes"]
    print(f"total commits: {summary['total_commits']} (reference 2025)")
    print(f"entity classes: {ents['min']} ~ {ents['max']} (reference 51 ~ 55)")
    print(f"churn: {summary['churn']['churn_rate_pct']}%")
    return 0


if __name__ == "__main__":
    sys.exit(main())
