"""Pool change distributions of several report bundles by mapper dialect.

Prints one row per dialect plus an overall row, as counts and one-decimal
shares. Shares are computed from pooled counts, not averaged per project.
"""

import argparse
import json
from collections import Counter, defaultdict
from pathlib import Path

from nosqlschema.report import rounded_shares

CATEGORIES = ("entity_add", "entity_remove", "attribute_add", "attribute_remove", "attribute_change")


def load(bundle: Path):
    dist = json.loads((bundle / "distribution.json").read_text(encoding="utf-8"))
    return dist["by_dialect"]


def row(label, counts):
    total = sum(counts[c] for c in CATEGORIES)
    pct = rounded_shares({c: counts[c] for c in CATEGORIES})
    shares = [pct[c] for c in CATEGORIES]
    cells = " ".join(f"{counts[c]:>6d} ({s:5.1f}%)" for c, s in zip(CATEGORIES, shares))
    return f"{label:<20s} {total:>6d}  {cells}"


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("bundles", nargs="+", type=Path, help="report bundle directories")
    args = p.parse_args()

    pooled = defaultdict(Counter)
    for bundle in args.bundles:
        for dialect, payload in load(bundle).items():
            pooled[dialect].update(payload["category_counts"])
    print(f"{'dialect':<20s} {'total':>6s}  " + " ".join(f"{c:>15s}" for c in CATEGORIES))
    overall = Counter()
    for dialect in sorted(pooled):
        print(row(dialect, pooled[dialect]))
        overall.update(pooled[dialect])
    print(row("overall", overall))


if __name__ == "__main__":
    main()
