"""Reaction shares from published per-reaction totals.

    python scripts/reaction_shares.py [data/reaction_totals.csv]
"""

import csv
import sys
from pathlib import Path

from reactsent.corpus import stats_from_totals


def main(path: str) -> None:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        totals = {row["reaction"]: int(row["count"]) for row in csv.DictReader(fh)}
    stats = stats_from_totals(totals)
    print(stats.table())
    print(f"\nfiltered shares sum to {sum(stats.filtered_pct.values()):.4f}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else str(Path(__file__).parent.parent / "data" / "reaction_totals.csv"))
