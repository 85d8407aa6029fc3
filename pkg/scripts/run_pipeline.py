#!/usr/bin/env python3
"""End-to-end demo: synthesize catalogs, train, and analyze a sale.

Writes everything into ./demo_run/ (created if needed). Equivalent to:

    salegauge synth --seed 42 --output demo_run
    salegauge stats --catalog demo_run/nonsale.csv --output demo_run/stats.json
    salegauge train --catalog demo_run/nonsale.csv --kernel rbf --seed 42 \
        --model demo_run/model.json
    salegauge analyze --model demo_run/model.json --sale demo_run/sale.csv \
        --stats demo_run/stats.json --output demo_run/report.json
"""

import sys
from pathlib import Path

from salegauge.cli import main

OUT = Path("demo_run")


def run(argv):
    code = main([str(a) for a in argv])
    if code != 0:
        sys.exit(code)


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    run(["synth", "--seed", 42, "--output", OUT])
    run(["stats", "--catalog", OUT / "nonsale.csv", "--output", OUT / "stats.json"])
    run(["train", "--catalog", OUT / "nonsale.csv", "--kernel", "rbf",
         "--seed", 42, "--model", OUT / "model.json"])
    run(["analyze", "--model", OUT / "model.json", "--sale", OUT / "sale.csv",
         "--stats", OUT / "stats.json", "--output", OUT / "report.json",
         "--verdicts-csv", OUT / "verdicts.csv"])
    print(f"\nall artifacts in {OUT}/")
