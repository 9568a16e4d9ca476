#!/usr/bin/env python3
"""Reproduce the comparative-statics experiments.

Runs every observable-effort sweep fixture and the hidden-effort
counterparts through the CLI, writing CSV/JSON/SVG bundles under runs/.
"""

import sys
from pathlib import Path

from preventix.cli import run

ROOT = Path(__file__).resolve().parents[1]

OBSERVABLE = ["sec5_1_1", "sec5_1_2", "sec5_1_3", "sec5_2_1", "sec5_2_2", "sec5_2_3"]
HIDDEN = ["sec6_1", "sec6_2", "sec6_3"]


def main() -> int:
    for name in OBSERVABLE:
        code = run(
            ["sweep", "--config", str(ROOT / "fixtures" / f"{name}.json"),
             "--out", str(ROOT / "runs" / name)]
        )
        if code != 0:
            return code
    for name in HIDDEN:
        code = run(
            ["moral-hazard", "--config", str(ROOT / "fixtures" / f"{name}.json"),
             "--out", str(ROOT / "runs" / name)]
        )
        if code != 0:
            return code
    print("all sweeps written under runs/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
