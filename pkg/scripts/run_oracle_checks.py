#!/usr/bin/env python3
"""Monte-Carlo and grid-oracle verification of the base configuration.

Writes a JSON report under runs/oracle/ and exits non-zero on any
disagreement between closed forms, sampled estimates, and the
case-logic-free grid optimum.
"""

import sys
from pathlib import Path

from preventix.cli import run

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    return run(
        ["oracle-check",
         "--config", str(ROOT / "fixtures" / "sec5_1_1.json"),
         "--out", str(ROOT / "runs" / "oracle"),
         "--seed", "3",
         "--samples", "1000000"]
    )


if __name__ == "__main__":
    sys.exit(main())
