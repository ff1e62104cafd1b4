#!/usr/bin/env python3
"""
Golden fixture - regenerate the 50-digit non-dispersive shape factors.
"""

import argparse
import logging
import sys
from pathlib import Path

SCRIPT_DIR = Path(__file__).parent
PROJECT_ROOT = SCRIPT_DIR.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from spinshift.closed_forms import GOLDEN_NS, GOLDEN_PATH, load_golden_table, write_golden_table  # noqa: E402


def main():
    parser = argparse.ArgumentParser(description="Write the non-dispersive golden table")
    parser.add_argument("--output", type=Path, default=GOLDEN_PATH, help="Destination CSV")
    parser.add_argument("--dps", type=int, default=50, help="Significant digits to keep")
    parser.add_argument("--n", nargs="+", default=list(GOLDEN_NS), help="Refractive indices, as decimal strings")
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    path = write_golden_table(args.output, args.n, dps=args.dps)
    table = load_golden_table(path)
    print(f"✓ {len(table)} values written to {path}")


if __name__ == "__main__":
    main()
