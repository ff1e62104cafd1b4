#!/usr/bin/env python3
"""
TE contour constant - re-derive the sign/scale factor of the real-axis
plasma TE integral and optionally freeze it into calibration.yml.
"""

import argparse
import logging
import sys
from pathlib import Path

SCRIPT_DIR = Path(__file__).parent
PROJECT_ROOT = SCRIPT_DIR.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from spinshift.errors import CalibrationError  # noqa: E402
from spinshift.kernel import (  # noqa: E402
    CALIBRATION_PATH,
    TE_TARGETS,
    calibrate_te_contour_constant,
    load_te_contour_constant,
    write_calibration,
)


def main():
    parser = argparse.ArgumentParser(description="Calibrate the plasma TE contour constant")
    parser.add_argument("--omega-p-z", type=float, default=1e2, help="Dimensionless plasma distance")
    parser.add_argument("--write", action="store_true", help="Overwrite the packaged calibration file")
    parser.add_argument("--output", type=Path, default=CALIBRATION_PATH)
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    print("=" * 70)
    print("TE CONTOUR CALIBRATION")
    print("=" * 70)

    try:
        report = calibrate_te_contour_constant(omega_p_z=args.omega_p_z)
    except CalibrationError as e:
        print(f"✗ {e}")
        sys.exit(4)

    for orientation, unit in report.unit_values.items():
        print(f"  {orientation.value:4s}  c=1 value {unit:+.6f}  target {TE_TARGETS[orientation]:.4f}  "
              f"deviation {report.deviations[orientation]:+.2%}")
    print(f"\n  selected constant: {report.constant}")

    try:
        frozen = load_te_contour_constant(args.output)
    except CalibrationError:
        frozen = None
    if frozen is not None and frozen != report.constant:
        print(f"✗ frozen value {frozen} in {args.output} disagrees")

    if args.write:
        write_calibration(report, args.output)
        print(f"✓ written to {args.output}")
    print("=" * 70)


if __name__ == "__main__":
    main()
