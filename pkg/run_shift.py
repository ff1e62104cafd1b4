#!/usr/bin/env python3
"""
spinshift batch runner - evaluate a CSV of shift requests.
"""

import sys
import os
import argparse
import logging
from pathlib import Path
from time import time

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from tqdm import tqdm

from spinshift import PINNED, ResultExporter, ShiftRequest, SpinShiftError, read_requests, shape_factor

SAMPLE = [
    ShiftRequest("perfect", "perp", 10.0),
    ShiftRequest("nondispersive", "perp", 10.0, n=1.5),
    ShiftRequest("lorentz", "perp", 10.0, omega_p_eV=0.006, omega_T_eV=0.003),
    ShiftRequest("plasma", "para", 10.0, omega_p_eV=9.0),
]


def main():
    parser = argparse.ArgumentParser(description="spinshift batch evaluation")
    parser.add_argument("--input", "-i", help="CSV with model,orientation,z_nm[,n,omega_p_eV,omega_T_eV]")
    parser.add_argument("--output", "-o", default="output/shifts.csv", help="Output file (.csv or .json)")
    parser.add_argument("--max", "-m", type=int, default=10000, help="Max requests to process")
    parser.add_argument("--test", "-t", action="store_true", help="Run test mode")
    args = parser.parse_args()

    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    print("=" * 70)
    print("spinshift: surface-induced electron magnetic-moment shift")
    print("=" * 70)

    print("\n[1/3] Constants")
    for key, value in PINNED.as_dict().items():
        print(f"      {key} = {value!r}")

    if args.test or not args.input:
        print("\n[2/3] TEST MODE - sample requests")
        for request in SAMPLE:
            result = shape_factor(request.to_query())
            print(f"      ✓ {request.model:13s} {request.orientation:4s} z={request.z_nm:g} nm  "
                  f"S={result.shape_factor:+.6f}  dmu/muB={result.rel_shift:.3e}")
        print("\n[3/3] Test completed successfully!")
        print("=" * 70)
        return

    print(f"\n[2/3] Processing: {args.input}")
    if not os.path.exists(args.input):
        print(f"      ✗ ERROR: File not found: {args.input}")
        sys.exit(1)

    with open(args.input, "r", encoding="utf-8") as f:
        requests = read_requests(f.read())[:args.max]
    print(f"      Found {len(requests)} requests (max: {args.max})")

    exporter = ResultExporter()
    failures = 0
    start_time = time()
    for request in tqdm(requests, desc="shift"):
        try:
            exporter.add_result(request, shape_factor(request.to_query()))
        except SpinShiftError as e:
            failures += 1
            print(f"      ✗ {request}: {e}")

    os.makedirs(os.path.dirname(args.output) or ".", exist_ok=True)
    with open(args.output, "w", encoding="utf-8") as f:
        f.write(exporter.to_json() if args.output.endswith(".json") else exporter.to_csv())

    stats = exporter.get_stats()
    print(f"\n[3/3] Results saved to: {args.output}")
    print(f"      Processing time: {time() - start_time:.2f} seconds")
    print(f"      Rows: {stats['rows']} ({failures} failed)")
    print(f"      Paths: {stats['paths']}")
    print(f"      Function evaluations: {stats['function_evaluations']}")
    print("\n" + "=" * 70)


if __name__ == "__main__":
    main()
