#!/usr/bin/env python3
"""
Enhancement tables - peak positions and enhancement constants of the
Lorentz surface, printed as Markdown and LaTeX.
"""

import argparse
import logging
import sys
from pathlib import Path

SCRIPT_DIR = Path(__file__).parent
PROJECT_ROOT = SCRIPT_DIR.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

import pandas as pd  # noqa: E402

from spinshift.analysis import enhancement_constant, find_peak, peak_table  # noqa: E402
from spinshift.constants import PINNED  # noqa: E402
from spinshift.orientation import Orientation  # noqa: E402


def collect(grid, progress):
    peaks, constants = [], []
    for orientation in Orientation:
        for omega_T_z in grid:
            peak = find_peak(omega_T_z, orientation, progress=progress)
            peaks.append(peak)
            if peak.found:
                constants.append({"orientation": orientation.value, **enhancement_constant(peak)})
    return peak_table(peaks), pd.DataFrame(constants)


def print_markdown(peaks: pd.DataFrame, constants: pd.DataFrame):
    print("\nMarkdown:")
    print("| Orientation | omega_T z | sqrt(chi0) at peak | S at peak | Enhancement | Enhancement x omega_T z |")
    print("|-------------|-----------|--------------------|-----------|-------------|-------------------------|")
    for row in peaks.itertuples(index=False):
        if not row.found:
            print(f"| {row.orientation} | {row.omega_T_z:g} | --- | --- | --- | --- |")
            continue
        print(f"| {row.orientation} | {row.omega_T_z:g} | {row.sqrt_chi0_peak:.3f} | {row.S_peak:.4f} | "
              f"{row.enhancement:.3f} | {row.enhancement * row.omega_T_z:.4f} |")

    if not constants.empty:
        means = constants.groupby("orientation")["constant"].mean()
        print("\n| Orientation | Mean constant | eV nm |")
        print("|-------------|---------------|-------|")
        for orientation, value in means.items():
            print(f"| {orientation} | {value:.4f} | {value * PINNED.hbar_c:.2f} |")
        if {"perp", "para"} <= set(means.index):
            print(f"\nRatio para/perp: {means['para'] / means['perp']:.3f}")


def print_latex(peaks: pd.DataFrame):
    print("\nLaTeX:")
    print("\\begin{table}[htbp]")
    print("\\centering")
    print("\\caption{Peak enhancement of the spin-magnetic-moment shift over a Lorentz surface}")
    print("\\label{tab:enhancement}")
    print("\\begin{tabular}{lccccc}")
    print("\\toprule")
    print("\\textbf{Orientation} & $\\omega_T z$ & $\\sqrt{\\chi_0}$ & $S$ & "
          "\\textbf{Enhancement} & $\\times\\,\\omega_T z$ \\\\")
    print("\\midrule")
    for row in peaks.itertuples(index=False):
        if row.found:
            print(f"{row.orientation} & {row.omega_T_z:g} & {row.sqrt_chi0_peak:.3f} & {row.S_peak:.4f} & "
                  f"{row.enhancement:.3f} & {row.enhancement * row.omega_T_z:.4f} \\\\")
        else:
            print(f"{row.orientation} & {row.omega_T_z:g} & --- & --- & --- & --- \\\\")
    print("\\bottomrule")
    print("\\end{tabular}")
    print("\\end{table}")


def main():
    parser = argparse.ArgumentParser(description="Tabulate Lorentz peak enhancements")
    parser.add_argument("--omega-t-z", type=float, nargs="+", default=[0.01, 0.02, 0.04, 0.1],
                        help="Dimensionless omega_T z values")
    parser.add_argument("--csv", type=Path, help="Also write the peak table here")
    parser.add_argument("--no-progress", dest="progress", action="store_false")
    args = parser.parse_args()

    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    print("\n" + "=" * 70)
    print("TABLE: Lorentz peak enhancement")
    print("=" * 70)

    peaks, constants = collect(args.omega_t_z, args.progress)
    print_markdown(peaks, constants)
    print_latex(peaks)

    if args.csv:
        args.csv.parent.mkdir(parents=True, exist_ok=True)
        peaks.to_csv(args.csv, index=False, float_format="%.17g")
        print(f"\n✓ peak table saved to {args.csv}")
    print("\n" + "=" * 70)


if __name__ == "__main__":
    main()
