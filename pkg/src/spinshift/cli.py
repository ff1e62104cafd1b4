#!/usr/bin/env python3
"""
spinshift command line - shift, sweep, peak, limits and verify subcommands.

Standard output carries data only (CSV or JSON); logging and error lines go
to standard error.
"""

import argparse
import json
import logging
import math
import sys
from typing import Callable, Dict, Optional, Sequence, Tuple

from . import __version__
from .analysis import (
    Experiment,
    SweepFamily,
    SweepScale,
    SweepSpec,
    curve_table,
    find_peak,
    limit_diagnostics,
    peak_table,
    sweep,
)
from .config import OUTPUT_FORMATS, RunConfig, build_run_config, read_config_file
from .constants import PINNED, PhysicalConstants
from .errors import SpinShiftError, UsageError
from .export import ResultExporter, ShiftRequest, table_to_csv, table_to_records
from .kernel import ShiftResult, load_te_contour_constant, shape_factor
from .orientation import Orientation
from .quadrature import EtaTransform, UTransform

logger = logging.getLogger("spinshift")

UNITS = ("eV", "nm", "dimensionless")
# verify ran to completion but at least one check failed
CHECKS_FAILED_EXIT = 4


def parse_units(token: str, unit: str = "dimensionless", constants: PhysicalConstants = PINNED) -> float:
    """Convert a command-line number to the library's units.

    Frequencies given in eV become inverse nanometres; distances stay in nm;
    dimensionless groups pass through.
    """
    if unit not in UNITS:
        raise ValueError(f"unknown unit {unit!r}")
    try:
        value = float(token)
    except (TypeError, ValueError):
        raise UsageError(f"cannot parse {token!r} as a number") from None
    if not math.isfinite(value):
        raise UsageError(f"{token!r} is not a finite number")
    if unit == "eV":
        return constants.ev_to_inverse_nm(value)
    return value


def _parse_float(token: Optional[str]) -> Optional[float]:
    return None if token is None else parse_units(token)


def _parse_chi0_range(token: str) -> Tuple[float, float, int]:
    parts = token.split(":")
    if len(parts) != 3:
        raise UsageError(f"--chi0 expects LO:HI:POINTS, got {token!r}")
    lo, hi = parse_units(parts[0]), parse_units(parts[1])
    try:
        points = int(parts[2])
    except ValueError:
        raise UsageError(f"POINTS must be an integer, got {parts[2]!r}") from None
    return lo, hi, points


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="Config file (key: value or key = value lines)")
    common.add_argument("--rel-tol", dest="rel_tol", help="Relative quadrature tolerance")
    common.add_argument("--abs-tol", dest="abs_tol", help="Absolute quadrature tolerance")
    common.add_argument("--max-subdivisions", dest="max_subdivisions", help="Subdivision budget")
    common.add_argument("--eta-transform", dest="eta_transform", choices=[t.value for t in EtaTransform])
    common.add_argument("--u-transform", dest="u_transform", choices=[t.value for t in UTransform])
    common.add_argument("--threads", help="Worker processes for sweeps (integer or auto)")
    common.add_argument("--format", choices=OUTPUT_FORMATS, help="Output format")
    common.add_argument("--no-progress", dest="progress", action="store_const", const=False,
                        help="Disable progress bars")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    common.add_argument("--quiet", "-q", action="store_true", help="Warnings and errors only")

    parser = _Parser(prog="spinshift", description="Surface-induced electron magnetic moment shift")
    parser.add_argument("--version", action="store_true", help="Print version, calibration and constants")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)

    shift = commands.add_parser("shift", parents=[common], help="Evaluate one shift")
    shift.add_argument("--model", required=True, choices=["nondispersive", "plasma", "lorentz", "perfect"])
    shift.add_argument("--n", help="Refractive index")
    shift.add_argument("--omega-p", dest="omega_p", help="Plasma frequency, eV")
    shift.add_argument("--omega-t", dest="omega_t", help="Resonance frequency, eV")
    shift.add_argument("--z", required=True, help="Distance from the surface, nm")
    shift.add_argument("--orientation", required=True, choices=[o.value for o in Orientation])

    curve = commands.add_parser("sweep", parents=[common], help="Shift against chi(0)")
    curve.add_argument("--omega-t-z", dest="omega_t_z", help="Dimensionless omega_T z")
    curve.add_argument("--chi0", required=True, help="LO:HI:POINTS")
    curve.add_argument("--orientation", required=True, choices=[o.value for o in Orientation])
    curve.add_argument("--family", choices=["lorentz", "nondispersive"], default="lorentz")
    curve.add_argument("--scale", choices=["linear", "sqrt"], default="linear")

    peak = commands.add_parser("peak", parents=[common], help="Peak of the shift over chi(0)")
    peak.add_argument("--omega-t-z", dest="omega_t_z", required=True, nargs="+",
                      help="One or more dimensionless omega_T z values")
    peak.add_argument("--orientation", required=True, choices=[o.value for o in Orientation])

    limits = commands.add_parser("limits", parents=[common], help="Limit diagnostics")
    limits.add_argument("--experiment", required=True, choices=[e.value for e in Experiment])

    verify = commands.add_parser("verify", parents=[common], help="Run the acceptance battery")
    verify.add_argument("--fast", action="store_true", help="Reduced battery")
    return parser


def _configure_logging(args: argparse.Namespace):
    level = logging.INFO
    if getattr(args, "verbose", False):
        level = logging.DEBUG
    elif getattr(args, "quiet", False):
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, force=True,
                        format="%(levelname)s %(name)s: %(message)s")


def _run_config(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    overrides = {key: getattr(args, key, None) for key in
                 ("rel_tol", "abs_tol", "max_subdivisions", "eta_transform", "u_transform",
                  "threads", "format", "progress")}
    return build_run_config(file_values, overrides)


def version_text(constants: PhysicalConstants = PINNED) -> str:
    try:
        constant = str(load_te_contour_constant())
    except SpinShiftError:
        constant = "unset"
    lines = [f"spinshift {__version__}", f"te_contour_constant: {constant}"]
    lines += [f"{key}: {value!r}" for key, value in constants.as_dict().items()]
    return "\n".join(lines) + "\n"


def emit(records: Sequence[Tuple[ShiftRequest, ShiftResult]], output_format: str = "csv",
         config: Optional[Dict] = None) -> str:
    """Serialize (request, result) pairs as CSV rows or a JSON document."""
    if output_format not in OUTPUT_FORMATS:
        raise UsageError(f"unknown output format {output_format!r}")
    exporter = ResultExporter()
    exporter.add_batch(records)
    if output_format == "json":
        return exporter.to_json(config)
    return exporter.to_csv()


def _emit_table(frame, run_config: RunConfig, extra: Optional[Dict] = None) -> str:
    if run_config.format == "json":
        document = {"rows": table_to_records(frame), "config": run_config.as_dict()}
        document.update(extra or {})
        return json.dumps(document, indent=2, ensure_ascii=False) + "\n"
    text = table_to_csv(frame)
    if extra and extra.get("summary"):
        text += f"# {extra['summary']}\n"
    return text


def _cmd_shift(args: argparse.Namespace, run_config: RunConfig) -> Tuple[str, int]:
    request = ShiftRequest(
        model=args.model,
        orientation=args.orientation,
        z_nm=parse_units(args.z, "nm"),
        n=_parse_float(args.n),
        omega_p_eV=_parse_float(args.omega_p),
        omega_T_eV=_parse_float(args.omega_t),
    )
    result = shape_factor(request.to_query(), run_config.quadrature)
    return emit([(request, result)], run_config.format, run_config.as_dict()), 0


def _cmd_sweep(args: argparse.Namespace, run_config: RunConfig) -> Tuple[str, int]:
    lo, hi, points = _parse_chi0_range(args.chi0)
    family = SweepFamily.LORENTZ if args.family == "lorentz" else SweepFamily.NONDISPERSIVE
    omega_T_z = _parse_float(args.omega_t_z)
    spec = SweepSpec(family, (lo, hi), points, args.orientation, omega_T_z,
                     SweepScale.SQRT_CHI0 if args.scale == "sqrt" else SweepScale.LINEAR)
    curve = sweep(spec, run_config.quadrature, workers=run_config.workers, progress=run_config.progress)
    flagged = sum(1 for point in curve if point.flag)
    if flagged:
        logger.warning(f"{flagged} sweep point(s) flagged")
    return _emit_table(curve_table(curve), run_config), 0


def _cmd_peak(args: argparse.Namespace, run_config: RunConfig) -> Tuple[str, int]:
    peaks = [find_peak(parse_units(token), args.orientation, run_config.quadrature,
                       progress=run_config.progress) for token in args.omega_t_z]
    return _emit_table(peak_table(peaks), run_config), 0


def _cmd_limits(args: argparse.Namespace, run_config: RunConfig) -> Tuple[str, int]:
    report = limit_diagnostics(Experiment(args.experiment), run_config.quadrature)
    extra = {"experiment": report.experiment.value, "fitted": report.fitted, "expected": report.expected,
             "tolerance": report.tolerance, "passed": report.passed, "summary": report.summary()}
    return _emit_table(report.table, run_config, extra), 0


def _cmd_verify(args: argparse.Namespace, run_config: RunConfig) -> Tuple[str, int]:
    from .acceptance import format_report, run_acceptance

    outcomes = run_acceptance(fast=args.fast, config=run_config.quadrature, progress=run_config.progress)
    failed = [o for o in outcomes if not o.skipped and not o.passed]
    return format_report(outcomes, fast=args.fast), CHECKS_FAILED_EXIT if failed else 0


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], Tuple[str, int]]] = {
    "shift": _cmd_shift,
    "sweep": _cmd_sweep,
    "peak": _cmd_peak,
    "limits": _cmd_limits,
    "verify": _cmd_verify,
}


def _report_error(exc: SpinShiftError):
    reason = " ".join(str(exc).split())
    print(f"spinshift: error={exc.kind} code={exc.exit_code} reason={reason}", file=sys.stderr)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Execute one command line; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _configure_logging(args)
        if args.version:
            sys.stdout.write(version_text())
            return 0
        if args.command is None:
            raise UsageError("a subcommand is required (shift, sweep, peak, limits, verify)")
        run_config = _run_config(args)
        text, code = COMMANDS[args.command](args, run_config)
    except SpinShiftError as exc:
        _report_error(exc)
        return exc.exit_code
    sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
