"""
Analysis - susceptibility sweeps, peak search over chi(0), enhancement ratios
and the limit diagnostics.

Everything here works in dimensionless groups: a Lorentz surface at fixed
omega_T z is evaluated at z = 1 with omega_T = omega_T z.
"""

import math
import logging
from concurrent import futures
from dataclasses import dataclass, asdict
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar
from tqdm import tqdm

from .closed_forms import nondispersive_closed, nondispersive_large_n
from .constants import PINNED
from .errors import ConvergenceError, DomainError, NoPeakError
from .kernel import (
    Query,
    plasma_te_rotated_truncated,
    shape_factor,
    shape_factor_imaginary,
)
from .materials import LorentzDielectric, NonDispersive, Plasma
from .orientation import Orientation
from .quadrature import DEFAULT_CONFIG, QuadratureConfig

logger = logging.getLogger(__name__)

PEAK_SCAN = (1e-2, 1e4, 25)
PEAK_XTOL = 1e-4


class SweepFamily(str, Enum):
    LORENTZ = "LorentzAtFixed_omegaTz"
    NONDISPERSIVE = "NonDispersive"


class SweepScale(str, Enum):
    LINEAR = "Linear"
    SQRT_CHI0 = "SqrtChi0"


class Experiment(str, Enum):
    N_INFINITY_GROWTH = "NInfinityGrowth"
    OMEGA_T_ZERO_VS_PLASMA = "OmegaTZeroVsPlasma"
    PLASMA_SMALL_DISTANCE_POWER = "PlasmaSmallDistancePower"
    NONDISPERSIVE_DISTANCE_POWER = "NonDispersiveDistancePower"
    PLASMA_TE_DIVERGENCE = "PlasmaTEDivergence"


@dataclass(frozen=True)
class SweepSpec:
    family: SweepFamily
    chi0_range: Tuple[float, float]
    points: int
    orientation: Orientation = Orientation.PERP
    omega_T_z: Optional[float] = None
    scale: SweepScale = SweepScale.LINEAR

    def __post_init__(self):
        object.__setattr__(self, "family", SweepFamily(self.family))
        object.__setattr__(self, "scale", SweepScale(self.scale))
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        lo, hi = self.chi0_range
        if not (hi > lo >= 0):
            raise DomainError(f"chi0 range must satisfy hi > lo >= 0, got {self.chi0_range}")
        if self.points < 2:
            raise DomainError(f"a sweep needs at least 2 points, got {self.points}")
        if self.family is SweepFamily.LORENTZ and not (self.omega_T_z and self.omega_T_z > 0):
            raise DomainError("Lorentz sweeps need omega_T z > 0")

    def grid(self) -> np.ndarray:
        lo, hi = self.chi0_range
        if self.scale is SweepScale.LINEAR:
            values = np.linspace(lo, hi, self.points)
        else:
            values = np.linspace(math.sqrt(lo), math.sqrt(hi), self.points) ** 2
        values[0], values[-1] = lo, hi
        return values


@dataclass(frozen=True)
class CurvePoint:
    chi0: float
    sqrt_chi0: float
    S_dispersive: float
    S_nondispersive: float
    err_d: float
    err_n: float
    flag: str = ""


@dataclass(frozen=True)
class PeakResult:
    found: bool
    chi0_peak: float
    S_peak: float
    enhancement: float
    bracket: Tuple[float, float]
    iterations: int
    omega_T_z: float = float("nan")
    orientation: Orientation = Orientation.PERP

    @property
    def sqrt_chi0_peak(self) -> float:
        return math.sqrt(self.chi0_peak) if self.found else float("nan")


@dataclass
class DiagnosticReport:
    experiment: Experiment
    table: pd.DataFrame
    fitted: Optional[float] = None
    expected: Optional[float] = None
    tolerance: Optional[float] = None
    note: str = ""

    @property
    def passed(self) -> Optional[bool]:
        if self.fitted is None or self.expected is None or self.tolerance is None:
            return None
        return abs(self.fitted - self.expected) <= self.tolerance

    def summary(self) -> str:
        if self.fitted is None:
            return f"{self.experiment.value}: {self.note}"
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{self.experiment.value}: fitted {self.fitted:.6g}, expected "
                f"{self.expected:.6g} +/- {self.tolerance:.3g} [{verdict}]")


def lorentz_at(chi0: float, omega_T_z: float) -> LorentzDielectric:
    """Lorentz surface with the given chi(0) and omega_T z, placed at z = 1."""
    return LorentzDielectric(math.sqrt(chi0) * omega_T_z, omega_T_z)


def _lorentz_shape(chi0: float, omega_T_z: float, orientation: Orientation,
                   config: QuadratureConfig):
    return shape_factor_imaginary(lorentz_at(chi0, omega_T_z), 1.0, orientation, config)


def _evaluate_point(task: Tuple) -> CurvePoint:
    family, omega_T_z, orientation, chi0, config = task
    sqrt_chi0 = math.sqrt(chi0)
    try:
        nondisp = shape_factor_imaginary(NonDispersive(math.sqrt(1.0 + chi0)), 1.0, orientation, config)
        if family is SweepFamily.NONDISPERSIVE:
            s_d, err_d = float("nan"), float("nan")
        elif chi0 == 0.0:
            s_d, err_d = 0.0, 0.0
        else:
            lorentz = _lorentz_shape(chi0, omega_T_z, orientation, config)
            s_d, err_d = lorentz.shape_factor, lorentz.err_estimate
    except ConvergenceError as exc:
        logger.warning(f"sweep point chi0={chi0:g} failed: {exc}")
        nan = float("nan")
        return CurvePoint(chi0, sqrt_chi0, nan, nan, nan, nan, flag=f"convergence: {exc}")
    return CurvePoint(chi0, sqrt_chi0, s_d, nondisp.shape_factor, err_d, nondisp.err_estimate)


def sweep(spec: SweepSpec, config: QuadratureConfig = DEFAULT_CONFIG, workers: int = 1,
          progress: bool = False) -> List[CurvePoint]:
    """Evaluate the curve on the sweep grid; results follow grid order."""
    tasks = [(spec.family, spec.omega_T_z, spec.orientation, float(chi0), config) for chi0 in spec.grid()]
    logger.info(f"sweep {spec.family.value} {spec.orientation.value}: {len(tasks)} points, {workers} worker(s)")
    if workers > 1:
        with futures.ProcessPoolExecutor(max_workers=workers) as pool:
            return list(tqdm(pool.map(_evaluate_point, tasks), total=len(tasks),
                             desc="sweep", disable=not progress))
    return [_evaluate_point(task) for task in tqdm(tasks, desc="sweep", disable=not progress)]


def find_peak(omega_T_z: float, orientation: Orientation, config: QuadratureConfig = DEFAULT_CONFIG,
              progress: bool = False) -> PeakResult:
    """Largest interior maximum of |S| over chi(0) at fixed omega_T z."""
    orientation = Orientation(orientation)
    if not omega_T_z > 0:
        raise DomainError(f"omega_T z must be positive, got {omega_T_z}")

    cache: Dict[float, float] = {}

    def shape_at(log_chi0: float) -> float:
        if log_chi0 not in cache:
            cache[log_chi0] = _lorentz_shape(math.exp(log_chi0), omega_T_z, orientation, config).shape_factor
        return cache[log_chi0]

    lo, hi, count = PEAK_SCAN
    logs = np.linspace(math.log(lo), math.log(hi), count)
    magnitudes = [abs(shape_at(x)) for x in tqdm(logs, desc=f"scan {omega_T_z:g}", disable=not progress)]
    interior = [i for i in range(1, count - 1)
                if magnitudes[i] > magnitudes[i - 1] and magnitudes[i] >= magnitudes[i + 1]]
    if not interior:
        logger.info(f"no interior peak at omega_T z={omega_T_z:g} ({orientation.value})")
        nan = float("nan")
        return PeakResult(False, nan, nan, nan, (lo, hi), count, omega_T_z, orientation)

    i = max(interior, key=lambda k: magnitudes[k])
    refined = minimize_scalar(lambda x: -abs(shape_at(x)), bounds=(logs[i - 1], logs[i + 1]),
                              method="bounded", options={"xatol": PEAK_XTOL})
    best = refined.x if abs(shape_at(refined.x)) >= magnitudes[i] else logs[i]
    chi0_peak = math.exp(best)
    s_peak = shape_at(best)
    s_nd = nondispersive_closed(math.sqrt(1.0 + chi0_peak), orientation)
    enhancement = abs(s_peak) / abs(s_nd)
    bracket = (math.exp(logs[i - 1]), math.exp(logs[i + 1]))
    logger.info(f"peak omega_T z={omega_T_z:g} {orientation.value}: chi0={chi0_peak:.6g}, "
                f"S={s_peak:.6g}, enhancement={enhancement:.4g}")
    return PeakResult(True, chi0_peak, s_peak, enhancement, bracket, count + int(refined.nfev),
                      omega_T_z, orientation)


def enhancement_ratio(omega_T_z: float, orientation: Orientation,
                      config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """|S_peak| / |S_nondispersive(chi0_peak)|."""
    peak = find_peak(omega_T_z, orientation, config)
    if not peak.found:
        raise NoPeakError(f"no peak at omega_T z={omega_T_z:g} ({Orientation(orientation).value})")
    return peak.enhancement


def enhancement_constant(peak: PeakResult) -> Dict[str, float]:
    """Enhancement times omega_T z, dimensionless and in eV nm."""
    constant = peak.enhancement * peak.omega_T_z
    return {"omega_T_z": peak.omega_T_z, "enhancement": peak.enhancement,
            "constant": constant, "constant_eV_nm": constant * PINNED.hbar_c}


def curve_table(points: Sequence[CurvePoint]) -> pd.DataFrame:
    return pd.DataFrame([asdict(p) for p in points],
                        columns=["chi0", "sqrt_chi0", "S_dispersive", "S_nondispersive", "err_d", "err_n", "flag"])


def peak_table(peaks: Sequence[PeakResult]) -> pd.DataFrame:
    rows = []
    for peak in peaks:
        rows.append({"omega_T_z": peak.omega_T_z, "orientation": peak.orientation.value,
                     "found": peak.found, "chi0_peak": peak.chi0_peak, "sqrt_chi0_peak": peak.sqrt_chi0_peak,
                     "S_peak": peak.S_peak, "enhancement": peak.enhancement,
                     "bracket_lo": peak.bracket[0], "bracket_hi": peak.bracket[1],
                     "iterations": peak.iterations})
    return pd.DataFrame(rows)


def _slope(x: Sequence[float], y: Sequence[float]) -> float:
    return float(np.polyfit(np.asarray(x, dtype=float), np.asarray(y, dtype=float), 1)[0])


def limit_diagnostics(experiment: Experiment, config: QuadratureConfig = DEFAULT_CONFIG) -> DiagnosticReport:
    """Tabulate one limiting behaviour and fit its exponent or slope."""
    experiment = Experiment(experiment)

    if experiment is Experiment.N_INFINITY_GROWTH:
        ns = np.logspace(2, 4, 5)
        shapes = [shape_factor_imaginary(NonDispersive(float(n)), 1.0, Orientation.PERP, config).shape_factor
                  for n in ns]
        table = pd.DataFrame({
            "n": ns,
            "S": shapes,
            "S_closed": [nondispersive_closed(float(n), Orientation.PERP) for n in ns],
            "S_large_n": [nondispersive_large_n(float(n), Orientation.PERP) for n in ns],
        })
        return DiagnosticReport(experiment, table, _slope(ns, shapes), -0.5, 0.005,
                                "linear growth of S_perp with n")

    if experiment is Experiment.OMEGA_T_ZERO_VS_PLASMA:
        omega_p_z = 1.0
        s_plasma = shape_factor(Query(Plasma(omega_p_z), 1.0, Orientation.PERP), config).shape_factor
        rows = []
        for omega_T_z in (1e-1, 1e-2, 1e-3, 1e-4):
            s = shape_factor_imaginary(LorentzDielectric(omega_p_z, omega_T_z), 1.0,
                                       Orientation.PERP, config).shape_factor
            rows.append({"omega_p_z": omega_p_z, "omega_T_z": omega_T_z, "S_lorentz": s,
                         "S_plasma": s_plasma, "gap": s - s_plasma})
        return DiagnosticReport(experiment, pd.DataFrame(rows),
                                note="Lorentz shift as omega_T z -> 0 against the plasma shift (no limit asserted)")

    if experiment is Experiment.PLASMA_SMALL_DISTANCE_POWER:
        omega_p = 1.0
        zs = np.logspace(-4, -2, 5)
        shapes = [shape_factor(Query(Plasma(omega_p), float(z), Orientation.PERP), config).shape_factor
                  for z in zs]
        shifts = [abs(s) / z ** 2 for s, z in zip(shapes, zs)]
        table = pd.DataFrame({"omega_p_z": omega_p * zs, "S": shapes, "delta_mu_scaled": shifts})
        return DiagnosticReport(experiment, table, _slope(np.log(zs), np.log(shifts)), -3.0, 0.05,
                                "Delta mu ~ z^-3 near a plasma surface")

    if experiment is Experiment.NONDISPERSIVE_DISTANCE_POWER:
        zs = np.logspace(0, 2, 5)
        shapes = [shape_factor(Query(NonDispersive(2.0), float(z), Orientation.PERP), config).shape_factor
                  for z in zs]
        shifts = [abs(s) / z ** 2 for s, z in zip(shapes, zs)]
        table = pd.DataFrame({"z_nm": zs, "S": shapes, "delta_mu_scaled": shifts})
        return DiagnosticReport(experiment, table, _slope(np.log(zs), np.log(shifts)), -2.0, 0.01,
                                "Delta mu ~ z^-2 for a non-dispersive surface")

    cutoffs = np.logspace(-4, -2, 5)
    values = [plasma_te_rotated_truncated(1.0, 1.0, Orientation.PERP, float(c), config).value for c in cutoffs]
    table = pd.DataFrame({"cutoff": cutoffs, "truncated_TE": values})
    return DiagnosticReport(experiment, table, _slope(np.log(cutoffs), np.log(np.abs(values))), -1.0, 0.1,
                            "imaginary-axis plasma TE integral grows like 1/cutoff")
