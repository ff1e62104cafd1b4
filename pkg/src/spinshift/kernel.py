"""
Shift kernel - integrands of the boundary shift, evaluation paths and the
dispatcher producing ShiftResult.

Integration runs in the scaled variable u = xi z with eta = k_z/xi, so the
only inputs of the integrand are the dimensionless groups omega z.
"""

import math
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import yaml

from . import closed_forms
from .constants import PINNED, PhysicalConstants
from .errors import CalibrationError, DomainError
from .materials import (
    LorentzDielectric,
    MaterialModel,
    NonDispersive,
    PerfectReflector,
    Plasma,
    reflection_te_real_axis,
    static_mirror_coefficient,
    te_coefficient,
    tm_minus_static,
)
from .orientation import Orientation
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    QuadratureResult,
    integrate_eta,
    integrate_oscillatory,
    integrate_semi_infinite,
)

logger = logging.getLogger(__name__)

CALIBRATION_PATH = Path(__file__).parent / "calibration.yml"
CONTOUR_CANDIDATES: Tuple[int, ...] = (-2, -1, 1, 2)
TE_TARGETS = {Orientation.PERP: 1.25, Orientation.PARA: 0.5}

# P(c) = p0 + p2 c^2 with c the direction cosine of the real-axis wave vector
_ANGULAR_POLYNOMIAL = {Orientation.PERP: (2.0, -3.0), Orientation.PARA: (1.5, -0.5)}

# exp(-745) underflows to zero
_EXPONENT_CUTOFF = 745.0


class Polarization(str, Enum):
    TE = "TE"
    TM = "TM"


BOTH_POLARIZATIONS = (Polarization.TE, Polarization.TM)


class EvaluationPath(str, Enum):
    IMAGINARY_AXIS = "ImaginaryAxis"
    REAL_AXIS_TE_PLUS_IMAG_TM = "RealAxisTE_plus_ImagTM"
    CLOSED_FORM = "ClosedForm"


@dataclass(frozen=True)
class Query:
    """One shift evaluation: surface, distance (nm) and field orientation."""
    model: MaterialModel
    z: float
    orientation: Orientation

    def __post_init__(self):
        if not isinstance(self.model, MaterialModel):
            raise DomainError(f"model must be a MaterialModel, got {type(self.model).__name__}")
        if not (isinstance(self.z, (int, float)) and math.isfinite(self.z) and self.z > 0):
            raise DomainError(f"distance must be positive, got {self.z!r}")
        object.__setattr__(self, "orientation", Orientation(self.orientation))


@dataclass(frozen=True)
class Diagnostics:
    function_evaluations: int = 0
    subdivisions: int = 0
    path: EvaluationPath = EvaluationPath.IMAGINARY_AXIS


@dataclass(frozen=True)
class ShiftResult:
    """Shape factor S, relative shift Delta mu / mu_B and error bar."""
    shape_factor: float
    rel_shift: float
    err_estimate: float
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
    query: Optional[Query] = None

    def __post_init__(self):
        # no negative zeros in emitted tables
        object.__setattr__(self, "shape_factor", self.shape_factor + 0.0)
        object.__setattr__(self, "rel_shift", self.rel_shift + 0.0)


@dataclass(frozen=True)
class CalibrationReport:
    constant: int
    omega_p_z: float
    unit_values: Dict[Orientation, float]
    deviations: Dict[Orientation, float]

    def as_yaml_dict(self) -> Dict:
        return {
            "te_contour_constant": self.constant,
            "calibrated_at": {
                "omega_p_z": self.omega_p_z,
                "targets": {o.value: TE_TARGETS[o] for o in Orientation},
                "candidates": list(CONTOUR_CANDIDATES),
            },
        }


def _weights(orientation: Orientation, eta: float) -> Tuple[float, float]:
    eta2 = eta * eta
    if orientation is Orientation.PERP:
        return 3.0 * eta2 - 2.0, eta2 - 2.0
    return 0.5 * (eta2 - 3.0), 0.5 * (5.0 * eta2 - 3.0)


def _density(orientation: Orientation, u: float, eta: float, chi: float, gap: float,
             polarizations: Sequence[Polarization]) -> float:
    exponent = 2.0 * u * eta
    if u <= 0.0 or exponent > _EXPONENT_CUTOFF:
        return 0.0
    a_te, a_tm = _weights(orientation, eta)
    total = 0.0
    if Polarization.TE in polarizations:
        total += a_te * te_coefficient(chi, eta)
    if Polarization.TM in polarizations:
        total += a_tm * tm_minus_static(chi, eta, gap)
    return u * total * math.exp(-exponent)


def _tm_static_moment(orientation: Orientation, u: float) -> float:
    """u * int_1^inf a_TM(eta) e^{-2 u eta} d eta, the weight of the mirror-gap term."""
    s = 2.0 * u
    if s <= 0.0 or s > _EXPONENT_CUTOFF:
        return 0.0
    decay = math.exp(-s)
    m0 = decay / s
    m2 = decay * (1.0 / s + 2.0 / (s * s) + 2.0 / (s * s * s))
    if orientation is Orientation.PERP:
        return u * (m2 - 2.0 * m0)
    return u * (2.5 * m2 - 1.5 * m0)


def integrand_imaginary(model: MaterialModel, orientation: Orientation, u: float, eta: float,
                        z: float, polarizations: Sequence[Polarization] = BOTH_POLARIZATIONS) -> float:
    """Shift density in (u, eta) with epsilon evaluated at xi = u/z."""
    orientation = Orientation(orientation)
    polarizations = tuple(Polarization(p) for p in polarizations)
    if isinstance(model, PerfectReflector):
        raise DomainError("perfect reflector is evaluated by closed forms, not quadrature")
    if isinstance(model, Plasma) and Polarization.TE in polarizations:
        raise DomainError("plasma TE sector diverges on the imaginary axis; use plasma_te_real_axis")
    if not u >= 0 or not eta >= 1 or not z > 0:
        raise DomainError(f"need u >= 0, eta >= 1, z > 0 (got u={u}, eta={eta}, z={z})")
    if u == 0:
        return 0.0
    scaled = model.scaled(z)
    return _density(orientation, u, eta, scaled.susceptibility(u), scaled.mirror_gap(u), polarizations)


def _eta_breakpoints(u: float, chi: float) -> Tuple[float, ...]:
    candidates = (math.sqrt(chi), 0.5 / u, 5.0 / u)
    return tuple(b for b in candidates if 1.0 < b < 1e12)


def _u_breakpoints(scaled: MaterialModel, shift: float = 0.0) -> Tuple[float, ...]:
    points = []
    for s in scaled.characteristic_scales():
        for factor in (0.25, 1.0, 4.0):
            b = s * factor - shift
            if 1e-12 < b < 40.0:
                points.append(b)
    return tuple(sorted(set(points)))


def _nested(scaled: MaterialModel, orientation: Orientation, polarizations: Sequence[Polarization],
            config: QuadratureConfig, lower: float = 0.0) -> QuadratureResult:
    """Outer u integral (from ``lower``) of the inner eta integral of the density."""
    inner_config = config.inner()
    tally = {"evaluations": 0, "subdivisions": 0}

    def over_eta(x: float) -> float:
        u = lower + x
        if u <= 0.0:
            return 0.0
        chi = scaled.susceptibility(u)
        # the mirror-gap part of R_TM - r0 does not depend on eta and is integrated exactly
        inner = integrate_eta(lambda eta: _density(orientation, u, eta, chi, 0.0, polarizations),
                              inner_config, breakpoints=_eta_breakpoints(u, chi))
        tally["evaluations"] += inner.evaluations
        tally["subdivisions"] += inner.subdivisions
        if Polarization.TM not in polarizations:
            return inner.value
        return inner.value + scaled.mirror_gap(u) * _tm_static_moment(orientation, u)

    outer = integrate_semi_infinite(over_eta, config, breakpoints=_u_breakpoints(scaled, lower), scale=0.5)
    # inner integrals each hold inner_config.rel_tol; that propagates linearly into the outer value
    error = outer.error + inner_config.rel_tol * abs(outer.value)
    return QuadratureResult(outer.value, error,
                            outer.evaluations + tally["evaluations"],
                            outer.subdivisions + tally["subdivisions"])


def _result(shape_factor: float, error: float, z: float, evaluations: int, subdivisions: int,
            path: EvaluationPath, constants: PhysicalConstants = PINNED) -> ShiftResult:
    return ShiftResult(
        shape_factor=shape_factor,
        rel_shift=constants.relative_shift(shape_factor, z),
        err_estimate=error,
        diagnostics=Diagnostics(evaluations, subdivisions, path),
    )


def shape_factor_imaginary(model: MaterialModel, z: float, orientation: Orientation,
                           config: QuadratureConfig = DEFAULT_CONFIG) -> ShiftResult:
    """Imaginary-axis shape factor for non-dispersive and Lorentz surfaces."""
    orientation = Orientation(orientation)
    if not isinstance(model, (NonDispersive, LorentzDielectric)):
        raise DomainError(f"imaginary-axis quadrature does not apply to the {model.kind.value} surface")
    if not z > 0:
        raise DomainError(f"distance must be positive, got {z}")

    integral = _nested(model.scaled(z), orientation, BOTH_POLARIZATIONS, config)
    r0 = static_mirror_coefficient(model)
    shape = integral.value - orientation.boundary_weight * r0
    logger.debug(f"{model.kind.value} {orientation.value} z={z:g}: S={shape:.12g} "
                f"(err {integral.error:.2g}, {integral.evaluations} evaluations)")
    return _result(shape, integral.error, z, integral.evaluations, integral.subdivisions,
                   EvaluationPath.IMAGINARY_AXIS)


def plasma_tm_imaginary(omega_p: float, z: float, orientation: Orientation,
                        config: QuadratureConfig = DEFAULT_CONFIG) -> ShiftResult:
    """TM sector of the plasma shift plus its boundary term (r0 = 1)."""
    orientation = Orientation(orientation)
    scaled = Plasma(omega_p).scaled(z)
    integral = _nested(scaled, orientation, (Polarization.TM,), config)
    shape = integral.value - orientation.boundary_weight
    logger.debug(f"plasma TM omega_p z={scaled.omega_p:g} {orientation.value}: {shape:.12g}")
    return _result(shape, integral.error, z, integral.evaluations, integral.subdivisions,
                   EvaluationPath.IMAGINARY_AXIS)


def angular_finite_part(orientation: Orientation) -> float:
    """Hadamard finite part of int_0^1 P(c)/c^2 dc for the orientation polynomial."""
    p0, p2 = _ANGULAR_POLYNOMIAL[Orientation(orientation)]
    return -p0 + p2


@lru_cache(maxsize=8)
def _read_constant(path: str) -> int:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle) or {}
    except FileNotFoundError:
        raise CalibrationError(f"calibration file missing: {path}") from None
    value = data.get("te_contour_constant")
    if value is None:
        raise CalibrationError("TE contour constant is not calibrated (run tools/calibrate_te.py --write)")
    if value not in CONTOUR_CANDIDATES:
        raise CalibrationError(f"TE contour constant {value!r} is not one of {CONTOUR_CANDIDATES}")
    return int(value)


def load_te_contour_constant(path: Union[str, Path, None] = None) -> int:
    """Frozen constant c of the real-axis TE integral."""
    return _read_constant(str(path or CALIBRATION_PATH))


def plasma_te_real_axis(omega_p: float, z: float, orientation: Orientation,
                        config: QuadratureConfig = DEFAULT_CONFIG,
                        constant: Optional[int] = None) -> ShiftResult:
    """TE sector of the plasma shift on the real k_z axis.

    With an isotropic exponential regulator the angular integral is the finite
    part of P(c)/c^2, leaving the radial integral
    J = int_0^inf q R_TE(q) e^{2iqz} dq for the oscillatory engine, so that
    S_TE = c z^2 Phi Re J.
    """
    orientation = Orientation(orientation)
    c = load_te_contour_constant() if constant is None else constant
    w = Plasma(omega_p).omega_p * z
    if not w > 0:
        raise DomainError(f"distance must be positive, got {z}")

    def radial(v: float) -> complex:
        return v * reflection_te_real_axis(w, v)

    # R_TE has a square-root branch point at v = w
    integral = integrate_oscillatory(radial, 2.0, config, regulator_unit=1.0 / max(1.0, w),
                                     scale=max(0.25, w), kink=w)
    factor = c * angular_finite_part(orientation)
    shape = factor * integral.value.real
    logger.debug(f"plasma TE omega_p z={w:g} {orientation.value}: {shape:.12g} (c={c})")
    return _result(shape, abs(factor) * integral.error, z, integral.evaluations, integral.subdivisions,
                   EvaluationPath.REAL_AXIS_TE_PLUS_IMAG_TM)


def plasma_te_rotated_truncated(omega_p: float, z: float, orientation: Orientation, cutoff: float,
                                config: QuadratureConfig = DEFAULT_CONFIG) -> QuadratureResult:
    """Imaginary-axis plasma TE integral restricted to u >= cutoff.

    Grows like 1/cutoff; the untruncated integral does not exist.
    """
    if not cutoff > 0:
        raise DomainError(f"cutoff must be positive, got {cutoff}")
    scaled = Plasma(omega_p).scaled(z)
    return _nested(scaled, Orientation(orientation), (Polarization.TE,), config, lower=cutoff)


def calibrate_te_contour_constant(config: QuadratureConfig = DEFAULT_CONFIG,
                                  omega_p_z: float = 1e2) -> CalibrationReport:
    """Pick c from CONTOUR_CANDIDATES against the perfect-reflector TE targets."""
    unit_values = {o: plasma_te_real_axis(omega_p_z, 1.0, o, config, constant=1).shape_factor
                   for o in Orientation}

    def worst(c: int) -> float:
        return max(abs(c * unit_values[o] - TE_TARGETS[o]) / TE_TARGETS[o] for o in Orientation)

    best = min(CONTOUR_CANDIDATES, key=worst)
    deviations = {o: (best * unit_values[o] - TE_TARGETS[o]) / TE_TARGETS[o] for o in Orientation}
    if worst(best) > 0.05:
        raise CalibrationError(f"no candidate constant meets the 5% gate: {deviations}")
    logger.info(f"TE contour constant c={best} at omega_p z={omega_p_z:g}; deviations {deviations}")
    return CalibrationReport(best, omega_p_z, unit_values, deviations)


def write_calibration(report: CalibrationReport, path: Union[str, Path] = CALIBRATION_PATH) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("# Frozen constant of the real-axis plasma TE integral.\n")
        yaml.safe_dump(report.as_yaml_dict(), handle, sort_keys=False)
    _read_constant.cache_clear()
    return path


def shape_factor(query: Query, config: QuadratureConfig = DEFAULT_CONFIG) -> ShiftResult:
    """Route a query to its evaluation path."""
    model, z, orientation = query.model, query.z, query.orientation

    if isinstance(model, PerfectReflector):
        result = _result(closed_forms.perfect_reflector(orientation), 0.0, z, 0, 0,
                         EvaluationPath.CLOSED_FORM)
    elif isinstance(model, Plasma):
        tm = plasma_tm_imaginary(model.omega_p, z, orientation, config)
        te = plasma_te_real_axis(model.omega_p, z, orientation, config)
        total = tm.shape_factor + te.shape_factor
        logger.info(f"plasma {orientation.value} z={z:g}: S={total:.12g} "
                    f"(TM {tm.shape_factor:.6g}, TE {te.shape_factor:.6g})")
        result = _result(total, tm.err_estimate + te.err_estimate, z,
                         tm.diagnostics.function_evaluations + te.diagnostics.function_evaluations,
                         tm.diagnostics.subdivisions + te.diagnostics.subdivisions,
                         EvaluationPath.REAL_AXIS_TE_PLUS_IMAG_TM)
    else:
        result = shape_factor_imaginary(model, z, orientation, config)
        logger.info(f"{model.kind.value} {orientation.value} z={z:g}: S={result.shape_factor:.12g} "
                    f"(err {result.err_estimate:.2g})")
    return replace(result, query=query)
