"""
Quadrature engines - adaptive semi-infinite integration for the imaginary
frequency path and regulated oscillatory integration with extrapolation for
the real-axis path.

The adaptive work is done by QUADPACK through ``scipy.integrate.quad``; this
module owns the variable maps, the breakpoint bookkeeping, the exp-sinh rule
and the regulator extrapolation.
"""

import math
import logging
from dataclasses import dataclass, field, replace, asdict
from enum import Enum
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from .errors import ConfigError, ConvergenceError, SpinShiftError

logger = logging.getLogger(__name__)

Number = Union[float, complex]


class EtaTransform(str, Enum):
    RECIPROCAL = "Reciprocal"
    RATIONAL_STRETCH = "RationalStretch"


class UTransform(str, Enum):
    EXP_WEIGHTED = "ExpWeighted"
    TANH_SINH = "TanhSinh"


DEFAULT_REGULATORS: Tuple[float, ...] = tuple(0.5 ** k for k in range(6))


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and transform choices shared by every engine."""
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    eta_transform: EtaTransform = EtaTransform.RECIPROCAL
    u_transform: UTransform = UTransform.EXP_WEIGHTED
    regulator_sequence: Tuple[float, ...] = field(default=DEFAULT_REGULATORS)
    extrapolation_order: int = 3

    def __post_init__(self):
        try:
            object.__setattr__(self, "eta_transform", EtaTransform(self.eta_transform))
            object.__setattr__(self, "u_transform", UTransform(self.u_transform))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "regulator_sequence",
                           tuple(float(d) for d in self.regulator_sequence))

        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ConfigError(f"tolerances must be positive (rel_tol={self.rel_tol}, abs_tol={self.abs_tol})")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ConfigError(f"max_subdivisions must be a positive integer, got {self.max_subdivisions}")
        regs = self.regulator_sequence
        if not regs or any(d <= 0 for d in regs) or any(b >= a for a, b in zip(regs, regs[1:])):
            raise ConfigError(f"regulator_sequence must be positive and strictly decreasing, got {regs}")
        if self.extrapolation_order < 1 or self.extrapolation_order >= len(regs):
            raise ConfigError(
                f"extrapolation_order must lie in [1, {len(regs) - 1}], got {self.extrapolation_order}")

    def inner(self) -> "QuadratureConfig":
        """Configuration for the inner integral of a nested pair."""
        return replace(self, rel_tol=0.1 * self.rel_tol, abs_tol=0.1 * self.abs_tol)

    def tightened(self, factor: float = 0.5) -> "QuadratureConfig":
        return replace(self, rel_tol=factor * self.rel_tol, abs_tol=factor * self.abs_tol)

    def with_overrides(self, **overrides) -> "QuadratureConfig":
        """Copy with the non-None overrides applied."""
        values = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **values) if values else self

    def as_dict(self) -> Dict:
        data = asdict(self)
        data["eta_transform"] = self.eta_transform.value
        data["u_transform"] = self.u_transform.value
        data["regulator_sequence"] = list(self.regulator_sequence)
        return data


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class QuadratureResult:
    """Integral estimate with its error bar and work counters.

    Unpacks as ``value, err = result``.
    """
    value: Number
    error: float
    evaluations: int = 0
    subdivisions: int = 0

    def __iter__(self) -> Iterator:
        yield self.value
        yield self.error


class _Counted:
    """Wraps an integrand and counts its calls."""

    def __init__(self, f: Callable[[float], Number]):
        self.f = f
        self.calls = 0

    def __call__(self, x: float) -> Number:
        self.calls += 1
        return self.f(x)


def _run_quad(h: Callable[[float], float], a: float, b: float, config: QuadratureConfig,
              label: str, **extra) -> Tuple[float, float, int]:
    """Call QUADPACK and turn its failure flags into ConvergenceError."""
    try:
        out = integrate.quad(h, a, b, epsabs=config.abs_tol, epsrel=config.rel_tol,
                             limit=config.max_subdivisions, full_output=1, **extra)
    except SpinShiftError:
        raise
    except ValueError as exc:
        # raised before integrating, e.g. more breakpoints than the subdivision limit allows
        raise ConvergenceError(f"{label}: {exc} (limit={config.max_subdivisions})") from None
    value, error, info = out[0], out[1], out[2]
    pieces = int(info.get("last", info.get("lst", 1)))
    if len(out) > 3:
        allowed = 10.0 * max(config.rel_tol * abs(value), config.abs_tol)
        message = " ".join(str(out[3]).split())
        # ier = 6 reports value = error = 0
        if "invalid" in message.lower():
            raise ConvergenceError(f"{label}: {message} (limit={config.max_subdivisions})")
        if not (math.isfinite(value) and error <= allowed):
            raise ConvergenceError(f"{label}: {message} (value={value:.6g}, err={error:.3g})")
        logger.warning(f"{label}: accepted with QUADPACK flag ({message}); err={error:.3g}")
    return value, error, pieces


def _interior_points(points: Sequence[float], lo: float, hi: float) -> List[float]:
    span = hi - lo
    inside = sorted({p for p in points if lo + 1e-14 * span < p < hi - 1e-14 * span})
    return inside


def _exp_weighted(f: _Counted, config: QuadratureConfig, breakpoints: Sequence[float],
                  scale: float) -> Tuple[float, float, int]:
    # u = -scale ln t maps (0, inf) onto (0, 1]; e^{-u/scale} becomes flat
    def h(t: float) -> float:
        if t <= 0.0:
            return 0.0
        return f(-scale * math.log(t)) * scale / t

    points = _interior_points([math.exp(-b / scale) for b in breakpoints if b > 0], 0.0, 1.0)
    extra = {"points": points} if points else {}
    return _run_quad(h, 0.0, 1.0, config, "semi-infinite", **extra)


def _exp_sinh(f: _Counted, config: QuadratureConfig, scale: float) -> Tuple[float, float, int]:
    """Exp-sinh trapezoid rule with step halving; error is the last increment."""
    half_pi = 0.5 * math.pi
    lo, hi = -4.5, 3.5
    step = 0.5
    budget = 21 * config.max_subdivisions

    def contribution(taus: np.ndarray) -> float:
        u = scale * np.exp(half_pi * np.sinh(taus))
        weights = u * half_pi * np.cosh(taus)
        values = np.fromiter((f(x) for x in u), dtype=float, count=len(u))
        return float(np.sum(weights * values))

    total = contribution(np.arange(lo, hi + 0.5 * step, step))
    estimate = step * total
    level = 0
    while True:
        level += 1
        step *= 0.5
        total += contribution(np.arange(lo + step, hi, 2.0 * step))
        previous, estimate = estimate, step * total
        error = abs(estimate - previous)
        if level >= 3 and error <= max(config.rel_tol * abs(estimate), config.abs_tol):
            return estimate, error, level
        if f.calls > budget or level >= 16:
            raise ConvergenceError(
                f"exp-sinh rule did not converge after {level} levels (err={error:.3g})")


def integrate_semi_infinite(f: Callable[[float], float], config: QuadratureConfig = DEFAULT_CONFIG,
                            breakpoints: Sequence[float] = (), scale: float = 1.0) -> QuadratureResult:
    """Integrate f over (0, inf).

    ``breakpoints`` are abscissae where f changes character; ``scale`` is the
    expected decay length of the exponential tail.
    """
    counted = _Counted(f)
    if config.u_transform is UTransform.TANH_SINH:
        value, error, pieces = _exp_sinh(counted, config, scale)
    else:
        value, error, pieces = _exp_weighted(counted, config, breakpoints, scale)
    return QuadratureResult(value, error, counted.calls, pieces)


def integrate_eta(f: Callable[[float], float], config: QuadratureConfig = DEFAULT_CONFIG,
                  breakpoints: Sequence[float] = (), scale: float = 1.0) -> QuadratureResult:
    """Integrate f over [1, inf) after mapping onto a finite interval."""
    counted = _Counted(f)

    if config.eta_transform is EtaTransform.RECIPROCAL:
        def h(t: float) -> float:
            if t <= 0.0:
                return 0.0
            return counted(1.0 / t) / (t * t)

        points = [1.0 / b for b in breakpoints if b > 1.0]
    else:
        def h(t: float) -> float:
            if t >= 1.0:
                return 0.0
            gap = 1.0 - t
            return counted(1.0 + scale * t / gap) * scale / (gap * gap)

        points = [(b - 1.0) / (b - 1.0 + scale) for b in breakpoints if b > 1.0]

    points = _interior_points(points, 0.0, 1.0)
    extra = {"points": points} if points else {}
    value, error, pieces = _run_quad(h, 0.0, 1.0, config, "eta", **extra)
    return QuadratureResult(value, error, counted.calls, pieces)


def neville_at_zero(deltas: Sequence[float], values: Sequence[Number]) -> List[List[Number]]:
    """Neville tableau of the interpolating polynomials evaluated at zero.

    ``tableau[i][j]`` uses the points ``i-j .. i``.
    """
    xs = list(deltas)
    tableau: List[List[Number]] = [[v] for v in values]
    for i in range(1, len(xs)):
        for j in range(1, i + 1):
            lo = i - j
            upper = tableau[i][j - 1]
            lower = tableau[i - 1][j - 1]
            tableau[i].append((xs[i] * lower - xs[lo] * upper) / (xs[i] - xs[lo]))
    return tableau


def _lebesgue_at_zero(xs: Sequence[float]) -> float:
    total = 0.0
    for i, xi in enumerate(xs):
        weight = 1.0
        for j, xj in enumerate(xs):
            if j != i:
                weight *= xj / (xj - xi)
        total += abs(weight)
    return total


def _fourier_segments(kink: Optional[float]) -> List[Tuple[float, float]]:
    if kink is None or not kink > 0:
        return [(0.0, np.inf)]
    return [(0.0, kink), (kink, np.inf)]


def _regulated(g: _Counted, phase_rate: float, delta: float, config: QuadratureConfig,
               scale: float, kink: Optional[float] = None) -> Tuple[complex, float, int]:
    """int_0^inf g(k) e^{i phase_rate k} e^{-delta k} dk through QUADPACK Fourier weights.

    With a ``kink`` the range is split there: QAWO on [0, kink], QAWF above.
    """
    fourier = replace(config, abs_tol=max(config.abs_tol, config.rel_tol * scale))
    damped_re = lambda k: g(k).real * math.exp(-delta * k)
    damped_im = lambda k: g(k).imag * math.exp(-delta * k)
    parts: Dict[Tuple[str, str], List[float]] = {}
    pieces = 0
    for lo, hi in _fourier_segments(kink):
        extra = {"limlst": 200} if math.isinf(hi) else {"maxp1": 100}
        for name, fn in (("re", damped_re), ("im", damped_im)):
            for weight in ("cos", "sin"):
                value, error, used = _run_quad(fn, lo, hi, fourier, f"fourier-{weight} [{lo:g}, {hi:g}]",
                                               weight=weight, wvar=phase_rate, **extra)
                total = parts.setdefault((name, weight), [0.0, 0.0])
                total[0] += value
                total[1] += error
                pieces += used
    real = parts["re", "cos"][0] - parts["im", "sin"][0]
    imag = parts["re", "sin"][0] + parts["im", "cos"][0]
    error = sum(p[1] for p in parts.values())
    return complex(real, imag), error, pieces


def integrate_oscillatory(g: Callable[[float], Number], phase_rate: float,
                          config: QuadratureConfig = DEFAULT_CONFIG,
                          regulator_unit: Optional[float] = None,
                          scale: float = 1.0, kink: Optional[float] = None) -> QuadratureResult:
    """lim_{delta->0} int_0^inf g(k) e^{i phase_rate k} e^{-delta k} dk.

    Regulators are ``regulator_sequence`` times ``regulator_unit`` (default
    ``2 / phase_rate``, the inverse distance for phase_rate = 2z). ``scale``
    is the expected magnitude of the result and sets the absolute tolerance
    of the Fourier integrals. ``kink`` is an abscissa where g is not smooth
    (a square-root branch point); the range is split there.
    """
    counted = _Counted(g)

    if phase_rate == 0.0:
        value, error, pieces = 0j, 0.0, 0
        for lo, hi in _fourier_segments(kink):
            re, re_err, re_pieces = _run_quad(lambda k: complex(counted(k)).real, lo, hi, config, "decay-re")
            im, im_err, im_pieces = _run_quad(lambda k: complex(counted(k)).imag, lo, hi, config, "decay-im")
            value += complex(re, im)
            error += re_err + im_err
            pieces += re_pieces + im_pieces
        return QuadratureResult(value, error, counted.calls, pieces)
    if phase_rate < 0:
        raise ConfigError(f"phase_rate must be >= 0, got {phase_rate}")

    unit = regulator_unit if regulator_unit is not None else 2.0 / phase_rate
    complex_g = _Counted(lambda k: complex(counted(k)))
    order = config.extrapolation_order
    deltas = [m * unit for m in config.regulator_sequence][-(order + 1):]

    values, quad_errors, pieces = [], [], 0
    for delta in deltas:
        value, error, used = _regulated(complex_g, phase_rate, delta, config, scale, kink)
        values.append(value)
        quad_errors.append(error)
        pieces += used
        logger.debug(f"regulated integral delta={delta:.4g}: {value:.12g} (err {error:.2g})")

    tableau = neville_at_zero(deltas, values)
    estimate = tableau[order][order]
    diagonal = [abs(tableau[j][j] - tableau[j - 1][j - 1]) for j in range(1, order + 1)]
    spread = max(abs(estimate - tableau[order][order - 1]), diagonal[-1])
    noise_floor = 100.0 * max(config.abs_tol, config.rel_tol * abs(estimate), max(quad_errors))
    if order >= 2 and diagonal[-1] > diagonal[-2] and diagonal[-1] > noise_floor:
        raise ConvergenceError(
            f"regulator extrapolation does not contract: stage differences {diagonal}")

    error = spread + _lebesgue_at_zero(deltas) * max(quad_errors)
    return QuadratureResult(estimate, error, counted.calls, pieces)
