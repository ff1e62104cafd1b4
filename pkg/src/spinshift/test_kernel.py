import math

import numpy as np
import pytest
from scipy import integrate

from spinshift.closed_forms import nondispersive_closed, plasma_small_distance_signed
from spinshift.constants import PINNED
from spinshift.errors import CalibrationError, ConvergenceError, DomainError
from spinshift.kernel import (
    TE_TARGETS,
    EvaluationPath,
    Polarization,
    Query,
    ShiftResult,
    angular_finite_part,
    calibrate_te_contour_constant,
    integrand_imaginary,
    load_te_contour_constant,
    plasma_te_real_axis,
    plasma_te_rotated_truncated,
    plasma_tm_imaginary,
    shape_factor,
    shape_factor_imaginary,
    write_calibration,
)
from spinshift.export import ShiftRequest
from spinshift.materials import LorentzDielectric, NonDispersive, PerfectReflector, Plasma
from spinshift.orientation import Orientation
from spinshift.quadrature import DEFAULT_CONFIG, QuadratureConfig

PERP, PARA = Orientation.PERP, Orientation.PARA


def test_integrand_examples():
    assert integrand_imaginary(NonDispersive(1.0), PERP, 0.7, 2.0, 1.0) == 0.0
    assert integrand_imaginary(NonDispersive(2.0), PERP, 1.0, 1.0, 1.0) == pytest.approx(
        -math.exp(-2.0) / 15.0, rel=1e-14)
    assert integrand_imaginary(LorentzDielectric(2.0, 1.0), PARA, 0.0, 3.0, 1.0) == 0.0


def test_integrand_depends_on_u_over_z_only():
    model = LorentzDielectric(3.0, 0.5)
    a = integrand_imaginary(model, PARA, 0.8, 1.7, 2.0)
    b = integrand_imaginary(model.scaled(2.0), PARA, 0.8, 1.7, 1.0)
    assert a == pytest.approx(b, rel=1e-14)


def test_integrand_refuses_closed_form_and_divergent_sectors():
    with pytest.raises(DomainError):
        integrand_imaginary(PerfectReflector(), PERP, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        integrand_imaginary(Plasma(1.0), PERP, 1.0, 1.0, 1.0)
    tm_only = integrand_imaginary(Plasma(1.0), PERP, 1.0, 1.0, 1.0, polarizations=(Polarization.TM,))
    assert math.isfinite(tm_only)
    with pytest.raises(DomainError):
        integrand_imaginary(NonDispersive(2.0), PERP, 1.0, 0.5, 1.0)


@pytest.mark.parametrize("n", [1.1, 1.5, 2.0, 5.0, 10.0, 100.0])
@pytest.mark.parametrize("orientation", list(Orientation))
def test_quadrature_matches_closed_form(n, orientation):
    result = shape_factor(Query(NonDispersive(n), 1.0, orientation))
    assert result.shape_factor == pytest.approx(nondispersive_closed(n, orientation), rel=1e-6)
    assert result.diagnostics.path is EvaluationPath.IMAGINARY_AXIS
    assert result.err_estimate < 1e-6 * abs(result.shape_factor)


def test_vacuum_surface_gives_zero():
    result = shape_factor(Query(NonDispersive(1.0), 5.0, PERP))
    assert result.shape_factor == 0.0
    assert math.copysign(1.0, result.shape_factor) == 1.0
    assert result.rel_shift == 0.0


def test_non_dispersive_shape_factor_is_distance_free():
    near = shape_factor(Query(NonDispersive(2.0), 1.0, PERP))
    far = shape_factor(Query(NonDispersive(2.0), 2.0, PERP))
    assert abs(near.shape_factor - far.shape_factor) <= near.err_estimate + far.err_estimate
    assert near.rel_shift / far.rel_shift == pytest.approx(4.0, rel=1e-6)


def test_relative_shift_uses_pinned_constants():
    result = shape_factor(Query(PerfectReflector(), 10.0, PERP))
    assert result.rel_shift == PINNED.relative_shift(0.5, 10.0)
    assert result.rel_shift == pytest.approx(PINNED.alpha / (2 * math.pi) * 0.5 / (PINNED.electron_mass * 10.0) ** 2)


@pytest.mark.parametrize("c", [10.0, 100.0, 1000.0])
def test_lorentz_scaling_invariance(c):
    base = shape_factor(Query(LorentzDielectric(2.0, 1.0), 1.0, PERP)).shape_factor
    moved = shape_factor(Query(LorentzDielectric(2.0 * c, 1.0 * c), 1.0 / c, PERP)).shape_factor
    assert moved == pytest.approx(base, rel=1e-9)


def test_plasma_tm_scaling_invariance():
    base = plasma_tm_imaginary(0.5, 1.0, PARA).shape_factor
    assert plasma_tm_imaginary(50.0, 0.01, PARA).shape_factor == pytest.approx(base, rel=1e-9)


def test_perfect_reflector_dispatch():
    for orientation, expected in ((PERP, 0.5), (PARA, -0.5)):
        query = Query(PerfectReflector(), 3.0, orientation)
        result = shape_factor(query)
        assert result.shape_factor == expected
        assert result.err_estimate == 0.0
        assert result.diagnostics.path is EvaluationPath.CLOSED_FORM
        assert result.query == query


def test_imaginary_axis_refuses_other_models():
    with pytest.raises(DomainError):
        shape_factor_imaginary(Plasma(1.0), 1.0, PERP)
    with pytest.raises(DomainError):
        shape_factor_imaginary(PerfectReflector(), 1.0, PERP)


def test_query_validation():
    with pytest.raises(DomainError):
        Query(NonDispersive(2.0), 0.0, PERP)
    with pytest.raises(DomainError):
        Query(NonDispersive(2.0), float("nan"), PERP)
    with pytest.raises(DomainError):
        Query("glass", 1.0, PERP)
    assert Query(NonDispersive(2.0), 1.0, "para").orientation is PARA


def test_shift_result_has_no_negative_zero():
    result = ShiftResult(-0.0, -0.0, 0.0)
    assert math.copysign(1.0, result.shape_factor) == 1.0
    assert math.copysign(1.0, result.rel_shift) == 1.0


def test_plasma_tm_reaches_static_boundary_term():
    assert plasma_tm_imaginary(1e3, 1.0, PERP).shape_factor == pytest.approx(-0.75, rel=1e-3)
    assert plasma_tm_imaginary(1e3, 1.0, PARA).shape_factor == pytest.approx(-1.0, rel=2e-3)


@pytest.mark.parametrize("orientation", list(Orientation))
def test_plasma_small_distance(orientation):
    w = 1e-3
    result = shape_factor(Query(Plasma(w), 1.0, orientation))
    assert result.diagnostics.path is EvaluationPath.REAL_AXIS_TE_PLUS_IMAG_TM
    assert result.shape_factor < 0
    assert result.shape_factor == pytest.approx(plasma_small_distance_signed(w, orientation), rel=0.02)

    te = plasma_te_real_axis(w, 1.0, orientation).shape_factor
    tm = plasma_tm_imaginary(w, 1.0, orientation).shape_factor
    assert abs(te) < 0.1 * abs(tm)


@pytest.mark.parametrize("orientation", list(Orientation))
def test_plasma_te_calibration_targets(orientation):
    value = plasma_te_real_axis(1e2, 1.0, orientation).shape_factor
    assert value == pytest.approx(TE_TARGETS[orientation], rel=0.05)


@pytest.mark.parametrize("orientation, expected", [(PERP, 0.5), (PARA, -0.5)])
def test_plasma_approaches_perfect_reflector(orientation, expected):
    result = shape_factor(Query(Plasma(1e3), 1.0, orientation))
    assert result.shape_factor == pytest.approx(expected, rel=0.05)


def test_angular_finite_parts():
    assert angular_finite_part(PERP) == -5.0
    assert angular_finite_part(PARA) == -2.0


def test_calibration_reproduces_frozen_constant(tmp_path):
    report = calibrate_te_contour_constant()
    assert report.constant == load_te_contour_constant() == -1
    assert all(abs(d) <= 0.05 for d in report.deviations.values())

    path = write_calibration(report, tmp_path / "calibration.yml")
    assert load_te_contour_constant(path) == -1


@pytest.mark.parametrize("content", ["calibrated_at: {}\n", "te_contour_constant: 3\n"])
def test_invalid_calibration_file(tmp_path, content):
    path = tmp_path / "calibration.yml"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(CalibrationError):
        load_te_contour_constant(path)


def test_missing_calibration_file(tmp_path):
    with pytest.raises(CalibrationError):
        load_te_contour_constant(tmp_path / "absent.yml")


def test_rotated_plasma_te_grows_like_inverse_cutoff():
    coarse = plasma_te_rotated_truncated(1.0, 1.0, PERP, 1e-2).value
    fine = plasma_te_rotated_truncated(1.0, 1.0, PERP, 1e-3).value
    assert fine / coarse == pytest.approx(10.0, rel=0.2)
    # coefficient of the 1/cutoff growth, taken from the one-dimensional radial integral
    coefficient = 3.0 * integrate.quad(lambda x: x * x * math.exp(-2.0 * x) / (x + math.sqrt(1.0 + x * x)) ** 2,
                                       0.0, math.inf, epsabs=1e-14)[0]
    assert coefficient == pytest.approx(0.1174, abs=1e-4)
    assert abs(fine) * 1e-3 == pytest.approx(coefficient, rel=0.01)
    with pytest.raises(DomainError):
        plasma_te_rotated_truncated(1.0, 1.0, PERP, 0.0)


def test_large_susceptibility_lorentz_approaches_non_dispersive():
    # chi0 -> inf only meets the non-dispersive value when omega_T z is not small
    chi0 = 1e4
    reference = nondispersive_closed(math.sqrt(1.0 + chi0), PERP)
    deviations = []
    for omega_T_z in (0.02, 0.1, 1.0):
        lorentz = LorentzDielectric(math.sqrt(chi0) * omega_T_z, omega_T_z)
        s = shape_factor(Query(lorentz, 1.0, PERP)).shape_factor
        assert s < 0
        deviations.append(abs(s - reference) / abs(reference))
    assert deviations[0] > deviations[1] > deviations[2]
    assert deviations[2] <= 0.01


def test_exhausted_budget_raises():
    with pytest.raises(ConvergenceError):
        shape_factor(Query(LorentzDielectric(2.0, 0.02), 1.0, PERP), QuadratureConfig(max_subdivisions=1))


@pytest.mark.parametrize("orientation", list(Orientation))
def test_plasma_te_is_smooth_across_moderate_distances(orientation):
    grid = np.geomspace(50.0, 500.0, 7)
    values = [plasma_te_real_axis(w, 1.0, orientation).shape_factor for w in grid]
    share = 1.0 if orientation is PERP else 0.4
    for w, value in zip(grid, values):
        assert value == pytest.approx(share * (1.25 - 2.5 / w), abs=1e-2 * share)
    assert all(b > a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("z_nm", [10.0, 30.0])
def test_lorentz_small_omega_t_z_converges(z_nm):
    request = ShiftRequest("lorentz", "perp", z_nm, omega_p_eV=0.006, omega_T_eV=0.003)
    result = shape_factor(request.to_query())
    assert math.isfinite(result.shape_factor)
    assert result.shape_factor < 0
    assert result.err_estimate < 1e-6 * abs(result.shape_factor)


def test_lorentz_shift_grows_toward_the_surface():
    near = shape_factor(ShiftRequest("lorentz", "perp", 10.0, omega_p_eV=0.006, omega_T_eV=0.003).to_query())
    far = shape_factor(ShiftRequest("lorentz", "perp", 30.0, omega_p_eV=0.006, omega_T_eV=0.003).to_query())
    assert abs(near.shape_factor) > abs(far.shape_factor)
    assert abs(near.rel_shift) > abs(far.rel_shift)


def test_tighter_tolerance_never_loosens_the_error():
    query = Query(NonDispersive(2.0), 1.0, PARA)
    errors = [shape_factor(query, QuadratureConfig(rel_tol=rel)).err_estimate
              for rel in (1e-5, 1e-7, 1e-9)]
    assert errors[0] >= errors[1] >= errors[2]


@pytest.mark.parametrize("model", [NonDispersive(3.0), LorentzDielectric(0.04, 0.02)])
def test_halving_tolerances_leaves_the_value(model):
    base = shape_factor_imaginary(model, 1.0, PERP)
    tight = shape_factor_imaginary(model, 1.0, PERP, DEFAULT_CONFIG.tightened())
    allowance = max(base.err_estimate + tight.err_estimate, 1e-8 * abs(base.shape_factor))
    assert abs(base.shape_factor - tight.shape_factor) <= allowance


@pytest.mark.parametrize("u", [0.05, 0.5, 2.0])
def test_eta_tail_is_negligible(u):
    model = LorentzDielectric(0.04, 0.02)

    def density(eta):
        return integrand_imaginary(model, PARA, u, eta, 1.0)

    cut = 20.0 / u
    head = integrate.quad(density, 1.0, cut, limit=200, epsabs=0.0, epsrel=1e-12)[0]
    tail = integrate.quad(density, cut, math.inf, epsabs=0.0, epsrel=1e-8)[0]
    assert abs(tail) < 1e-10 * abs(head + tail)
