import json

import pytest

from spinshift import __version__
from spinshift.cli import CHECKS_FAILED_EXIT, emit, parse_units, run
from spinshift.closed_forms import nondispersive_closed
from spinshift.config import RunConfig, build_run_config, read_config_file
from spinshift.constants import PINNED
from spinshift.errors import ConfigError, UsageError
from spinshift.export import ShiftRequest
from spinshift.kernel import shape_factor
from spinshift.orientation import Orientation

PERFECT = ["shift", "--model", "perfect", "--z", "10", "--orientation", "perp", "--no-progress"]


def _error_line(capsys):
    lines = capsys.readouterr().err.strip().splitlines()
    return lines[-1]


def test_parse_units():
    assert parse_units("1", "eV") == pytest.approx(1.0 / 197.3269804)
    assert parse_units("10", "nm") == 10.0
    assert parse_units("0.02") == 0.02
    with pytest.raises(UsageError):
        parse_units("ten", "nm")
    with pytest.raises(UsageError):
        parse_units("inf", "eV")
    with pytest.raises(ValueError):
        parse_units("1", "kg")


def test_shift_csv(capsys):
    assert run(PERFECT) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("model,orientation,z_nm")
    assert out[1].startswith("perfect,perp,10,,,,,,0.5,")
    assert len(out) == 2


def test_shift_json(capsys):
    argv = ["shift", "--model", "nondispersive", "--n", "2", "--z", "5", "--orientation", "para",
            "--format", "json", "--no-progress"]
    assert run(argv) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["shape_factor"] == pytest.approx(nondispersive_closed(2.0, Orientation.PARA), rel=1e-6)
    assert document["path"] == "ImaginaryAxis"
    assert document["constants"]["hbar_c"] == PINNED.hbar_c
    assert document["config"]["quadrature"]["rel_tol"] == 1e-8


def test_version(capsys):
    assert run(["--version"]) == 0
    out = capsys.readouterr().out
    assert out.startswith(f"spinshift {__version__}")
    assert "te_contour_constant: -1" in out
    assert "hbar_c: 197.3269804" in out


@pytest.mark.parametrize("argv, code, kind", [
    ([], 1, "usage"),
    (["shift", "--model", "perfect", "--orientation", "perp"], 1, "usage"),
    (["shift", "--model", "glass", "--z", "1", "--orientation", "perp"], 1, "usage"),
    (["shift", "--model", "perfect", "--z", "ten", "--orientation", "perp"], 1, "usage"),
    (["shift", "--model", "nondispersive", "--n", "0.5", "--z", "1", "--orientation", "perp"], 3, "domain"),
    (["shift", "--model", "lorentz", "--omega-p", "0.006", "--z", "1", "--orientation", "perp"], 3, "domain"),
    (["shift", "--model", "perfect", "--z", "-1", "--orientation", "perp"], 3, "domain"),
    (PERFECT + ["--threads", "many"], 1, "config"),
    (PERFECT + ["--rel-tol", "-1"], 1, "config"),
])
def test_errors_map_to_exit_codes(capsys, argv, code, kind):
    assert run(argv) == code
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err.strip().splitlines()[-1].startswith(f"spinshift: error={kind} code={code} reason=")


def test_config_file_with_flag_override(tmp_path, capsys):
    path = tmp_path / "spinshift.conf"
    path.write_text("rel_tol = 1e-6\nformat: json\nthreads = 2  # workers\n", encoding="utf-8")
    assert run(PERFECT + ["--config", str(path)]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["config"]["quadrature"]["rel_tol"] == 1e-6
    assert document["config"]["threads"] == 2

    assert run(PERFECT + ["--config", str(path), "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("model,")


def test_unknown_config_key(tmp_path, capsys):
    path = tmp_path / "bad.conf"
    path.write_text("tolerance: 1e-6\n", encoding="utf-8")
    assert run(PERFECT + ["--config", str(path)]) == 1
    assert "error=config" in _error_line(capsys)


def test_read_config_file(tmp_path):
    path = tmp_path / "c.yml"
    path.write_text("eta_transform = RationalStretch\nregulator_sequence: [1.0, 0.5, 0.25]\n", encoding="utf-8")
    values = read_config_file(path)
    config = build_run_config(values, {"extrapolation_order": 2})
    assert config.quadrature.eta_transform.value == "RationalStretch"
    assert config.quadrature.regulator_sequence == (1.0, 0.5, 0.25)
    assert config.quadrature.extrapolation_order == 2
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "absent.yml")


def test_run_config_defaults_and_workers():
    config = build_run_config()
    assert config == RunConfig()
    assert config.workers == 1
    assert build_run_config(overrides={"threads": "auto"}).workers >= 1
    assert build_run_config(overrides={"regulator_sequence": "1, 0.5, 0.25, 0.125"}).quadrature.regulator_sequence == (
        1.0, 0.5, 0.25, 0.125)
    with pytest.raises(ConfigError):
        build_run_config(overrides={"format": "xml"})


def test_sweep_command(capsys):
    argv = ["sweep", "--family", "nondispersive", "--chi0", "0:8:3", "--orientation", "perp", "--no-progress"]
    assert run(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "chi0,sqrt_chi0,S_dispersive,S_nondispersive,err_d,err_n,flag"
    assert len(lines) == 4
    assert lines[1].startswith("0,0,,0,")


def test_sweep_rejects_malformed_range(capsys):
    assert run(["sweep", "--chi0", "0:8", "--orientation", "perp", "--omega-t-z", "0.02"]) == 1
    assert "error=usage" in _error_line(capsys)


def test_limits_command(capsys):
    assert run(["limits", "--experiment", "NonDispersiveDistancePower", "--no-progress"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "z_nm,S,delta_mu_scaled"
    assert out.rstrip().endswith("[PASS]")


@pytest.mark.slow
def test_verify_fast(capsys):
    code = run(["verify", "--fast", "--no-progress"])
    out = capsys.readouterr().out
    assert out.count(" SKIP ") == 2
    assert code == 0, out


def test_emit_formats():
    request = ShiftRequest("perfect", "para", 10.0)
    records = [(request, shape_factor(request.to_query()))]
    assert emit(records).splitlines()[1].startswith("perfect,para,10,,,,,,-0.5,")
    document = json.loads(emit(records, "json", {"threads": 1}))
    assert document["shape_factor"] == -0.5
    assert document["config"] == {"threads": 1}
    with pytest.raises(UsageError):
        emit(records, "xml")


def test_verify_failure_has_its_own_exit_code(monkeypatch, capsys):
    from spinshift import acceptance

    monkeypatch.setattr(acceptance, "CHECKS", [("always_fails", lambda config, fast: (False, "forced"))])
    code = run(["verify", "--fast", "--no-progress"])
    out = capsys.readouterr().out
    assert code == CHECKS_FAILED_EXIT == 4
    assert "always_fails" in out


def test_lorentz_example_near_the_surface(capsys):
    argv = ["shift", "--model", "lorentz", "--omega-p", "0.006", "--omega-t", "0.003", "--z", "30",
            "--orientation", "perp", "--no-progress"]
    assert run(argv) == 0
    row = capsys.readouterr().out.splitlines()[1]
    assert row.startswith("lorentz,perp,30,")


def test_exhausted_subdivision_budget_exits_with_convergence_code(capsys):
    argv = ["shift", "--model", "lorentz", "--omega-p", "0.006", "--omega-t", "0.003", "--z", "30",
            "--orientation", "perp", "--max-subdivisions", "1", "--no-progress"]
    assert run(argv) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err.strip().splitlines()[-1].startswith("spinshift: error=convergence code=2 reason=")
