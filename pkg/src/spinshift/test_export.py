import json

import pytest

from spinshift.constants import PINNED
from spinshift.export import CSV_COLUMNS, ResultExporter, ShiftRequest, read_requests
from spinshift.kernel import shape_factor

HEADER = "model,orientation,z_nm,n,omega_p_eV,omega_T_eV,chi0,sqrt_chi0,S,delta_mu_over_muB,abs_err,path,fn_evals"


def _export(*requests):
    exporter = ResultExporter()
    for request in requests:
        exporter.add_result(request, shape_factor(request.to_query()))
    return exporter


def test_header_is_exact():
    assert ",".join(CSV_COLUMNS) == HEADER
    assert _export().to_csv().splitlines() == [HEADER]


def test_perfect_reflector_row():
    lines = _export(ShiftRequest("perfect", "perp", 10.0)).to_csv().splitlines()
    rel_shift = "%.17g" % PINNED.relative_shift(0.5, 10.0)
    assert lines == [HEADER, f"perfect,perp,10,,,,,,0.5,{rel_shift},0,ClosedForm,0"]


def test_vacuum_row_has_zero_shift():
    row = _export(ShiftRequest("nondispersive", "para", 2.0, n=1.0)).to_csv().splitlines()[1].split(",")
    record = dict(zip(CSV_COLUMNS, row))
    assert record["S"] == "0" and record["delta_mu_over_muB"] == "0"
    assert record["chi0"] == "0" and record["sqrt_chi0"] == "0"
    assert record["omega_p_eV"] == "" and record["path"] == "ImaginaryAxis"


def test_lorentz_row_reports_static_susceptibility():
    request = ShiftRequest("lorentz", "perp", 50.0, omega_p_eV=0.006, omega_T_eV=0.003)
    assert request.static_susceptibility() == pytest.approx(4.0)
    assert ShiftRequest("plasma", "perp", 1.0, omega_p_eV=1.0).static_susceptibility() is None


def test_csv_round_trip():
    requests = [
        ShiftRequest("perfect", "para", 10.0),
        ShiftRequest("nondispersive", "perp", 3.5, n=1.5),
        ShiftRequest("lorentz", "perp", 12.25, omega_p_eV=2.0, omega_T_eV=1.0),
    ]
    assert read_requests(_export(*requests).to_csv()) == requests


def test_read_requests_rejects_foreign_csv():
    with pytest.raises(ValueError):
        read_requests("a,b\n1,2\n")


def test_json_single_result():
    document = json.loads(_export(ShiftRequest("perfect", "perp", 10.0)).to_json({"format": "json"}))
    assert document["shape_factor"] == document["S"] == 0.5
    assert document["n"] is None
    assert document["constants"] == PINNED.as_dict()
    assert document["config"] == {"format": "json"}


def test_json_many_results():
    exporter = _export(ShiftRequest("perfect", "perp", 10.0), ShiftRequest("perfect", "para", 10.0))
    document = json.loads(exporter.to_json())
    assert [r["shape_factor"] for r in document["results"]] == [0.5, -0.5]
    assert set(document) == {"results", "constants", "config"}


def test_stats():
    exporter = _export(ShiftRequest("perfect", "perp", 10.0), ShiftRequest("nondispersive", "perp", 1.0, n=2.0))
    stats = exporter.get_stats()
    assert stats["rows"] == 2
    assert stats["paths"] == {"ClosedForm": 1, "ImaginaryAxis": 1}
    assert stats["function_evaluations"] > 0


def test_read_plain_request_list():
    requests = read_requests("model,orientation,z_nm,n\nnondispersive,para,5,1.5\nperfect,perp,10,\n")
    assert requests == [ShiftRequest("nondispersive", "para", 5.0, n=1.5), ShiftRequest("perfect", "perp", 10.0)]
