"""
CSV/JSON export of shift results, and re-parsing of exported rows.
"""

import io
import json
import math
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from .constants import PINNED, PhysicalConstants
from .kernel import Query, ShiftResult
from .materials import model_from_name
from .orientation import Orientation

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["model", "orientation", "z_nm", "n", "omega_p_eV", "omega_T_eV", "chi0", "sqrt_chi0",
               "S", "delta_mu_over_muB", "abs_err", "path", "fn_evals"]
FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True)
class ShiftRequest:
    """Inputs of one shift evaluation exactly as given on the command line."""
    model: str
    orientation: str
    z_nm: float
    n: Optional[float] = None
    omega_p_eV: Optional[float] = None
    omega_T_eV: Optional[float] = None

    def to_query(self, constants: PhysicalConstants = PINNED) -> Query:
        omega_p = None if self.omega_p_eV is None else constants.ev_to_inverse_nm(self.omega_p_eV)
        omega_T = None if self.omega_T_eV is None else constants.ev_to_inverse_nm(self.omega_T_eV)
        model = model_from_name(self.model, n=self.n, omega_p=omega_p, omega_T=omega_T)
        return Query(model, self.z_nm, Orientation.parse(self.orientation))

    def static_susceptibility(self) -> Optional[float]:
        if self.model == "nondispersive" and self.n is not None:
            return (self.n - 1.0) * (self.n + 1.0)
        if self.model == "lorentz" and self.omega_p_eV is not None and self.omega_T_eV is not None:
            return (self.omega_p_eV / self.omega_T_eV) ** 2
        return None


def _nan_if_none(value: Optional[float]) -> float:
    return float("nan") if value is None else float(value)


def _none_if_nan(value) -> Optional[float]:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return value


class ResultExporter:
    """Collect (request, result) pairs and serialize them."""

    def __init__(self, constants: PhysicalConstants = PINNED):
        self.constants = constants
        self.records: List[Tuple[ShiftRequest, ShiftResult]] = []

    def add_result(self, request: ShiftRequest, result: ShiftResult):
        self.records.append((request, result))

    def add_batch(self, pairs: Sequence[Tuple[ShiftRequest, ShiftResult]]):
        for request, result in pairs:
            self.add_result(request, result)

    def _row(self, request: ShiftRequest, result: ShiftResult) -> Dict:
        chi0 = request.static_susceptibility()
        return {
            "model": request.model,
            "orientation": request.orientation,
            "z_nm": float(request.z_nm),
            "n": _nan_if_none(request.n),
            "omega_p_eV": _nan_if_none(request.omega_p_eV),
            "omega_T_eV": _nan_if_none(request.omega_T_eV),
            "chi0": _nan_if_none(chi0),
            "sqrt_chi0": _nan_if_none(None if chi0 is None else math.sqrt(chi0)),
            "S": result.shape_factor,
            "delta_mu_over_muB": result.rel_shift,
            "abs_err": result.err_estimate,
            "path": result.diagnostics.path.value,
            "fn_evals": int(result.diagnostics.function_evaluations),
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([self._row(*record) for record in self.records], columns=CSV_COLUMNS)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        self.to_frame().to_csv(buffer, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
        return buffer.getvalue()

    def to_json(self, run_config: Optional[Dict] = None) -> str:
        rows = []
        for request, result in self.records:
            row = {key: _none_if_nan(value) for key, value in self._row(request, result).items()}
            row["shape_factor"] = result.shape_factor
            rows.append(row)
        document: Dict = dict(rows[0]) if len(rows) == 1 else {"results": rows}
        document["constants"] = self.constants.as_dict()
        document["config"] = run_config or {}
        return json.dumps(document, indent=2, ensure_ascii=False) + "\n"

    def get_stats(self) -> Dict:
        paths = Counter(result.diagnostics.path.value for _, result in self.records)
        return {
            "rows": len(self.records),
            "paths": dict(paths),
            "function_evaluations": sum(r.diagnostics.function_evaluations for _, r in self.records),
        }


def read_requests(csv_text: str) -> List[ShiftRequest]:
    """Parse request rows, or exported result rows, back into ShiftRequests."""
    frame = pd.read_csv(io.StringIO(csv_text), dtype={"model": str, "orientation": str, "path": str},
                        float_precision="round_trip")
    missing = {"model", "orientation", "z_nm"} - set(frame.columns)
    if missing:
        raise ValueError(f"CSV lacks columns {sorted(missing)}")
    requests = []
    for row in frame.to_dict(orient="records"):
        requests.append(ShiftRequest(
            model=row["model"],
            orientation=row["orientation"],
            z_nm=float(row["z_nm"]),
            n=_none_if_nan(row.get("n")),
            omega_p_eV=_none_if_nan(row.get("omega_p_eV")),
            omega_T_eV=_none_if_nan(row.get("omega_T_eV")),
        ))
    return requests


def table_to_csv(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    return buffer.getvalue()


def table_to_records(frame: pd.DataFrame) -> List[Dict]:
    return [{key: _none_if_nan(value) for key, value in row.items()}
            for row in frame.to_dict(orient="records")]
