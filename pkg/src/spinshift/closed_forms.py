"""
Closed forms - exact non-dispersive shape factors, large-n expansions,
perfect-reflector constants and plasma small-distance asymptotes.

All values are shape factors S, defined by Delta mu = e^3/(16 pi^2 m^3 z^2) S.
"""

import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import mpmath
import pandas as pd

from .errors import DomainError
from .orientation import Orientation

logger = logging.getLogger(__name__)

GOLDEN_PATH = Path(__file__).parent / "data" / "golden_nondispersive.csv"
GOLDEN_NS: Tuple[str, ...] = ("1.01", "1.1", "1.25", "1.5", "2", "3", "5", "10", "30", "100", "300", "1000")

# sqrt(n^4-1) * polynomial(n), coefficients of n^0 .. n^5
_POLYNOMIAL = {
    Orientation.PERP: (5, -2, 1, -2, -3, 1),
    Orientation.PARA: (26, -9, 8, -23, -3, 1),
}
_PREFACTOR = {Orientation.PERP: 2, Orientation.PARA: 12}


@dataclass(frozen=True)
class SeriesWindow:
    """Below n_switch the closed form is replaced by its Taylor series in n - 1."""
    n_switch: float = 1.0 + 1e-3
    series_order: int = 4

    def __post_init__(self):
        if not self.n_switch > 1.0:
            raise DomainError(f"n_switch must exceed 1, got {self.n_switch}")
        if self.series_order < 1:
            raise DomainError(f"series_order must be >= 1, got {self.series_order}")


def _closed(n, orientation: Orientation, lib):
    """Exact non-dispersive S from the math or mpmath namespace."""
    n2 = n * n
    n4 = n2 * n2
    s = n - 1
    root_four = lib.sqrt(s * (n + 1) * (n2 + 1))
    root_two = lib.sqrt(s * (n + 1))
    root_plus = lib.sqrt(1 + n2)
    # atanh((n-1) sqrt(1+n^2) / (1+(n-1)n)) written as a logarithm
    artanh_term = lib.log1p(s * (s + root_plus) / n)
    log_term = lib.acosh(n)
    polynomial = sum(c * n ** k for k, c in enumerate(_POLYNOMIAL[orientation]))
    tail = s * (n + 1) * root_plus ** 5 * log_term

    if orientation is Orientation.PERP:
        bracket = (root_four * polynomial
                   - n4 * root_two * (1 + 2 * n2) * artanh_term
                   + 2 * tail)
    else:
        bracket = (root_four * polynomial
                   + 3 * n4 * root_two * (2 - 3 * n2) * artanh_term
                   + 9 * tail)
    return -bracket / (_PREFACTOR[orientation] * root_four ** 3)


def nondispersive_closed_mp(n: Union[str, float, "mpmath.mpf"], orientation: Orientation,
                            dps: Optional[int] = 50) -> "mpmath.mpf":
    """Exact expression at ``dps`` decimal digits (current precision if None)."""
    orientation = Orientation(orientation)
    if dps is None:
        value = mpmath.mpf(n)
        if value < 1:
            raise DomainError(f"refractive index must satisfy n >= 1, got {n}")
        return mpmath.mpf(0) if value == 1 else _closed(value, orientation, mpmath)
    with mpmath.workdps(dps):
        return +nondispersive_closed_mp(n, orientation, dps=None)


@lru_cache(maxsize=None)
def series_coefficients(orientation: Orientation, order: int = 4) -> Tuple[float, ...]:
    """Taylor coefficients a_1 .. a_order of S in powers of (n - 1).

    Obtained by one-sided high-precision differentiation at n = 1, where the
    exact expression is 0/0.
    """
    orientation = Orientation(orientation)
    with mpmath.workdps(60):
        coefficients = mpmath.taylor(lambda n: nondispersive_closed_mp(n, orientation, dps=None),
                                     mpmath.mpf(1), order, singular=True, direction=1,
                                     h=mpmath.mpf(2) ** -80)
        result = tuple(float(c) for c in coefficients[1:])
    logger.debug(f"near-unity series ({orientation.value}): {result}")
    return result


def nondispersive_closed(n: float, orientation: Orientation,
                         window: SeriesWindow = SeriesWindow()) -> float:
    """Exact S for a non-dispersive surface of refractive index n >= 1."""
    orientation = Orientation(orientation)
    if not n >= 1:
        raise DomainError(f"refractive index must satisfy n >= 1, got {n}")
    if n == 1:
        return 0.0
    if n < window.n_switch:
        s = n - 1.0
        coefficients = series_coefficients(orientation, window.series_order)
        return sum(c * s ** (k + 1) for k, c in enumerate(coefficients))
    return float(_closed(float(n), orientation, math))


def nondispersive_large_n(n: float, orientation: Orientation) -> float:
    """Two-term large-n expansion (advisory for n >= 10)."""
    orientation = Orientation(orientation)
    if orientation is Orientation.PERP:
        return -(n - 1.0) / 2.0
    return -(n / 12.0 + 0.5)


def perfect_reflector(orientation: Orientation) -> float:
    return 0.5 if Orientation(orientation) is Orientation.PERP else -0.5


def plasma_small_distance(omega_p_z: float, orientation: Orientation) -> float:
    """Leading surface-plasmon term of the plasma shape factor, omega_p z << 1."""
    if not omega_p_z > 0:
        raise DomainError(f"omega_p z must be positive, got {omega_p_z}")
    base = math.pi / (4.0 * math.sqrt(2.0) * omega_p_z)
    return base if Orientation(orientation) is Orientation.PERP else 2.5 * base


def plasma_small_distance_signed(omega_p_z: float, orientation: Orientation) -> float:
    """Same leading term with the sign of the shape factor (the shift is negative)."""
    return -plasma_small_distance(omega_p_z, orientation)


# --- golden values -------------------------------------------------------------

def write_golden_table(path: Union[str, Path] = GOLDEN_PATH, ns: Iterable[str] = GOLDEN_NS,
                       dps: int = 50) -> Path:
    """Write the `n,orientation,S` fixture with dps-digit decimal strings."""
    rows = []
    for n in ns:
        for orientation in Orientation:
            value = nondispersive_closed_mp(n, orientation, dps=dps + 10)
            rows.append({"n": str(n), "orientation": orientation.value,
                         "S": mpmath.nstr(value, dps, min_fixed=-5, max_fixed=5)})
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"# non-dispersive shape factors, {dps} significant digits\n")
        pd.DataFrame(rows, columns=["n", "orientation", "S"]).to_csv(handle, index=False, lineterminator="\n")
    logger.info(f"wrote {len(rows)} golden values to {path}")
    return path


def load_golden_table(path: Union[str, Path] = GOLDEN_PATH) -> Dict[Tuple[str, Orientation], "mpmath.mpf"]:
    """Read the golden fixture into {(n, orientation): S}."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"golden fixture not found: {path} (run tools/make_golden.py)")
    frame = pd.read_csv(path, comment="#", dtype=str)
    missing = {"n", "orientation", "S"} - set(frame.columns)
    if missing:
        raise ValueError(f"golden fixture {path} lacks columns {sorted(missing)}")
    table = {}
    with mpmath.workdps(60):
        for row in frame.itertuples(index=False):
            table[row.n, Orientation(row.orientation)] = mpmath.mpf(row.S)
    return table


def golden_rows(table: Dict[Tuple[str, Orientation], "mpmath.mpf"]) -> List[Tuple[float, Orientation, float]]:
    """Fixture entries as (n, orientation, S) floats."""
    return [(float(n), orientation, float(value)) for (n, orientation), value in sorted(
        table.items(), key=lambda item: (float(item[0][0]), item[0][1].value))]
