import math

import mpmath
import pytest

from spinshift.closed_forms import (
    GOLDEN_NS,
    GOLDEN_PATH,
    SeriesWindow,
    golden_rows,
    load_golden_table,
    nondispersive_closed,
    nondispersive_closed_mp,
    nondispersive_large_n,
    perfect_reflector,
    plasma_small_distance,
    plasma_small_distance_signed,
    series_coefficients,
    write_golden_table,
)
from spinshift.errors import DomainError
from spinshift.orientation import Orientation

PERP, PARA = Orientation.PERP, Orientation.PARA


def test_vacuum_gives_zero():
    assert nondispersive_closed(1.0, PERP) == 0.0
    assert nondispersive_closed(1.0, PARA) == 0.0
    assert nondispersive_closed_mp("1", PERP) == 0


def test_index_below_one_is_rejected():
    with pytest.raises(DomainError):
        nondispersive_closed(0.999, PERP)
    with pytest.raises(DomainError):
        nondispersive_closed_mp("0.5", PARA)


def test_leading_series_coefficients():
    assert series_coefficients(PERP)[0] == pytest.approx(-13.0 / 12.0, rel=1e-10)
    assert series_coefficients(PARA)[0] == pytest.approx(-5.0 / 4.0, rel=1e-10)


@pytest.mark.parametrize("orientation", list(Orientation))
def test_series_window_is_continuous(orientation):
    window = SeriesWindow()
    below = nondispersive_closed(window.n_switch * (1 - 1e-12), orientation, window)
    above = nondispersive_closed(window.n_switch * (1 + 1e-12), orientation, window)
    assert below == pytest.approx(above, rel=1e-8)


@pytest.mark.parametrize("orientation", list(Orientation))
def test_near_unity_is_linear_in_contrast(orientation):
    s = 1e-6
    value = nondispersive_closed(1.0 + s, orientation)
    assert value == pytest.approx(series_coefficients(orientation)[0] * s, rel=1e-5)
    assert abs(value) <= 1.5 * s


@pytest.mark.parametrize("n", ["1.1", "1.5", "2", "5", "10", "100", "1000"])
@pytest.mark.parametrize("orientation", list(Orientation))
def test_float_path_matches_high_precision(n, orientation):
    assert nondispersive_closed(float(n), orientation) == pytest.approx(
        float(nondispersive_closed_mp(n, orientation)), rel=1e-11)


def test_high_precision_is_stable_under_more_digits():
    assert abs(nondispersive_closed_mp("2", PERP, dps=50) - nondispersive_closed_mp("2", PERP, dps=70)) < 1e-45


def test_golden_values(golden_table):
    assert {n for n, _ in golden_table} == set(GOLDEN_NS)
    for n, orientation, value in golden_rows(golden_table):
        assert nondispersive_closed(n, orientation) == pytest.approx(value, rel=1e-11)


def test_packaged_golden_fixture_is_committed():
    assert GOLDEN_PATH.is_file()
    table = load_golden_table(GOLDEN_PATH)
    assert len(table) == 2 * len(GOLDEN_NS)
    # anchors computed independently at 100 digits
    anchors = {("2", PERP): "-0.83576706487751235098619175623912",
               ("100", PERP): "-49.564505916508322739695066441963",
               ("1000", PARA): "-83.846243132776097903192425042976"}
    with mpmath.workdps(60):
        for key, text in anchors.items():
            assert abs(table[key] - mpmath.mpf(text)) < mpmath.mpf("1e-30")


@pytest.mark.parametrize("orientation", list(Orientation))
def test_golden_values_decrease_with_index(golden_table, orientation):
    values = [value for _, o, value in golden_rows(golden_table) if o is orientation]
    assert all(b < a for a, b in zip(values, values[1:]))
    grid = [float(n) for n in GOLDEN_NS]
    closed = [nondispersive_closed(n, orientation) for n in grid]
    assert all(b < a for a, b in zip(closed, closed[1:]))
    dense = [nondispersive_closed(n, orientation) for n in [10 ** (k / 20.0) for k in range(61)]]
    assert all(b < a for a, b in zip(dense, dense[1:]))


def test_golden_table_round_trip(tmp_path):
    path = write_golden_table(tmp_path / "golden.csv", ns=("2", "10"), dps=30)
    assert path.read_text(encoding="utf-8").startswith("# ")
    table = load_golden_table(path)
    assert set(table) == {(n, o) for n in ("2", "10") for o in Orientation}
    with mpmath.workdps(40):
        assert abs(table["2", PARA] - nondispersive_closed_mp("2", PARA, dps=40)) < mpmath.mpf("1e-28")


def test_missing_golden_table(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_golden_table(tmp_path / "absent.csv")


def test_large_n_examples():
    assert nondispersive_large_n(100.0, PERP) == pytest.approx(-49.5)
    assert nondispersive_large_n(100.0, PARA) == pytest.approx(-(100.0 / 12.0 + 0.5))
    assert nondispersive_large_n(1e6, PERP) / nondispersive_large_n(1e6, PARA) == pytest.approx(6.0, rel=1e-5)


@pytest.mark.parametrize("orientation", list(Orientation))
def test_large_n_expansion_converges(orientation):
    ns = (1e2, 1e3, 1e4)
    relative = []
    for n in ns:
        exact = nondispersive_closed(n, orientation)
        gap = abs(exact - nondispersive_large_n(n, orientation))
        # the next order carries a logarithm: gap ~ ln(n) / n
        assert gap <= 20.0 * math.log(n) / n
        relative.append(gap / abs(exact))
    assert relative[0] > relative[1] > relative[2]
    assert relative[1] < 0.01


def test_non_dispersive_shift_never_reaches_perfect_reflector():
    for n in (10.0, 100.0, 1000.0):
        assert nondispersive_closed(n, PERP) < 0 < perfect_reflector(PERP)


def test_perfect_reflector_signs():
    assert perfect_reflector(PERP) == 0.5
    assert perfect_reflector(PARA) == -0.5


def test_plasma_small_distance_examples():
    assert plasma_small_distance(1e-3, PERP) == pytest.approx(555.36, rel=1e-5)
    assert plasma_small_distance(1e-3, PARA) == pytest.approx(1388.4, rel=1e-4)
    assert plasma_small_distance(2e-3, PARA) / plasma_small_distance(2e-3, PERP) == pytest.approx(2.5)
    with pytest.raises(DomainError):
        plasma_small_distance(0.0, PERP)


def test_signed_small_distance_asymptote():
    for orientation in Orientation:
        signed = plasma_small_distance_signed(1e-3, orientation)
        assert signed < 0
        assert signed == -plasma_small_distance(1e-3, orientation)
    with pytest.raises(DomainError):
        plasma_small_distance_signed(-1.0, PARA)


def test_series_window_validation():
    with pytest.raises(DomainError):
        SeriesWindow(n_switch=1.0)
    with pytest.raises(DomainError):
        SeriesWindow(series_order=0)
