import pytest
from hypothesis import given
from hypothesis import strategies as st

from heliobubble.comparison import comparison_table, relative_shift


def test_every_row_matches_printed_value():
    rows = comparison_table()
    assert len(rows) == 14
    for row in rows:
        assert row.matches_printed, row.to_dict()


def test_worked_examples():
    assert relative_shift(-0.11, 547.05) == pytest.approx(-0.020, abs=0.001)
    assert relative_shift(61.0, 11270.0) == pytest.approx(0.541, abs=0.001)
    mg = [r for r in comparison_table() if r.species == "Mg"]
    assert [round(r.relative_shift, 3) for r in mg] == [-0.017, -0.012, -0.012]
    assert all(r.slope_sigma == 0.01 for r in mg)


def test_electron_rows_use_coarser_tolerance():
    e = [r for r in comparison_table() if r.species == "e-"]
    assert e and all(r.tolerance == 0.01 for r in e)
    assert all(r.tolerance == 0.001 for r in comparison_table() if r.species != "e-")


@pytest.mark.parametrize("lam", [0.0, -5.0])
def test_non_positive_wavelength(lam):
    with pytest.raises(ValueError):
        relative_shift(-0.1, lam)


@given(st.floats(-100, 100), st.floats(1.0, 2e4), st.floats(0.01, 100))
def test_relative_shift_homogeneous(slope, lam, k):
    # scaling slope and wavelength together leaves the relative shift unchanged
    assert relative_shift(k * slope, k * lam) == pytest.approx(relative_shift(slope, lam), rel=1e-12, abs=1e-300)
    assert relative_shift(-slope, lam) == -relative_shift(slope, lam)
