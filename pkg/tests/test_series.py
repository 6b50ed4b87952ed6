import math
from fractions import Fraction

import numpy as np
import pytest

from squeezelab.algebra import CoefficientSeries, coefficients
from squeezelab.series import (
    compare_taylor_numeric,
    fit_exponential,
    root_test_sequence,
)


def synthetic_series(alpha, ms, n=0):
    entries = [(m, Fraction(math.exp(alpha * m))) for m in ms]
    return CoefficientSeries(n=n, entries=entries)


def test_fit_exact_exponential():
    series = synthetic_series(2.0, range(2, 21, 2))
    fit = fit_exponential(series)
    assert fit.alpha == pytest.approx(2.0, abs=1e-12)
    assert fit.radius == pytest.approx(math.exp(-2.0), rel=1e-12)
    assert fit.alpha_stderr < 1e-12
    assert fit.points_used == [12, 14, 16, 18, 20]


def test_fit_radius_alpha_relation():
    for series in (coefficients(3, 10), synthetic_series(0.7, range(2, 13, 2))):
        fit = fit_exponential(series)
        assert fit.radius * math.exp(fit.alpha) == pytest.approx(1.0, rel=1e-15)


def test_fit_reproduces_tri_squeezed_growth():
    fit = fit_exponential(coefficients(3, 20))
    assert 1.89 <= fit.alpha <= 2.01
    assert 0.124 <= fit.radius <= 0.151
    assert fit.points_used == [32, 34, 36, 38, 40]


def test_fit_reproduces_quadri_squeezed_growth():
    fit = fit_exponential(coefficients(4, 10))
    assert 3.1 <= fit.alpha <= 3.7
    assert 0.02 <= fit.radius <= 0.045


def test_fit_rejects_short_series():
    with pytest.raises(ValueError):
        fit_exponential(coefficients(1, 5))  # only one non-zero entry
    with pytest.raises(ValueError):
        fit_exponential(coefficients(3, 3), last_points=5)


def test_fit_rejects_negative_coefficients():
    entries = [(2, Fraction(1)), (4, Fraction(-1)), (6, Fraction(2)),
               (8, Fraction(3)), (10, Fraction(4))]
    with pytest.raises(ValueError, match="negative"):
        fit_exponential(CoefficientSeries(n=0, entries=entries))


def test_root_test_constant_series():
    entries = [(m, Fraction(1)) for m in range(2, 11, 2)]
    seq = root_test_sequence(CoefficientSeries(n=0, entries=entries))
    assert all(v == pytest.approx(1.0) for _, v in seq)


def test_root_test_two_photon_decays_to_zero():
    # sinh² is entire: |c_m|^(1/m) must decay towards zero
    seq = root_test_sequence(coefficients(2, 30))
    values = [v for _, v in seq]
    assert values[-1] < values[0]
    assert values[-1] < 1.0


def test_root_test_tri_squeezed_tracks_fitted_alpha():
    series = coefficients(3, 20)
    fit = fit_exponential(series)
    last = root_test_sequence(series)[-1]
    assert last[0] == 40
    assert abs(last[1] - math.exp(fit.alpha)) / math.exp(fit.alpha) < 0.15


def test_two_photon_late_window_slope_decreases():
    # infinite radius: the log-slope over late windows is eventually negative
    series = coefficients(2, 30)
    fit = fit_exponential(series, last_points=5)
    assert fit.alpha < 0


def test_compare_table_zero_row():
    table = compare_taylor_numeric(3, (500, 501), 5, [0.0])
    row = table.rows[0]
    assert row.numeric_N == 0.0
    assert row.numeric_Nprime == 0.0
    assert row.taylor == 0.0
    assert row.converged


def test_compare_inside_radius_converges():
    r_grid = np.arange(0, 0.0501, 0.01)
    table = compare_taylor_numeric(3, (2000, 2001), 20, r_grid)
    assert all(row.converged for row in table.rows)
    for row in table.rows:
        assert row.diff_num <= 1e-6
        assert row.diff_taylor <= 1e-6


def test_compare_beyond_radius_disagrees():
    table = compare_taylor_numeric(3, (3000, 3001), 20, [0.3])
    row = table.rows[0]
    assert not row.converged


def test_compare_two_photon_never_disagrees():
    r_grid = np.arange(0, 0.5001, 0.05)
    table = compare_taylor_numeric(2, (800, 801), 30, r_grid)
    assert all(row.converged for row in table.rows)
    assert table.first_disagreement_r is None


def test_compare_csv_schema_and_summary():
    table = compare_taylor_numeric(3, (500, 501), 5, [0.0, 0.01])
    lines = table.to_csv().strip().split("\n")
    assert lines[0] == "r,numeric_N,numeric_Nprime,taylor,diff_num,diff_taylor,converged"
    assert len(lines) == 3
    summary = table.summary(1e-6)
    assert summary["N_pair"] == [500, 501]
    assert summary["estimated_radius"] == pytest.approx(math.exp(-summary["alpha"]))
