"""
Estimate tests: exponent arithmetic, fits, time ladders, decay and Strichartz scans.
"""
import math
from fractions import Fraction

import numpy as np
import pytest

from core.errors import DomainError
from core.estimates import (
    admissible, dispersive_scan, exponent_bookkeeper, exponent_limits, fit_exponent,
    partition_mu_exponent, piecewise_mixed_norm, prefactor_exponent, regularity_window,
    strichartz_scan, time_ladder, truncation_sigma,
)
from core.symbols import make_fractional


@pytest.mark.unit
class TestAdmissibility:
    """Test the admissible pair condition 2/p + d/q = d/2."""

    def test_line_endpoint(self):
        """Test (4, inf) is admissible in d = 1."""
        assert admissible(4, math.inf, 1) is True

    def test_forbidden_endpoint(self):
        """Test (2, inf) is excluded in d = 2."""
        assert admissible(2, math.inf, 2) is False

    def test_plane_pair(self):
        """Test (4, 4) is admissible in d = 2."""
        assert admissible(4, 4, 2) is True

    def test_string_infinity(self):
        """Test 'inf' parses like float infinity."""
        assert admissible('4', 'inf', 1) is True

    def test_non_admissible(self):
        """Test (4, 4) fails the scaling condition in d = 1."""
        assert admissible(4, 4, 1) is False


@pytest.mark.unit
class TestExponentArithmetic:
    """Test exact rational bookkeeping."""

    def test_limits_at_r_two(self):
        """Test the one-sided limits r -> 2+ are 3/14 and 3/7."""
        assert exponent_limits(1).gain == Fraction(3, 14)
        assert exponent_limits(2).gain == Fraction(3, 7)

    def test_bookkeeper_requires_r_above_two(self):
        """Test r = 2 is rejected by the bookkeeper."""
        with pytest.raises(DomainError):
            exponent_bookkeeper(1, 2)

    def test_bookkeeper_at_five_halves(self):
        """Test the d = 1 table at r = 5/2."""
        table = exponent_bookkeeper(1, '5/2')
        assert table.gain == Fraction(1, 4)
        assert table.sigma == Fraction(1, 2)
        assert table.mu_exponent == Fraction(1, 2)
        assert table.derivative_loss == Fraction(1, 4)
        assert table.p == 4

    def test_references(self):
        """Test the constant-coefficient reference gains."""
        assert exponent_limits(1).references['constant_coefficient'] == Fraction(3, 8)
        assert exponent_limits(2).references['constant_coefficient'] == Fraction(3, 4)

    def test_table_rows(self):
        """Test rows start with a header and carry exact and float values."""
        rows = list(exponent_limits(1).rows())
        assert rows[0] == ['quantity', 'value', 'float']
        assert ['gain', '3/14', 3 / 14] in rows

    def test_truncation_sigma(self):
        """Test sigma = 2 / (2 + r)."""
        assert truncation_sigma(2) == Fraction(1, 2)

    def test_partition_exponent(self):
        """Test the Hölder partition exponent at m = 2 and r = 2."""
        assert partition_mu_exponent(2, 2) == 1

    def test_regularity_window(self):
        """Test s_min = d/2 + 2 - gain at the r -> 2+ gain."""
        window = regularity_window(1, 3, r='5/2')
        assert window['s_min'] == Fraction(16, 7)
        assert window['r_max'] == Fraction(19, 7)
        assert window['well_posed'] is True
        assert window['r_admissible'] is True
        assert window['paralinear_admissible'] is True


@pytest.mark.unit
class TestFitsAndLadders:
    """Test log-log fits and piecewise time grids."""

    def test_exact_power_law(self):
        """Test the fitted slope of y = 3 x^2."""
        fit = fit_exponent([1.0, 2.0, 4.0, 8.0], [3.0, 12.0, 48.0, 192.0])
        assert fit.exponent == pytest.approx(2.0, abs=1e-12)
        assert fit.residual == pytest.approx(0.0, abs=1e-12)

    def test_single_point_rejected(self):
        """Test one sample cannot be fitted."""
        with pytest.raises(DomainError):
            fit_exponent([1.0], [1.0])

    def test_time_ladder_segments(self):
        """Test the ladder 0, 8 lambda^-m, then factor-8 steps up to T."""
        segments = time_ladder(64.0, 1.5)
        assert len(segments) == 3
        assert all(len(times) == 33 for times in segments)
        assert segments[0][-1] == pytest.approx(1 / 64)
        assert segments[1][-1] == pytest.approx(1 / 8)
        assert segments[-1][-1] == 1.0

    def test_piecewise_norm_of_constant(self):
        """Test a constant series over [0, 1] reproduces the constant."""
        segments = time_ladder(64.0, 1.5)
        norms = [np.full(len(times), 2.0) for times in segments]
        assert piecewise_mixed_norm(segments, norms, 4.0) == pytest.approx(2.0, rel=1e-12)
        assert piecewise_mixed_norm(segments, norms, math.inf) == 2.0

    def test_piecewise_norm_empty(self):
        """Test an empty ladder is rejected."""
        with pytest.raises(DomainError):
            piecewise_mixed_norm([], [], 2.0)


@pytest.mark.integration
class TestDispersiveScan:
    """Test the t^(-d/2) decay of |D|^(3/2) evolutions."""

    def test_decay_slope_and_prefactor(self):
        """Test slopes near -1/2 and a prefactor growing no faster than lambda^0.35."""
        fits = []
        for band in (32.0, 64.0, 128.0):
            a = make_fractional(1.5, band)
            times = np.geomspace(16 * band ** -1.5, 1.0, 24)
            fit = dispersive_scan(a, times=times)
            assert abs(fit.slope + 0.5) <= 0.05
            fits.append(fit)
        assert prefactor_exponent(fits).exponent <= 0.35

    def test_times_before_threshold_rejected(self):
        """Test samples below lambda^-m are discarded and too few remain."""
        with pytest.raises(DomainError):
            dispersive_scan(make_fractional(1.5, 32.0), times=[1e-6, 1e-5])


@pytest.mark.integration
class TestStrichartzScan:
    """Test the fitted growth of the Strichartz ratio."""

    @pytest.mark.slow
    def test_fractional_growth_within_bound(self):
        """Test the (4, inf) ratio grows no faster than lambda^(2 delta / p)."""
        scan = strichartz_scan(lambda band: make_fractional(1.5, band), [16, 32, 64, 128], 4, math.inf)
        assert scan.bound_exponent == pytest.approx(0.125)
        assert scan.exponent <= 0.125 + 0.05
        assert scan.passed is True

    @pytest.mark.slow
    def test_schrodinger_control_has_no_growth(self):
        """Test m = 2 (delta = 0) gives a flat (4, inf) ratio over the bands."""
        scan = strichartz_scan(lambda band: make_fractional(2.0, band), [16, 32, 64, 128], 4, math.inf,
                               T=1.0 / 16.0)
        assert scan.bound_exponent == pytest.approx(0.0)
        assert scan.exponent <= 0.05
        assert scan.passed is True

    def test_too_few_bands(self):
        """Test scans need four bands."""
        with pytest.raises(DomainError):
            strichartz_scan(lambda band: make_fractional(1.5, band), [16, 32, 64], 4, math.inf)

    def test_non_admissible_pair(self):
        """Test non-admissible exponents are rejected before any evolution."""
        with pytest.raises(DomainError, match='not admissible'):
            strichartz_scan(lambda band: make_fractional(1.5, band), [16, 32, 64, 128], 4, 4)

    def test_unknown_forcing(self):
        """Test forcing modes other than none and constant are rejected."""
        with pytest.raises(DomainError):
            strichartz_scan(lambda band: make_fractional(1.5, band), [16, 32, 64, 128], 4, math.inf,
                            forcing='random')
