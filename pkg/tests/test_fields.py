"""
Field tests: transforms, dyadic projections, mixed norms and the field file format.
"""
import math

import numpy as np
import pytest

from core.errors import DomainError
from core.fields import (
    apply_multiplier, band_bump, check_band, coherent_state, dyadic_piece, fourier_forward,
    fourier_inverse, load_field, lp_project, mixed_norm, save_field,
)
from models.grid import Grid, SampledField


@pytest.mark.unit
class TestGrid:
    """Test grid construction and lattice geometry."""

    def test_grid_properties(self, grid):
        """Test spacing, Nyquist frequency and lattice spacing."""
        assert grid.dx == 0.125
        assert grid.dxi == pytest.approx(2 * math.pi / 64)
        assert grid.nyquist == pytest.approx(8 * math.pi)
        assert grid.shape == (512,)

    def test_grid_rejects_non_dyadic_points(self):
        """Test point counts must be powers of two."""
        with pytest.raises(DomainError):
            Grid(1, 500, 64.0)

    def test_grid_rejects_dimension_three(self):
        """Test only d in {1, 2} is supported."""
        with pytest.raises(DomainError):
            Grid(3, 64, 64.0)

    def test_wrap_into_period(self, grid):
        """Test coordinate differences wrap into [-L/2, L/2)."""
        assert grid.wrap(40.0) == pytest.approx(-24.0)
        assert grid.wrap(-33.0) == pytest.approx(31.0)


@pytest.mark.unit
class TestFourier:
    """Test the continuous-normalized transform."""

    def test_plancherel(self, banded_field):
        """Test the transform preserves the L2 norm."""
        spectrum = fourier_forward(banded_field)
        assert spectrum.spectral is True
        assert spectrum.norm() == pytest.approx(banded_field.norm(), rel=1e-12)

    def test_inverse_restores_field(self, banded_field):
        """Test the inverse transform undoes the forward transform."""
        restored = fourier_inverse(fourier_forward(banded_field))
        assert (restored - banded_field).norm() <= 1e-12 * banded_field.norm()

    def test_forward_rejects_spectral_field(self, banded_field):
        """Test a spectral field cannot be transformed again."""
        with pytest.raises(DomainError):
            fourier_forward(fourier_forward(banded_field))


@pytest.mark.unit
class TestLittlewoodPaley:
    """Test dyadic projections and bumps."""

    def test_dyadic_pieces_sum_to_one(self):
        """Test the pieces j >= 1 partition unity for |xi| >= 2."""
        r = np.linspace(2.0, 1000.0, 997)
        total = sum(dyadic_piece(r, j) for j in range(1, 21))
        np.testing.assert_allclose(total, 1.0, atol=1e-14)

    def test_projection_band_outside_grid(self, grid, banded_field):
        """Test bands beyond Nyquist/2 are rejected."""
        with pytest.raises(DomainError, match='refine the grid'):
            lp_project(banded_field, 16.0)

    def test_projected_field_is_banded(self, banded_field):
        """Test projected noise keeps its mass in the band."""
        is_banded, fraction = check_band(banded_field)
        assert is_banded is True
        assert fraction == pytest.approx(1.0, abs=1e-12)

    def test_band_bump_l1_normalized(self, grid):
        """Test the scan datum has unit L1 norm."""
        bump = band_bump(grid, 4.0, normalize='l1')
        assert bump.norm(1.0) == pytest.approx(1.0, rel=1e-12)
        assert bump.band == 4.0

    def test_band_bump_unresolved(self, grid):
        """Test 4 lambda beyond Nyquist is rejected."""
        with pytest.raises(DomainError, match='does not resolve'):
            band_bump(grid, 8.0)

    def test_multiplier_one_is_identity(self, banded_field):
        """Test the unit multiplier leaves the field unchanged."""
        result = apply_multiplier(banded_field, np.ones(banded_field.grid.shape))
        np.testing.assert_allclose(result.values, banded_field.values, atol=1e-12)


@pytest.mark.unit
class TestFieldsAndNorms:
    """Test sampled fields, coherent states and mixed norms."""

    def test_field_shape_mismatch(self, grid):
        """Test samples must match the grid shape."""
        with pytest.raises(DomainError):
            SampledField(grid, np.zeros(100))

    def test_fields_on_different_grids(self, grid):
        """Test arithmetic across grids is rejected."""
        other = Grid(1, 256, 64.0)
        with pytest.raises(DomainError):
            SampledField(grid, np.zeros(512)) + SampledField(other, np.zeros(256))

    def test_coherent_state_unit_norm(self, grid):
        """Test the Gaussian packet is L2 normalized."""
        packet = coherent_state(grid, 1.0, 3.0)
        assert packet.norm() == pytest.approx(1.0, rel=1e-9)

    def test_sup_norm(self, grid):
        """Test q = inf gives the maximum modulus."""
        values = np.zeros(512)
        values[7] = -3.0
        assert SampledField(grid, values).norm(math.inf) == 3.0

    def test_trapezoid_mixed_norm_of_constant_series(self, banded_field):
        """Test a time-constant series over [0, 1] reproduces its L^q norm."""
        series = [banded_field] * 5
        for p in (1.0, 2.0, 4.0):
            value = mixed_norm(series, p, 2.0, 0.25, rule='trapezoid')
            assert value == pytest.approx(banded_field.norm(), rel=1e-12)

    def test_mixed_norm_infinite_time_exponent(self, banded_field):
        """Test p = inf takes the largest slice norm."""
        series = [banded_field, banded_field * 2.0]
        assert mixed_norm(series, math.inf, 2.0, 0.1) == pytest.approx(2 * banded_field.norm())

    def test_mixed_norm_empty_series(self):
        """Test an empty series is rejected."""
        with pytest.raises(DomainError):
            mixed_norm([], 2.0, 2.0, 0.1)


@pytest.mark.unit
class TestFieldFiles:
    """Test the flat binary field layout."""

    def test_save_and_load(self, tmp_path, banded_field):
        """Test header metadata and samples survive a file."""
        path = str(tmp_path / 'field.bin')
        save_field(path, banded_field)
        loaded = load_field(path)

        assert loaded.grid == banded_field.grid
        assert loaded.band == 4.0
        assert loaded.spectral is False
        np.testing.assert_array_equal(loaded.values, banded_field.values)

    def test_load_rejects_foreign_file(self, tmp_path):
        """Test a file without the field magic is rejected."""
        path = tmp_path / 'other.bin'
        path.write_bytes(b'XXXX' + bytes(64))
        with pytest.raises(DomainError):
            load_field(str(path))
