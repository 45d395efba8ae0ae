"""
Water-wave tests: surface symbols, paraproduct ladders, the good unknown and symbol-norm scans.
"""
import logging

import numpy as np
import pytest

from core.errors import DomainError
from core.fields import apply_multiplier
from core.waterwave import (
    build_symbols, dispersive_term, good_unknown, identity_report, paradiff_apply, paradiff_bound,
    ripple_surface, symbol_norm_scan, tilted_surface, transport_dispersive_rhs, transport_term,
)
from models.grid import Grid, SampledField
from models.surface import SurfaceData

XIS = np.linspace(1.0, 20.0, 9)[:, None]


def _flat(grid, V=None):
    return SurfaceData(grid, np.zeros(grid.shape), np.zeros(grid.shape), V=V)


@pytest.mark.unit
class TestSymbols:
    """Test lambda, ell, gamma and q on closed-form surfaces."""

    def test_flat_surface(self, grid):
        """Test lambda = |xi|, ell = xi^2, gamma = |xi|^(3/2) and q = 1 at eta = 0."""
        symbols = build_symbols(_flat(grid))
        magnitude = np.abs(XIS[:, 0])
        np.testing.assert_allclose(symbols.lam(XIS), np.broadcast_to(magnitude, (512, 9)), rtol=1e-15)
        np.testing.assert_allclose(symbols.ell(XIS), np.broadcast_to(magnitude ** 2, (512, 9)), rtol=1e-15)
        np.testing.assert_allclose(symbols.gamma(XIS), np.broadcast_to(magnitude ** 1.5, (512, 9)), rtol=1e-14)
        np.testing.assert_array_equal(symbols.q, 1.0)

    def test_line_lambda_is_modulus(self, grid):
        """Test lambda = |xi| exactly in d = 1 for any surface."""
        symbols = build_symbols(ripple_surface(grid, 0.05, 1.0))
        np.testing.assert_array_equal(symbols.lam(XIS), np.broadcast_to(XIS[:, 0], (512, 9)))

    def test_identities_on_line_ripple(self, grid):
        """Test gamma^2 = ell lambda, homogeneity and ell > 0 in d = 1."""
        report = identity_report(build_symbols(ripple_surface(grid, 0.05, 1.0)), XIS)
        assert report['gamma_squared_error'] <= 1e-12
        assert max(report['homogeneity_error'].values()) <= 1e-10
        assert report['ell_min'] > 0
        assert report['lambda_minus_xi_min'] == 0.0

    def test_identities_on_plane_ripple(self):
        """Test the pointwise identities in d = 2."""
        plane = Grid(2, 64, 64.0)
        xis = np.array([[3.0, 4.0], [1.0, -2.0], [0.0, 5.0]])
        report = identity_report(build_symbols(ripple_surface(plane, 0.05, 1.0)), xis)
        assert report['gamma_squared_error'] <= 1e-12
        assert max(report['homogeneity_error'].values()) <= 1e-10
        assert report['ell_min'] > 0
        assert report['lambda_minus_xi_min'] >= -1e-12

    def test_tilted_plane(self, grid):
        """Test ell = (1 + s^2)^(-3/2) xi^2 on a plane of slope s."""
        slope = 0.5
        symbols = build_symbols(tilted_surface(grid, slope))
        expected = (1 + slope ** 2) ** -1.5 * XIS[:, 0] ** 2
        np.testing.assert_allclose(symbols.ell(XIS), np.broadcast_to(expected, (512, 9)), rtol=1e-12)

    def test_surface_shape_mismatch(self, grid):
        """Test samples of the wrong shape are rejected."""
        with pytest.raises(DomainError):
            SurfaceData(grid, np.zeros(100), np.zeros(512))


@pytest.mark.unit
class TestParaproducts:
    """Test the dyadic paraproduct ladder."""

    def test_gamma_on_flat_surface(self, grid, banded_field):
        """Test T_gamma = |D|^(3/2) when eta = 0."""
        symbols = build_symbols(_flat(grid))
        reference = apply_multiplier(banded_field, grid.frequency_magnitude() ** 1.5)
        result = paradiff_apply(symbols.gamma, banded_field)
        assert (result - reference).norm() <= 1e-8 * reference.norm()

    def test_dispersive_term_and_rhs(self, grid, banded_field):
        """Test i T_gamma u and the full generator with V = 0."""
        surface = _flat(grid)
        reference = apply_multiplier(banded_field, 1j * grid.frequency_magnitude() ** 1.5)
        assert (dispersive_term(surface, banded_field) - reference).norm() <= 1e-8 * reference.norm()
        assert (transport_dispersive_rhs(surface, banded_field) - reference).norm() <= 1e-8 * reference.norm()

    def test_constant_transport(self, grid, banded_field):
        """Test T_V . grad u = c du for a constant velocity c."""
        surface = _flat(grid, V=np.full((1, 512), 0.5))
        reference = apply_multiplier(banded_field, 0.5j * grid.frequencies()[..., 0])
        result = transport_term(surface, banded_field)
        assert (result - reference).norm() <= 1e-10 * reference.norm()

    def test_constant_coefficient_bound(self, banded_field):
        """Test the measured constant of T_1 is one on a banded field."""
        info = paradiff_bound(1.0, banded_field)
        assert info['operator_ratio'] == pytest.approx(1.0, rel=1e-10)
        assert info['truncated_shells'] == []

    def test_truncated_ladder_is_reported(self, grid, rng, caplog):
        """Test noise reaching the Nyquist frequency reports the cut shells."""
        noise = SampledField(grid, rng.standard_normal(512))
        with caplog.at_level(logging.WARNING, logger='core.waterwave'):
            info = paradiff_bound(1.0, noise)
        assert 4 in info['truncated_shells']
        assert 'paraproduct ladder cut by Nyquist' in caplog.text

    def test_unknown_symbol_type(self, banded_field):
        """Test strings cannot be quantized."""
        with pytest.raises(DomainError):
            paradiff_apply('gamma', banded_field)

    def test_coefficient_shape_mismatch(self, banded_field):
        """Test coefficient arrays must match the grid."""
        with pytest.raises(DomainError):
            paradiff_apply(np.ones(100), banded_field)

    @pytest.mark.parametrize('frequency', [8.0, 16.0])
    def test_linear_coefficient_remainder(self, grid, frequency):
        """Test ||T_x u - x u|| <= ||g|| / k for a Gaussian packet u = e^{ikx} g."""
        x = grid.axis()
        envelope = np.exp(-x ** 2 / 2)
        wave = np.exp(1j * frequency * x) * envelope
        result = paradiff_apply(x.copy(), SampledField(grid, wave))
        remainder = (result - SampledField(grid, x * wave)).norm()
        assert remainder <= SampledField(grid, envelope).norm() / frequency


@pytest.mark.unit
class TestGoodUnknown:
    """Test u = T_p eta + i T_q (psi - T_B eta)."""

    def test_affine_in_potential(self, grid):
        """Test u depends affinely on psi at fixed eta."""
        x = grid.axis()
        eta = 0.02 * np.cos(40 * grid.dxi * x)
        psi = np.sin(20 * grid.dxi * x)

        def unknown(scale):
            return good_unknown(SurfaceData(grid, eta, scale * psi))

        step_one = unknown(1.0) - unknown(0.0)
        step_two = unknown(2.0) - unknown(1.0)
        assert (step_two - step_one).norm() <= 1e-12 * step_one.norm()

    @pytest.mark.parametrize('amplitude', [0.01, 0.02])
    def test_small_ripple_matches_half_derivative(self, grid, amplitude):
        """Test u = |D|^(1/2) eta up to O(eps^2) on a ripple at rest."""
        surface = ripple_surface(grid, amplitude, 4.0)
        u = good_unknown(surface)
        reference = apply_multiplier(SampledField(grid, surface.eta), grid.frequency_magnitude() ** 0.5)
        assert (u - reference).norm() <= 10 * amplitude ** 2


@pytest.mark.integration
class TestSymbolNormScan:
    """Test the band growth of the localized symbol norms."""

    def test_dispersive_exponents(self, grid):
        """Test gamma P_lambda scales like lambda^(3/2 - beta)."""
        surface = ripple_surface(grid, 0.05, 1.0)
        for beta, target in ((0, 1.5), (1, 0.5)):
            scan = symbol_norm_scan(surface, [16, 32, 64], beta=beta)
            assert scan.fit.exponent == pytest.approx(target, abs=1e-3)
            assert scan.passed is True

    def test_unknown_kind(self, grid):
        """Test kinds other than dispersive and transport are rejected."""
        with pytest.raises(DomainError):
            symbol_norm_scan(ripple_surface(grid, 0.05, 1.0), [16, 32], kind='capillary')
