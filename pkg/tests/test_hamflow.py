"""
Hamilton flow tests against the harmonic-oscillator rotation.
"""
import math

import numpy as np
import pytest

from core.errors import DomainError
from core.hamflow import (
    bilipschitz_estimate, flow_determinant, flow_integrate, flow_integrated_constants, flow_map,
    symplectic_jacobian, variational_flow,
)
from core.symbols import make_fractional, make_harmonic, make_zero, rescale


@pytest.mark.unit
class TestTrajectories:
    """Test bicharacteristics of closed-form symbols."""

    def test_harmonic_rotation(self):
        """Test (x^t, xi^t) is the rotation of (x, xi) by angle t."""
        x0, xi0 = 1.0, 0.5
        series = flow_integrate(make_harmonic(), (x0, xi0), 1.0, step=1e-3)
        final = series.final

        assert series.flagged is False
        assert final.t == pytest.approx(1.0)
        assert abs(final.x[0] - (x0 * math.cos(1.0) + xi0 * math.sin(1.0))) < 1e-6
        assert abs(final.xi[0] - (-x0 * math.sin(1.0) + xi0 * math.cos(1.0))) < 1e-6

    def test_zero_symbol_is_stationary(self):
        """Test a = 0 leaves every point fixed."""
        series = flow_integrate(make_zero(), (2.0, -3.0), 0.5)
        np.testing.assert_array_equal(series.positions, 2.0)
        np.testing.assert_array_equal(series.frequencies, -3.0)

    def test_x_independent_frequency_is_conserved(self):
        """Test xi^t = xi exactly and x^t moves with the group velocity."""
        series = flow_integrate(make_fractional(1.5, 64.0), (0.0, 64.0), 1.0)
        np.testing.assert_array_equal(series.frequencies, 64.0)
        assert series.final.x[0] == pytest.approx(1.5 * 8.0, rel=1e-6)

    def test_initial_frequency_outside_shell(self):
        """Test initial frequencies far outside the band are rejected."""
        with pytest.raises(DomainError, match='outside'):
            flow_integrate(make_fractional(1.5, 64.0), (0.0, 1.0), 1.0)

    def test_flow_map_images(self):
        """Test flow_map returns the rotated images."""
        images = flow_map(make_harmonic(), [[1.0, 0.0], [0.0, 1.0]], math.pi / 2)
        np.testing.assert_allclose(images[0], [0.0, -1.0], atol=1e-6)
        np.testing.assert_allclose(images[1], [1.0, 0.0], atol=1e-6)


@pytest.mark.unit
class TestVariationalFlow:
    """Test the variational matrices X = dx/dxi and Xi = dxi/dxi."""

    def test_initial_matrices_are_exact(self):
        """Test X(0) = 0 and Xi(0) = I exactly."""
        bundle = variational_flow(make_harmonic(), (1.0, 0.0), 1.0)
        assert bundle.X[0, 0, 0] == 0.0
        assert bundle.Xi[0, 0, 0] == 1.0

    def test_harmonic_matrices(self):
        """Test X(t) = sin t and Xi(t) = cos t."""
        bundle = variational_flow(make_harmonic(), (1.0, 0.0), 1.0, step=1e-3)
        assert abs(bundle.X[-1, 0, 0] - math.sin(1.0)) < 1e-6
        assert abs(bundle.Xi[-1, 0, 0] - math.cos(1.0)) < 1e-6

    def test_determinant_at_quarter_period(self):
        """Test det X(pi/2) = 1 for the oscillator."""
        bundle = variational_flow(make_harmonic(), (0.5, 0.5), math.pi / 2, step=1e-3)
        assert flow_determinant(bundle, math.pi / 2) == pytest.approx(1.0, abs=1e-6)

    def test_determinant_beyond_bundle(self):
        """Test times past the integrated span are rejected."""
        bundle = variational_flow(make_harmonic(), (0.5, 0.5), 0.5)
        with pytest.raises(DomainError):
            flow_determinant(bundle, 1.0)

    def test_bundle_constants(self):
        """Test the reported constants for the oscillator."""
        bundle = variational_flow(make_harmonic(), (1.0, 0.0), 1.0)
        constants = bundle.constants
        assert constants['sup_X_plus_sup_Xi'] == pytest.approx(math.sin(1.0) + 1.0, abs=1e-6)
        assert constants['Xi_deviation_margin'] >= -1e-6

    def test_rows_carry_determinant(self):
        """Test trajectory rows are (t, x, xi, detX)."""
        bundle = variational_flow(make_harmonic(), (1.0, 0.0), 0.1)
        rows = list(bundle.rows())
        assert rows[0] == [0.0, 1.0, 0.0, 0.0]
        assert len(rows[-1]) == 4

    @pytest.mark.parametrize('symbol, init', [
        (make_harmonic(), (1.0, 0.5)),
        (make_fractional(1.5, 64.0), (0.0, 64.0)),
    ])
    def test_matrices_match_frequency_differences(self, symbol, init):
        """Test X(1) and Xi(1) agree with central differences of the flow in xi0."""
        h = 1e-2
        x0, xi0 = init
        plus = flow_integrate(symbol, (x0, xi0 + h), 1.0).final
        minus = flow_integrate(symbol, (x0, xi0 - h), 1.0).final
        bundle = variational_flow(symbol, init, 1.0)
        dx = float(np.ravel(plus.x)[0] - np.ravel(minus.x)[0]) / (2 * h)
        dxi = float(np.ravel(plus.xi)[0] - np.ravel(minus.xi)[0]) / (2 * h)
        assert bundle.X[-1, 0, 0] == pytest.approx(dx, rel=1e-4)
        assert bundle.Xi[-1, 0, 0] == pytest.approx(dxi, rel=1e-4)

    def test_rescaled_determinant_at_unit_time(self):
        """Test det X(1) of the rescaled |xi|^(3/2) flow from its band is 3/4, above 1/2."""
        rescaled = rescale(make_fractional(1.5, 64.0), 0.25)
        bundle = variational_flow(rescaled, (0.0, rescaled.band), 1.0)
        determinant = flow_determinant(bundle, 1.0)
        assert determinant == pytest.approx(0.75, rel=1e-6)
        assert determinant >= 0.5


@pytest.mark.unit
class TestFlowMapGeometry:
    """Test bilipschitz and symplectic properties."""

    def test_harmonic_flow_is_isometric(self):
        """Test L- = L+ = 1 for a rotation."""
        samples = [[0.0, 1.0], [1.0, 0.0], [0.5, -0.5], [2.0, 3.0]]
        lower, upper = bilipschitz_estimate(make_harmonic(), samples, 1.0)
        assert lower == pytest.approx(1.0, abs=1e-6)
        assert upper == pytest.approx(1.0, abs=1e-6)

    def test_bilipschitz_needs_two_samples(self):
        """Test a single sample is rejected."""
        with pytest.raises(DomainError):
            bilipschitz_estimate(make_harmonic(), [[0.0, 1.0]], 1.0)

    def test_jacobian_is_symplectic(self):
        """Test the flow-map Jacobian has unit determinant."""
        jacobian = symplectic_jacobian(make_harmonic(), [1.0, 0.5], 1.0)
        assert np.linalg.det(jacobian) == pytest.approx(1.0, abs=1e-5)


@pytest.mark.unit
class TestIntegratedConstants:
    """Test time integrals of symbol derivatives along the flow."""

    def test_harmonic_from_unit_position(self):
        """Test the oscillator integrals from (1, 0) over unit time."""
        constants = flow_integrated_constants(make_harmonic(), [[1.0, 0.0]], max_order=2, t_span=1.0, step=1e-3)
        expected = {
            (0, 0): 0.5,
            (1, 0): math.sin(1.0),
            (0, 1): 1.0 - math.cos(1.0),
            (2, 0): 1.0,
            (0, 2): 1.0,
            (1, 1): 0.0,
        }
        assert set(constants) == set(expected)
        for key, value in expected.items():
            assert constants[key] == pytest.approx(value, abs=1e-5)

    def test_x_independent_symbol_skips_x_derivatives(self):
        """Test x-derivatives of constant-coefficient symbols integrate to zero."""
        constants = flow_integrated_constants(make_fractional(1.5, 64.0), [[0.0, 64.0]], max_order=1)
        assert constants[(1, 0)] == 0.0
        assert constants[(0, 1)] == pytest.approx(1.5 * 8.0, rel=1e-4)
