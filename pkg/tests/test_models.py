"""
Model tests for grids, symbols, densities, surfaces, scans and run configurations.
"""
import math

import numpy as np
import pytest

from core.errors import ConfigError, DomainError
from models.estimate import ExponentFit, StrichartzScan, SymbolNormScan
from models.flow import FlowSeries, FlowState
from models.grid import Grid, SampledField
from models.partition import BudgetDensity, PartitionReport, TimePartition
from models.run_config import RunConfig
from models.surface import SurfaceData
from models.symbol import ClassEntry, Symbol


@pytest.mark.unit
class TestGridModel:
    """Test Grid and SampledField."""

    def test_grid_repr_and_dict(self, grid):
        """Test grid representation and serialization."""
        assert '512' in repr(grid)
        data = grid.to_dict()
        assert data['d'] == 1
        assert data['N'] == 512
        assert data['L'] == 64.0

    def test_field_is_read_only(self, grid):
        """Test sampled values cannot be modified in place."""
        field = SampledField(grid, np.zeros(512))
        with pytest.raises(ValueError):
            field.values[0] = 1.0

    def test_scaling_keeps_band(self, banded_field):
        """Test scalar multiples keep the band metadata and sums drop it."""
        assert (2.0 * banded_field).band == 4.0
        assert (banded_field + banded_field).band is None


@pytest.mark.unit
class TestSymbolModel:
    """Test Symbol metadata."""

    def test_symbol_validation(self):
        """Test order, band and dimension are validated."""
        evaluator = lambda t, x, xi: xi[..., 0]  # noqa: E731
        with pytest.raises(DomainError):
            Symbol(evaluator, 2.5, 1.0)
        with pytest.raises(DomainError):
            Symbol(evaluator, 1.5, 0.0)
        with pytest.raises(DomainError):
            Symbol(evaluator, 1.5, 1.0, d=3)

    def test_symbol_delta_and_repr(self):
        """Test delta = (2 - m) / 2 and the representation."""
        symbol = Symbol(lambda t, x, xi: xi[..., 0], 1.5, 64.0, name='sample')
        assert symbol.delta == 0.25
        assert symbol.shell_bounds == (16.0, 256.0)
        assert 'sample' in repr(symbol)
        assert symbol.to_dict()['order'] == 1.5

    def test_negated_symbol(self):
        """Test negation flips the sign of every value."""
        symbol = Symbol(lambda t, x, xi: xi[..., 0], 1.5, 64.0)
        assert float(symbol.negated()(0.0, 0.0, 3.0)) == -3.0

    def test_class_entry_pass(self):
        """Test an entry passes when the measured constant is within budget."""
        assert ClassEntry(0, 0, 1.0, 10.0).passed is True
        assert ClassEntry(0, 1, 11.0, 10.0).to_dict()['pass'] is False


@pytest.mark.unit
class TestFlowModel:
    """Test trajectory containers."""

    def test_series_properties(self):
        """Test times, positions and the final state."""
        states = [FlowState(0.0, np.array([0.0]), np.array([1.0])),
                  FlowState(0.5, np.array([0.5]), np.array([1.0]))]
        series = FlowSeries(states, 0.5)
        np.testing.assert_array_equal(series.times, [0.0, 0.5])
        assert series.final.t == 0.5
        assert len(series) == 2
        assert series.to_dict()['flagged'] is False


@pytest.mark.unit
class TestPartitionModel:
    """Test densities and partition containers."""

    def test_density_shape_mismatch(self):
        """Test samples must match the time grid."""
        with pytest.raises(DomainError):
            BudgetDensity(times=np.linspace(0, 1, 11), forcing=np.ones(10), symbol=np.zeros((3, 11)),
                          band=64.0, order=1.5)

    def test_density_must_be_finite(self):
        """Test infinite samples are rejected."""
        forcing = np.ones(11)
        forcing[3] = math.inf
        with pytest.raises(DomainError):
            BudgetDensity(times=np.linspace(0, 1, 11), forcing=forcing, symbol=np.zeros((3, 11)),
                          band=64.0, order=1.5)

    def test_partition_dict(self):
        """Test the partition file layout."""
        partition = TimePartition([0, 2, 4], np.linspace(0.0, 1.0, 5), 2.0, 2, [{'forcing': 1.0}] * 2)
        data = partition.to_dict()
        assert data['k'] == 2
        assert data['breakpoints'] == [0.0, 0.5, 1.0]
        assert data['intervals'][0]['budget_fractions'] == {'forcing': 1.0}

    def test_report_dict(self):
        """Test the report exposes pass and the maximality slack."""
        report = PartitionReport(True, 2, 2, [0, 0, 0], 0, 2, slack=[0.0, 0.0])
        data = report.to_dict()
        assert data['pass'] is True
        assert data['maximality_slack'] == [0.0, 0.0]
        assert 'pass' in repr(report)


@pytest.mark.unit
class TestSurfaceModel:
    """Test SurfaceData validation."""

    def test_default_fields(self, grid):
        """Test missing V and B default to zero."""
        surface = SurfaceData(grid, np.zeros(512), np.zeros(512))
        assert surface.V.shape == (1, 512)
        assert surface.to_dict()['max_B'] == 0.0

    def test_velocity_shape(self, grid):
        """Test V must carry one component per dimension."""
        with pytest.raises(DomainError):
            SurfaceData(grid, np.zeros(512), np.zeros(512), V=np.zeros((2, 512)))

    def test_non_finite_elevation(self, grid):
        """Test NaN elevations are rejected."""
        eta = np.zeros(512)
        eta[0] = np.nan
        with pytest.raises(DomainError):
            SurfaceData(grid, eta, np.zeros(512))


@pytest.mark.unit
class TestScanModels:
    """Test pass logic of scan results."""

    def test_strichartz_pass(self):
        """Test the fitted exponent is compared against bound plus tolerance."""
        scan = StrichartzScan([16, 32, 64, 128], [1.0, 1.1, 1.2, 1.3], ExponentFit(0.17, 0.0, 0.0),
                              4.0, math.inf, 1, 0.125, 0.05)
        assert scan.passed is True
        assert scan.to_dict()['pass'] is True
        assert len(list(scan.rows())) == 4

    def test_dispersive_norm_scan_is_two_sided(self):
        """Test dispersive scans fail when the exponent undershoots the target."""
        fit = ExponentFit(1.2, 0.0, 0.0)
        dispersive = SymbolNormScan('dispersive', 0, 2.0, [16, 32], [1.0, 2.0], fit, 1.5, 0.1)
        transport = SymbolNormScan('transport', 0, 2.0, [16, 32], [1.0, 2.0], fit, 1.5, 0.1)
        assert dispersive.passed is False
        assert transport.passed is True


@pytest.mark.unit
class TestRunConfigModel:
    """Test RunConfig serialization."""

    def test_infinite_exponents_serialize(self):
        """Test q = inf is written as the string 'inf'."""
        run = RunConfig(command='strichartz', grid={'d': 1, 'N': 512, 'L': 64.0})
        data = run.to_dict()
        assert data['q'] == 'inf'
        assert data['p'] == 4.0
        assert 'strichartz' in repr(run)

    def test_build_grid(self):
        """Test the grid mapping builds a Grid."""
        run = RunConfig(command='flow', grid={'d': 1, 'N': 256, 'L': 32.0})
        assert run.build_grid() == Grid(1, 256, 32.0)

    def test_config_error_line(self):
        """Test config errors carry the offending line."""
        error = ConfigError('unknown key', line=3)
        assert error.line == 3
        assert str(error) == 'line 3: unknown key'
