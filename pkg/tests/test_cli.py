"""
Command-line tests: every command end to end with exit statuses and artifacts.
"""
import json
import os

import pytest

from app import EXIT_CONFIG, EXIT_NUMERICAL


@pytest.mark.cli
class TestExponents:
    """Test the exact exponent table."""

    def test_line_limit(self, app, runner, output_dir):
        """Test the d = 1 gain at r = 2 prints 3/14."""
        result = runner.invoke(app, ['exponents', '--d', '1', '--r', '2', '--output-dir', output_dir])
        assert result.exit_code == 0
        assert '3/14 (0.214286)' in result.output
        assert os.path.exists(os.path.join(output_dir, 'exponents.csv'))

    def test_plane_limit(self, app, runner, output_dir):
        """Test the d = 2 gain at r = 2 prints 3/7."""
        result = runner.invoke(app, ['exponents', '--d', '2', '--r', '2', '--output-dir', output_dir])
        assert result.exit_code == 0
        assert '3/7' in result.output

    def test_truncation_remainder_scan(self, app, runner, output_dir):
        """Test --bands adds the fitted truncation remainder against -r sigma."""
        result = runner.invoke(app, ['exponents', '--r', '5/2', '--bands', '16,32,64,128', '--N', '1024',
                                     '--output-dir', output_dir])
        assert result.exit_code == 0
        assert 'truncation remainder exponent' in result.output
        assert os.path.exists(os.path.join(output_dir, 'truncation.csv'))
        with open(os.path.join(output_dir, 'exponents.json')) as stream:
            summary = json.load(stream)
        assert summary['truncation']['pass'] is True

    def test_sigma_out_of_range(self, app, runner, output_dir):
        """Test sigma above one exits with the configuration status."""
        result = runner.invoke(app, ['exponents', '--r', '5/2', '--bands', '16,32', '--sigma', '1.5',
                                     '--output-dir', output_dir])
        assert result.exit_code == EXIT_CONFIG


@pytest.mark.cli
class TestPartitionCommand:
    """Test the partition command and config handling."""

    def test_uniform_forcing(self, app, runner, output_dir):
        """Test mu = 4 with uniform forcing gives four intervals and a manifest."""
        result = runner.invoke(app, ['partition', '--mu', '4', '--uniform-f', '--output-dir', output_dir])
        assert result.exit_code == 0
        assert 'k = 4' in result.output
        with open(os.path.join(output_dir, 'partition.json')) as stream:
            data = json.load(stream)
        assert data['k'] == 4
        assert data['verification']['pass'] is True
        assert os.path.exists(os.path.join(output_dir, 'manifest.json'))

    def test_mu_below_one(self, app, runner, output_dir):
        """Test mu < 1 exits with the configuration status."""
        result = runner.invoke(app, ['partition', '--mu', '0.5', '--uniform-f', '--output-dir', output_dir])
        assert result.exit_code == EXIT_CONFIG

    def test_missing_mu(self, app, runner, output_dir):
        """Test partition without mu exits with the configuration status."""
        result = runner.invoke(app, ['partition', '--uniform-f', '--output-dir', output_dir])
        assert result.exit_code == EXIT_CONFIG
        assert 'needs mu' in result.output

    def test_unknown_config_key(self, app, runner, output_dir, tmp_path):
        """Test an unknown config key is reported with its line."""
        path = tmp_path / 'run.json'
        path.write_text('{\n  "mu": 4,\n  "colour": "blue"\n}\n')
        result = runner.invoke(app, ['partition', '--config', str(path), '--uniform-f', '--output-dir', output_dir])
        assert result.exit_code == EXIT_CONFIG
        assert 'line 3' in result.output

    def test_synthetic_manifest_reproduces_run(self, app, runner, tmp_path):
        """Test the manifest config of a synthetic-density run replays to the same partition."""
        first = str(tmp_path / 'first')
        result = runner.invoke(app, ['partition', '--mu', '8', '--synthetic', '--output-dir', first])
        assert result.exit_code == 0
        with open(os.path.join(first, 'manifest.json')) as stream:
            config = json.load(stream)['config']
        assert config['synthetic'] is True

        path = tmp_path / 'replay.json'
        path.write_text(json.dumps(config, indent=2))
        second = str(tmp_path / 'second')
        result = runner.invoke(app, ['partition', '--config', str(path), '--output-dir', second])
        assert result.exit_code == 0

        with open(os.path.join(first, 'partition.json')) as stream:
            expected = json.load(stream)
        with open(os.path.join(second, 'partition.json')) as stream:
            replayed = json.load(stream)
        assert replayed['k'] == expected['k']
        assert replayed['breakpoints'] == expected['breakpoints']


@pytest.mark.cli
class TestTransformCommand:
    """Test fbi-check."""

    def test_random_fields_pass(self, app, runner, output_dir):
        """Test three random fields pass the isometry check."""
        result = runner.invoke(app, ['fbi-check', '--samples', '3', '--output-dir', output_dir])
        assert result.exit_code == 0
        with open(os.path.join(output_dir, 'fbi_check.json')) as stream:
            assert json.load(stream)['pass'] is True

    def test_numerical_failure_status(self, app, runner, output_dir, mocker):
        """Test an isometry error above tolerance exits with the numerical status."""
        mocker.patch('commands.transform.isometry_report',
                     return_value={'norm': 1.0, 'isometry_error': 0.5, 'inversion_error': 0.5})
        result = runner.invoke(app, ['fbi-check', '--samples', '2', '--output-dir', output_dir])
        assert result.exit_code == EXIT_NUMERICAL
        assert 'numerical validity failure' in result.output


@pytest.mark.cli
class TestDynamicsCommands:
    """Test flow, evolve and coherent."""

    def test_harmonic_flow(self, app, runner, output_dir):
        """Test the oscillator trajectory is written."""
        result = runner.invoke(app, ['flow', '--kind', 'harmonic', '--x0', '1', '--xi0', '0', '--T', '1',
                                     '--output-dir', output_dir])
        assert result.exit_code == 0
        with open(os.path.join(output_dir, 'trajectory.csv')) as stream:
            header = stream.readline().strip()
        assert header == 't,x1,xi1,detX'

    def test_unknown_symbol_kind(self, app, runner, output_dir):
        """Test unknown symbol kinds exit with the configuration status."""
        result = runner.invoke(app, ['flow', '--kind', 'bogus', '--output-dir', output_dir])
        assert result.exit_code == EXIT_CONFIG

    def test_evolve_writes_snapshots(self, app, runner, output_dir):
        """Test evolve writes snapshot files and their manifest."""
        result = runner.invoke(app, ['evolve', '--band', '4', '--T', '0.5', '--output-dir', output_dir])
        assert result.exit_code == 0
        with open(os.path.join(output_dir, 'evolution', 'manifest.json')) as stream:
            manifest = json.load(stream)
        assert manifest['flagged'] is False
        assert manifest['steps'] == 40

    def test_coherent_default_grid(self, app, runner, output_dir):
        """Test the default packet at lambda = 64 runs on a grid sized to its reach."""
        result = runner.invoke(app, ['coherent', '--T', '1', '--output-dir', output_dir])
        assert result.exit_code == 0
        with open(os.path.join(output_dir, 'coherent.json')) as stream:
            data = json.load(stream)
        assert data['final_fractions'][0] >= 0.9
        with open(os.path.join(output_dir, 'manifest.json')) as stream:
            manifest = json.load(stream)
        assert manifest['config']['grid']['N'] == 4096

    def test_coherent_explicit_grid_beyond_nyquist(self, app, runner, output_dir):
        """Test an explicit N whose Nyquist frequency misses the packet exits with the configuration status."""
        result = runner.invoke(app, ['coherent', '--N', '512', '--output-dir', output_dir])
        assert result.exit_code == EXIT_CONFIG
        assert 'Nyquist' in result.output


@pytest.mark.cli
class TestEstimateCommands:
    """Test dispersive, strichartz and ww-symbols."""

    def test_dispersive_small_bands(self, app, runner, output_dir):
        """Test the decay scan writes its fits."""
        result = runner.invoke(app, ['dispersive', '--bands', '8,16', '--output-dir', output_dir])
        assert result.exit_code == 0
        with open(os.path.join(output_dir, 'dispersive.json')) as stream:
            assert len(json.load(stream)['fits']) == 2

    def test_strichartz_needs_four_bands(self, app, runner, output_dir):
        """Test three bands exit with the configuration status."""
        result = runner.invoke(app, ['strichartz', '--bands', '16,32,64', '--output-dir', output_dir])
        assert result.exit_code == EXIT_CONFIG

    def test_ww_symbols(self, app, runner, output_dir):
        """Test the water-wave symbol report on a small ripple."""
        result = runner.invoke(app, ['ww-symbols', '--amplitude', '0.05', '--wavenumber', '1',
                                     '--bands', '16,32,64', '--output-dir', output_dir])
        assert result.exit_code == 0
        with open(os.path.join(output_dir, 'ww_symbols.json')) as stream:
            data = json.load(stream)
        assert data['scan']['pass'] is True
        assert data['identities']['gamma_squared_error'] <= 1e-12


@pytest.mark.cli
class TestCommandGroup:
    """Test command registration."""

    def test_all_commands_registered(self, app):
        """Test the group exposes every command."""
        assert set(app.commands) == {
            'fbi-check', 'flow', 'evolve', 'coherent', 'dispersive', 'strichartz', 'exponents',
            'partition', 'ww-symbols',
        }
