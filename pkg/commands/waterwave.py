"""
Gravity-capillary symbol command
"""

import logging

import click
import numpy as np

from commands import artifact, common_options, finish, parse_list, prepare
from core.errors import ConfigError
from core.fields import load_field, save_field
from core.waterwave import build_symbols, good_unknown, identity_report, ripple_surface, symbol_norm_scan
from models.surface import SurfaceData
from utils import write_csv, write_json

logger = logging.getLogger(__name__)

SCAN_BANDS = [16.0, 32.0, 64.0, 128.0, 256.0]


def _surface(run, grid):
    spec = run.surface
    if 'eta_file' in spec:
        eta = load_field(spec['eta_file'])
        psi = load_field(spec['psi_file']).values.real if 'psi_file' in spec else None
        if eta.grid != grid:
            raise ConfigError(f'surface file grid {eta.grid!r} does not match {grid!r}')
        surface = SurfaceData(grid, eta.values.real, psi)
    else:
        surface = ripple_surface(grid, float(spec.get('amplitude', 0.05)), float(spec.get('wavenumber', 1.0)))
    velocity = spec.get('V')
    if velocity is not None:
        V = np.broadcast_to(np.asarray(velocity, dtype=float).reshape((grid.d,) + (1,) * grid.d),
                            (grid.d,) + grid.shape)
        surface = SurfaceData(grid, surface.eta, surface.psi, V=V, B=surface.B)
    return surface


@click.command('ww-symbols')
@common_options
@click.option('--amplitude', default=None, help='Ripple amplitude epsilon')
@click.option('--wavenumber', default=None, help='Ripple wavenumber (snapped to the lattice)')
@click.option('--eta', 'eta_file', default=None, help='Elevation field binary')
@click.option('--psi', 'psi_file', default=None, help='Potential-trace field binary')
@click.option('--velocity', default=None, help='Constant surface velocity V, comma separated')
@click.option('--bands', default=None, help='Bands of the symbol-norm scan, comma separated')
@click.option('--beta', type=int, default=None, help='xi-derivative order of the scan')
@click.option('--r', default=None, help='Coefficient regularity; the scan uses C^(r - 1/2)')
@click.option('--kind', type=click.Choice(['dispersive', 'transport']), default='dispersive')
def ww_symbols(config_path, output_dir, seed, workers, dimension, points, period,
               amplitude, wavenumber, eta_file, psi_file, velocity, bands, beta, r, kind):
    """Symbol identities, the good unknown and the symbol-norm scan of one surface"""
    surface_options = {key: value for key, value in (
        ('amplitude', amplitude), ('wavenumber', wavenumber), ('eta_file', eta_file),
        ('psi_file', psi_file), ('V', parse_list(velocity)),
    ) if value is not None}
    run = prepare('ww-symbols', config_path, dimension, points, period,
                  output_dir=output_dir, seed=seed, workers=workers, bands=parse_list(bands),
                  beta=beta, r=r, surface=surface_options or None)
    grid = run.build_grid()
    surface = _surface(run, grid)
    symbols = build_symbols(surface)

    rng = np.random.default_rng(run.seed)
    xis = rng.standard_normal((64, grid.d)) * 16.0
    identities = identity_report(symbols, xis)
    unknown = good_unknown(surface, symbols)
    field_path = artifact(run, 'good_unknown.bin')
    save_field(field_path, unknown)

    scan = symbol_norm_scan(surface, run.bands or SCAN_BANDS, beta=run.beta,
                            r=run.r if run.r is not None else 2.5, kind=kind)
    csv_path = write_csv(artifact(run, 'symbol_scan.csv'), ['lambda', 'measured', 'target'], scan.rows())
    summary = {'surface': surface.to_dict(), 'symbols': symbols.to_dict(), 'identities': identities,
               'scan': scan.to_dict(), 'good_unknown_norm': unknown.norm()}
    json_path = write_json(artifact(run, 'ww_symbols.json'), summary)
    finish(run, [csv_path, json_path, field_path], {'scan': scan.to_dict(), 'identities': identities})
    click.echo(f"gamma^2 = ell lambda to {identities['gamma_squared_error']:.2e}; "
               f'scan exponent {scan.fit.exponent:.4f} (target {scan.target:g})')


commands = [ww_symbols]
