"""
Hamilton flow, evolution and coherent-state commands
"""

import logging
import math
import os

import click
import numpy as np

from commands import artifact, common_options, finish, parse_list, prepare, run_symbol, symbol_options
from core.errors import ConfigError, NumericalValidityError
from core.fields import band_bump, save_field
from core.hamflow import variational_flow
from core.propagate import coherent_track, evolve
from utils import write_csv, write_json

logger = logging.getLogger(__name__)


def _center(run, d, band):
    """(x0, xi0) from run.center = [x..., xi...]; defaults to (0, lambda e_1)"""
    if run.center is None:
        xi0 = np.zeros(d)
        xi0[0] = band
        return np.zeros(d), xi0
    center = np.asarray(run.center, dtype=float)
    if center.shape != (2 * d,):
        raise ConfigError(f'center needs {2 * d} numbers (x then xi), got {len(center)}')
    return center[:d], center[d:]


def _center_option(x0, xi0):
    if x0 is None and xi0 is None:
        return None
    return (parse_list(x0) or [0.0]) + (parse_list(xi0) or [0.0])


@click.command('flow')
@common_options
@symbol_options
@click.option('--x0', default=None, help='Initial position, comma separated')
@click.option('--xi0', default=None, help='Initial frequency, comma separated')
@click.option('--T', 'T', default=None, help='Final time')
@click.option('--step', 'dt', default=None, help='RK4 step')
def flow(config_path, output_dir, seed, workers, dimension, points, period,
         kind, order, band, rho, amplitude, form, x0, xi0, T, dt):
    """Bicharacteristic trajectory and variational matrices of one symbol"""
    symbol = dict(kind=kind, order=order, band=band, rho=rho, amplitude=amplitude, form=form)
    run = prepare('flow', config_path, dimension, points, period, symbol=symbol,
                  output_dir=output_dir, seed=seed, workers=workers, T=T, dt=dt,
                  center=_center_option(x0, xi0))
    grid = run.build_grid()
    a = run_symbol(run, grid)
    x, xi = _center(run, grid.d, a.band)
    bundle = variational_flow(a, (x, xi), run.T, step=run.dt)

    d = grid.d
    header = ['t'] + [f'x{i + 1}' for i in range(d)] + [f'xi{i + 1}' for i in range(d)] + ['detX']
    csv_path = write_csv(artifact(run, 'trajectory.csv'), header, bundle.rows())
    summary = {'symbol': a.to_dict(), **bundle.to_dict()}
    json_path = write_json(artifact(run, 'flow.json'), summary)
    finish(run, [csv_path, json_path], {'flagged': bundle.flagged})

    if bundle.flagged:
        raise NumericalValidityError(f'flow of {a.name} flagged: {bundle.trajectory.reason}')


@click.command('evolve')
@common_options
@symbol_options
@click.option('--data-band', default=None, help='Band of the initial bump (defaults to the symbol band)')
@click.option('--T', 'T', default=None, help='Final time')
@click.option('--dt', default=None, help='Time step (default 1/(10 lambda^m) rounded to divide T)')
@click.option('--record-every', type=int, default=None, help='Snapshot stride')
def evolve_command(config_path, output_dir, seed, workers, dimension, points, period,
                   kind, order, band, rho, amplitude, form, data_band, T, dt, record_every):
    """Evolve the L2-normalized band bump under (i d_t + a^w) u = 0"""
    symbol = dict(kind=kind, order=order, band=band, rho=rho, amplitude=amplitude, form=form)
    run = prepare('evolve', config_path, dimension, points, period, symbol=symbol,
                  output_dir=output_dir, seed=seed, workers=workers, T=T, dt=dt,
                  record_every=record_every, bands=parse_list(data_band))
    grid = run.build_grid()
    a = run_symbol(run, grid)
    u0 = band_bump(grid, run.bands[0] if run.bands else a.band, normalize='l2')
    result = evolve(a, u0, T=run.T, dt=run.dt, record_every=run.record_every)

    directory = artifact(run, 'evolution')
    result.save(directory, save_field)
    csv_path = write_csv(artifact(run, 'norms.csv'), ['t', 'norm'], zip(result.times, result.norms))
    finish(run, [csv_path, os.path.join(directory, 'manifest.json')], result.to_dict())
    click.echo(f'norm drift {result.norm_drift:.3e} over {result.steps} steps')

    if result.flagged:
        raise NumericalValidityError(f'evolution of {a.name} drifted by {result.norm_drift:.3e}')


@click.command('coherent')
@common_options
@symbol_options
@click.option('--x0', default=None, help='Packet position, comma separated')
@click.option('--xi0', default=None, help='Packet frequency, comma separated')
@click.option('--T', 'T', default=None, help='Final time')
@click.option('--radii', default=None, help='Ball radii, comma separated')
@click.option('--times', default=None, help='Sample times, comma separated')
def coherent(config_path, output_dir, seed, workers, dimension, points, period,
             kind, order, band, rho, amplitude, form, x0, xi0, T, radii, times):
    """Phase-space mass of an evolved coherent state around the Hamilton-flow image"""
    symbol = dict(kind=kind, order=order, band=band, rho=rho, amplitude=amplitude, form=form)
    run = prepare('coherent', config_path, dimension, points, period, symbol=symbol,
                  output_dir=output_dir, seed=seed, workers=workers, T=T,
                  center=_center_option(x0, xi0), radii=parse_list(radii), times=parse_list(times))
    grid = run.build_grid()
    a = run_symbol(run, grid)
    x, xi = _center(run, grid.d, a.band)
    reach = float(np.linalg.norm(xi)) + max(run.radii)
    if reach > grid.nyquist and points is None:
        # N not fixed on the command line: size the grid to the packet
        resolved = 2 ** math.ceil(math.log2(reach * grid.L / math.pi))
        logger.info('coherent: N raised from %d to %d so the Nyquist frequency reaches %g',
                    grid.N, resolved, reach)
        run.grid['N'] = resolved
        grid = run.build_grid()
        a = run_symbol(run, grid)
    if reach > grid.nyquist:
        raise ConfigError(f'grid Nyquist {grid.nyquist:g} does not reach |xi0| + max radius = {reach:g}')

    track = coherent_track(a, (x, xi), run.T, grid, radii=run.radii, times=run.times or None)
    d = grid.d
    header = (['t'] + [f'x{i + 1}' for i in range(d)] + [f'xi{i + 1}' for i in range(d)]
              + ['radius', 'fraction'])
    csv_path = write_csv(artifact(run, 'coherent.csv'), header, track.rows())
    json_path = write_json(artifact(run, 'coherent.json'), track.to_dict())
    finish(run, [csv_path, json_path], track.to_dict())

    if track.flagged:
        raise NumericalValidityError(f'coherent track of {a.name} flagged invalid')


commands = [flow, evolve_command, coherent]
