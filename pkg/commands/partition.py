"""
Time-partition command
"""

import logging

import click

from commands import artifact, common_options, finish, prepare, run_symbol, symbol_options
from core.errors import ConfigError, NumericalValidityError
from core.partition import (
    budget_density_from_symbol, hypothesis_density, partition_build, partition_verify, uniform_density,
)
from utils import write_json

logger = logging.getLogger(__name__)


@click.command('partition')
@common_options
@symbol_options
@click.option('--mu', default=None, help='Partition parameter mu >= 1')
@click.option('--uniform-f', 'uniform_forcing', is_flag=True, default=False,
              help='Uniform forcing of unit mass with vanishing symbol densities')
@click.option('--synthetic', is_flag=True, default=False,
              help='Densities with unit forcing mass and mu^2 scaled symbol mass')
@click.option('--cells', type=int, default=None, help='Density grid cells (>= 1000)')
@click.option('--n-beta', type=int, default=None, help='Largest |beta| of the symbol budgets')
@click.option('--T', 'T', default=None, help='Time span')
def partition(config_path, output_dir, seed, workers, dimension, points, period,
              kind, order, band, rho, amplitude, form, mu, uniform_forcing, synthetic, cells, n_beta, T):
    """Greedy maximal partition of [0, T] and its independent verification"""
    symbol = dict(kind=kind, order=order, band=band, rho=rho, amplitude=amplitude, form=form)
    run = prepare('partition', config_path, dimension, points, period, symbol=symbol,
                  output_dir=output_dir, seed=seed, workers=workers, mu=mu,
                  uniform_forcing=uniform_forcing or None, synthetic=synthetic or None, cells=cells,
                  n_beta=n_beta, T=T)
    if run.mu is None:
        raise ConfigError('partition needs mu')

    if run.uniform_forcing:
        density = uniform_density(run.cells, T=run.T, n_beta=run.n_beta)
        source = 'uniform'
    elif run.synthetic:
        density = hypothesis_density(run.mu, run.cells, T=run.T, n_beta=run.n_beta)
        source = 'synthetic'
    else:
        if not run.symbol:
            raise ConfigError('partition needs --uniform-f, --synthetic or a symbol')
        a = run_symbol(run, run.build_grid())
        density = budget_density_from_symbol(a, run.cells, n_beta=run.n_beta)
        source = a.name

    result = partition_build(density, run.mu)
    report = partition_verify(result, density, run.mu, workers=run.workers)
    data = {**result.to_dict(), 'kstar': report.kstar, 'kbeta': report.kbeta,
            'density': {**density.to_dict(), 'source': source}, 'verification': report.to_dict()}
    json_path = write_json(artifact(run, 'partition.json'), data)
    finish(run, [json_path], report.to_dict())
    click.echo(f'k = {result.k} (kstar {report.kstar}, kbeta {report.kbeta}) '
               f"{'verified' if report.passed else 'FAILED verification'}")

    if not report.passed:
        raise NumericalValidityError('partition failed verification: ' + '; '.join(report.violations[:3]),
                                     report.to_dict())


commands = [partition]
