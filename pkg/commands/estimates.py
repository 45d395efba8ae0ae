"""
Dispersive, Strichartz and exponent-bookkeeping commands
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import click

from commands import artifact, common_options, finish, parse_list, prepare, run_symbol, symbol_options
from config import Config
from core.estimates import (
    dispersive_scan, exponent_bookkeeper, exponent_limits, prefactor_exponent, regularity_window,
    strichartz_scan, truncation_scan,
)
from utils import format_fraction, write_csv, write_json

logger = logging.getLogger(__name__)

DECAY_BANDS = [32.0, 64.0, 128.0]
STRICHARTZ_BANDS = [16.0, 32.0, 64.0, 128.0, 256.0]
TRUNCATION_AMPLITUDE = 0.01


@click.command('dispersive')
@common_options
@symbol_options
@click.option('--bands', default=None, help='Dyadic bands, comma separated')
def dispersive(config_path, output_dir, seed, workers, dimension, points, period,
               kind, order, band, rho, amplitude, form, bands):
    """Sup-norm decay fits of the band bump per lambda and the prefactor growth"""
    symbol = dict(kind=kind, order=order, band=band, rho=rho, amplitude=amplitude, form=form)
    run = prepare('dispersive', config_path, dimension, points, period, symbol=symbol,
                  output_dir=output_dir, seed=seed, workers=workers, bands=parse_list(bands))
    grid = run.build_grid()
    bands = run.bands or DECAY_BANDS

    def scan(value):
        return dispersive_scan(run_symbol(run, grid, band=value))

    with ThreadPoolExecutor(max_workers=run.workers) as pool:
        fits = list(pool.map(scan, bands))

    rows = [row for fit in fits for row in fit.rows()]
    csv_path = write_csv(artifact(run, 'dispersive.csv'), ['lambda', 't', 'ratio', 'fitted'], rows)
    summary = {'fits': [fit.to_dict() for fit in fits], 'tolerance': Config.FIT_TOLERANCE}
    summary['slopes_pass'] = all(abs(fit.slope - fit.target_slope) <= Config.FIT_TOLERANCE for fit in fits)
    if len(fits) >= 2:
        growth = prefactor_exponent(fits)
        bound = fits[0].delta * fits[0].d
        summary['prefactor_exponent'] = growth.exponent
        summary['prefactor_bound'] = bound
        summary['prefactor_pass'] = growth.exponent <= bound + 0.1
    json_path = write_json(artifact(run, 'dispersive.json'), summary)
    finish(run, [csv_path, json_path], summary)
    for fit in fits:
        click.echo(f'lambda={fit.band:g}: slope {fit.slope:.4f}, prefactor {fit.prefactor:.4g}')


@click.command('strichartz')
@common_options
@symbol_options
@click.option('--bands', default=None, help='Dyadic bands (at least 4), comma separated')
@click.option('--p', default=None, help='Time exponent')
@click.option('--q', default=None, help="Space exponent ('inf' allowed)")
@click.option('--forcing', type=click.Choice(['none', 'constant']), default=None)
@click.option('--mu-exponent', default=None, help='Weight each point by mu = lambda^exponent')
@click.option('--T', 'T', default=None, help='Time span')
def strichartz(config_path, output_dir, seed, workers, dimension, points, period,
               kind, order, band, rho, amplitude, form, bands, p, q, forcing, mu_exponent, T):
    """Fitted lambda-growth of the Strichartz ratio against 2 delta / p"""
    symbol = dict(kind=kind, order=order, band=band, rho=rho, amplitude=amplitude, form=form)
    run = prepare('strichartz', config_path, dimension, points, period, symbol=symbol,
                  output_dir=output_dir, seed=seed, workers=workers, bands=parse_list(bands),
                  p=p, q=q, forcing=forcing, mu_exponent=mu_exponent, T=T)
    grid = run.build_grid()
    scan = strichartz_scan(
        lambda value: run_symbol(run, grid, band=value),
        run.bands or STRICHARTZ_BANDS, run.p, run.q, forcing=run.forcing,
        mu_exponent=run.mu_exponent, T=run.T, workers=run.workers,
    )
    csv_path = write_csv(artifact(run, 'strichartz.csv'), ['lambda', 'measured', 'bound'], scan.rows())
    json_path = write_json(artifact(run, 'strichartz.json'), scan.to_dict())
    finish(run, [csv_path, json_path], scan.to_dict())
    status = 'pass' if scan.passed else 'FAIL'
    click.echo(f'exponent {scan.exponent:.4f} vs bound {scan.bound_exponent:.4f} ({status})')


@click.command('exponents')
@common_options
@click.option('--r', default=None, help='Coefficient regularity r >= 2 (r = 2 gives the limits)')
@click.option('--eps', default=None, help='Epsilon of p = 2 + eps for d >= 2')
@click.option('--p', default=None, help='Time exponent of the derivative loss')
@click.option('--s', default=None, help='Sobolev index for the regularity window')
@click.option('--bands', default=None, help='Dyadic bands of the truncation remainder scan')
@click.option('--sigma', default=None, help='Truncation exponent (defaults to 2/(2+r))')
def exponents(config_path, output_dir, seed, workers, dimension, points, period, r, eps, p, s, bands, sigma):
    """Exact exponent table of the rough-surface Strichartz argument"""
    run = prepare('exponents', config_path, dimension, points, period,
                  output_dir=output_dir, seed=seed, workers=workers, r=r, eps=eps, s=s,
                  p=p, bands=parse_list(bands), sigma=sigma)
    d = int(run.grid['d'])
    r = Fraction(r) if r is not None else Fraction(str(run.r if run.r is not None else 2))
    eps = Fraction(eps) if eps is not None else Fraction(str(run.eps))
    time_exponent = Fraction(p) if p is not None else None
    table = exponent_limits(d, eps, time_exponent) if r == 2 else exponent_bookkeeper(d, r, eps, time_exponent)

    rows = table.rows()
    header = next(rows)
    csv_path = write_csv(artifact(run, 'exponents.csv'), header, rows)
    summary = table.to_dict()
    if run.s is not None:
        window = regularity_window(d, Fraction(str(run.s)), r if r > 2 else None, table.gain)
        summary['regularity_window'] = {key: str(value) for key, value in window.items()}
    paths = [csv_path]
    if run.bands:
        scan = _truncation(run, r)
        summary['truncation'] = scan.to_dict()
        paths.append(write_csv(artifact(run, 'truncation.csv'), ['lambda', 'remainder', 'target'], scan.rows()))
    paths.append(write_json(artifact(run, 'exponents.json'), summary))
    finish(run, paths, summary)
    for name, value in table.entries():
        click.echo(f'{name:<34} {format_fraction(value)}')
    if run.bands:
        status = 'pass' if scan.passed else 'FAIL'
        click.echo(f'truncation remainder exponent {scan.fit.exponent:.4f} vs {scan.target:.4f} ({status})')


def _truncation(run, r):
    """Remainder scan of perturbed symbols with rho = r at sigma (run or 2/(2+r))"""
    grid = run.build_grid()
    amplitude = run.symbol.get('A', TRUNCATION_AMPLITUDE)

    def family(value):
        return run_symbol(run, grid, kind='perturbed', band=value, rho=float(r), A=amplitude)

    return truncation_scan(family, run.bands, float(r), sigma=run.sigma, workers=run.workers)


commands = [dispersive, strichartz, exponents]
