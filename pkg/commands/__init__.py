"""
Command modules package

Each module exposes a `commands` list; create_app registers them on the group.
"""

import logging
import os

import click

from core.symbols import build_symbol
from utils import load_config_file, parse_number, resolve_run_config, write_manifest

logger = logging.getLogger(__name__)

DEFAULT_SYMBOL = {'kind': 'fractional', 'm': 1.5, 'band': 64.0}


def common_options(func):
    """--config, output, seed, workers and grid options shared by every command"""
    options = [
        click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
                     help='JSON run configuration'),
        click.option('--output-dir', default=None, help='Artifact directory'),
        click.option('--seed', type=int, default=None, help='Seed for randomized corpora'),
        click.option('--workers', type=int, default=None, help='Worker pool size'),
        click.option('--d', 'dimension', type=int, default=None, help='Grid dimension'),
        click.option('--N', 'points', type=int, default=None, help='Grid points per axis'),
        click.option('--L', 'period', type=float, default=None, help='Grid period'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def symbol_options(func):
    """--kind, --m, --band, --rho, --A and --form describing a library symbol"""
    options = [
        click.option('--kind', default=None, help='fractional, perturbed, harmonic, zero or polynomial'),
        click.option('--m', 'order', default=None, help='Symbol order in [1, 2]'),
        click.option('--band', default=None, help='Dyadic band lambda'),
        click.option('--rho', default=None, help='Hölder regularity of the perturbation'),
        click.option('--A', 'amplitude', default=None, help='Perturbation amplitude'),
        click.option('--form', default=None, help="Polynomial form 'xi', 'x' or 'x*xi'"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def parse_list(text):
    """'16,32,64' -> [16.0, 32.0, 64.0]; None passes through"""
    if text is None:
        return None
    return [parse_number(item) for item in str(text).split(',') if item.strip()]


def prepare(command, config_path=None, dimension=None, points=None, period=None, symbol=None, **options):
    """Resolve and validate the RunConfig of one invocation and create its output directory"""
    file_values = load_config_file(config_path) if config_path else {}
    grid = {key: value for key, value in (('d', dimension), ('N', points), ('L', period)) if value is not None}
    if grid:
        options['grid'] = grid
    if symbol:
        mapping = {'kind': 'kind', 'order': 'm', 'band': 'band', 'rho': 'rho', 'amplitude': 'A', 'form': 'form'}
        chosen = {mapping[key]: value for key, value in symbol.items() if value is not None}
        if chosen:
            options['symbol'] = chosen
    run = resolve_run_config(command, file_values, options)
    os.makedirs(run.output_dir, exist_ok=True)
    logger.info('%s: writing artifacts to %s', command, run.output_dir)
    return run


def symbol_spec(run, **overrides):
    """Symbol mapping of a run with library defaults filled in"""
    spec = {**DEFAULT_SYMBOL, **run.symbol, **overrides}
    return spec


def run_symbol(run, grid, **overrides):
    return build_symbol(symbol_spec(run, **overrides), grid)


def artifact(run, name):
    return os.path.join(run.output_dir, name)


def finish(run, artifacts, summary=None):
    """Write the manifest and echo where the artifacts went"""
    path = write_manifest(run, [os.path.basename(item) for item in artifacts], summary)
    for item in artifacts:
        logger.info('%s: wrote %s', run.command, item)
    click.echo(f'{run.command}: {len(artifacts)} artifact(s) in {run.output_dir}')
    return path
