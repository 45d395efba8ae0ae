"""
FBI transform commands
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from commands import artifact, common_options, finish, prepare
from config import Config
from core.errors import NumericalValidityError
from core.fbi import isometry_report
from core.fields import random_banded_field
from utils import write_csv, write_json

logger = logging.getLogger(__name__)


@click.command('fbi-check')
@common_options
@click.option('--samples', type=int, default=None, help='Number of random band-limited fields')
def fbi_check(config_path, output_dir, seed, workers, dimension, points, period, samples):
    """Isometry and inversion errors of the FBI transform on random band-limited fields"""
    run = prepare('fbi-check', config_path, dimension, points, period,
                  output_dir=output_dir, seed=seed, workers=workers, samples=samples)
    grid = run.build_grid()
    rng = np.random.default_rng(run.seed)
    fields = [random_banded_field(grid, rng, cutoff=grid.nyquist / 2) for _ in range(run.samples)]

    with ThreadPoolExecutor(max_workers=run.workers) as pool:
        reports = list(pool.map(isometry_report, fields))

    rows = [[index, item['norm'], item['isometry_error'], item['inversion_error']]
            for index, item in enumerate(reports)]
    csv_path = write_csv(artifact(run, 'fbi_check.csv'),
                         ['sample', 'norm', 'isometry_error', 'inversion_error'], rows)
    summary = {
        'samples': len(reports),
        'max_isometry_error': max(item['isometry_error'] for item in reports),
        'max_inversion_error': max(item['inversion_error'] for item in reports),
        'tolerance': Config.FBI_TOLERANCE,
    }
    summary['pass'] = max(summary['max_isometry_error'], summary['max_inversion_error']) <= Config.FBI_TOLERANCE
    json_path = write_json(artifact(run, 'fbi_check.json'), summary)
    finish(run, [csv_path, json_path], summary)
    click.echo(f"isometry error {summary['max_isometry_error']:.3e}, "
               f"inversion error {summary['max_inversion_error']:.3e}")

    if not summary['pass']:
        raise NumericalValidityError('FBI isometry check exceeded its tolerance', summary)


commands = [fbi_check]
