"""
Utility functions for the dispersive lab: validation, config files and artifact writers
"""

import csv
import json
import math
import os
import re
from dataclasses import fields
from fractions import Fraction

import numpy as np

from config import Config
from core.errors import ConfigError
from models.run_config import RunConfig

SYMBOL_KINDS = ('fractional', 'perturbed', 'harmonic', 'zero', 'polynomial')
FORCING_KINDS = ('none', 'constant')


def validate_grid(d, N, L):
    """
    Validate grid parameters

    Args:
        d: Dimension
        N: Points per axis
        L: Period

    Returns:
        tuple: (is_valid: bool, error_message: str)
    """
    try:
        d, N, L = int(d), int(N), float(L)
    except (ValueError, TypeError):
        return False, "Grid parameters must be numbers"

    if d not in (1, 2):
        return False, "Grid dimension must be 1 or 2"

    if N < 8 or N & (N - 1):
        return False, "Grid points per axis must be a power of two >= 8"

    if not L > 0 or math.isinf(L):
        return False, "Grid period must be a positive number"

    return True, ""


def validate_symbol_spec(spec):
    """
    Validate a symbol mapping {kind, m, band, rho, A}

    Returns:
        tuple: (is_valid: bool, error_message: str)
    """
    kind = spec.get('kind', 'fractional')
    if kind not in SYMBOL_KINDS:
        return False, f"Unknown symbol kind '{kind}'"

    if kind in ('fractional', 'perturbed'):
        try:
            m = float(spec.get('m', 1.5))
        except (ValueError, TypeError):
            return False, "Symbol order m must be a number"
        if not 1.0 <= m <= 2.0:
            return False, "Symbol order m must lie in [1, 2]"

    if kind == 'perturbed':
        for key in ('rho', 'A'):
            if key not in spec:
                return False, f"Perturbed symbols need '{key}'"
        if float(spec['A']) < 0:
            return False, "Perturbation amplitude A must be nonnegative"

    if kind == 'polynomial' and spec.get('form') not in ('xi', 'x', 'x*xi'):
        return False, "Polynomial symbols need form 'xi', 'x' or 'x*xi'"

    return True, ""


def validate_bands(bands, minimum=1):
    """
    Validate a list of dyadic bands

    Returns:
        tuple: (is_valid: bool, error_message: str)
    """
    if len(bands) < minimum:
        return False, f"At least {minimum} band(s) required"

    for band in bands:
        if not band > 0:
            return False, "Bands must be positive"
        if not math.log2(band).is_integer():
            return False, f"Band {band:g} is not a power of two"

    return True, ""


def validate_run_config(run):
    """
    Validate a resolved RunConfig before any computation

    Returns:
        tuple: (is_valid: bool, error_message: str)
    """
    is_valid, message = validate_grid(run.grid.get('d'), run.grid.get('N'), run.grid.get('L'))
    if not is_valid:
        return is_valid, message

    if run.symbol:
        is_valid, message = validate_symbol_spec(run.symbol)
        if not is_valid:
            return is_valid, message

    if not run.T > 0:
        return False, "Time span T must be positive"

    if run.bands:
        is_valid, message = validate_bands(run.bands)
        if not is_valid:
            return is_valid, message

    if run.mu is not None and run.mu < 1:
        return False, "mu must be at least 1"

    if run.sigma is not None and not 0 < run.sigma <= 1:
        return False, "sigma must lie in (0, 1]"

    if run.cells < 1000:
        return False, "Partition grids need at least 1000 cells"

    if run.forcing not in FORCING_KINDS:
        return False, f"Forcing must be one of {', '.join(FORCING_KINDS)}"

    if run.workers < 1:
        return False, "workers must be positive"

    return True, ""


def parse_number(value):
    """Float from a number or a string such as '3/2' or 'inf'"""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ('inf', 'infinity'):
            return float('inf')
        return float(Fraction(text))
    return float(value)


def _key_line(text, key):
    match = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count('\n', 0, match.start()) + 1 if match else None


def load_config_file(path):
    """
    Read a JSON run configuration

    Raises ConfigError with the offending line for syntax errors and unknown keys.
    """
    try:
        with open(path) as stream:
            text = stream.read()
    except OSError as exc:
        raise ConfigError(f'cannot read config file {path}: {exc.strerror}')

    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, line=exc.lineno)

    if not isinstance(data, dict):
        raise ConfigError('config file must hold a JSON object', line=1)

    known = {item.name for item in fields(RunConfig)}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown key '{key}'", line=_key_line(text, key))

    data['_lines'] = {key: _key_line(text, key) for key in data}
    data['source'] = path
    return data


def resolve_run_config(command, file_values=None, options=None):
    """Config defaults <- config file <- command-line options (None means unset)"""
    values = {
        'grid': {'d': Config.GRID_DIMENSION, 'N': Config.GRID_POINTS, 'L': Config.GRID_PERIOD},
        'n_beta': Config.PARTITION_N_BETA,
        'cells': Config.PARTITION_CELLS,
        'output_dir': Config.OUTPUT_DIR,
        'seed': Config.SEED,
        'workers': Config.WORKERS,
    }
    file_values = dict(file_values or {})
    lines = file_values.pop('_lines', {})
    source = file_values.pop('source', None)
    file_values.pop('command', None)

    for layer in (file_values, {k: v for k, v in (options or {}).items() if v is not None}):
        for key, value in layer.items():
            if key in ('grid', 'symbol', 'surface') and isinstance(value, dict):
                values[key] = {**values.get(key, {}), **value}
            else:
                values[key] = value

    try:
        for key in ('T', 'mu', 'sigma', 'r', 'p', 'q', 'eps', 'mu_exponent', 's', 'dt'):
            if values.get(key) is not None:
                values[key] = parse_number(values[key])
        values['bands'] = [parse_number(band) for band in values.get('bands', [])]
        values['times'] = [parse_number(t) for t in values.get('times', [])]
        values['radii'] = [parse_number(radius) for radius in values.get('radii', [5, 10, 20, 40])]
        if values.get('center') is not None:
            values['center'] = [parse_number(value) for value in values['center']]
        for key in ('m', 'band', 'rho', 'A'):
            if key in values.get('symbol', {}):
                values['symbol'][key] = parse_number(values['symbol'][key])
        run = RunConfig(command=command, source=source, **values)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f'invalid value: {exc}')

    is_valid, message = validate_run_config(run)
    if not is_valid:
        raise ConfigError(message, line=_offending_line(message, lines))
    return run


def _offending_line(message, lines):
    lowered = message.lower()
    for key, line in lines.items():
        if line and re.search(r'\b%s\b' % re.escape(key.lower()), lowered):
            return line
    return None


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    raise TypeError(f'{type(value).__name__} is not JSON serializable')


def _clean(value):
    """Replace float infinities, which json would emit as bare Infinity"""
    if isinstance(value, dict):
        return {str(key): _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    if isinstance(value, float) and math.isinf(value):
        return _jsonable(value)
    return value


def write_json(path, data):
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w') as stream:
        json.dump(_clean(data), stream, indent=2, sort_keys=True, default=_jsonable)
        stream.write('\n')
    return path


def write_csv(path, header, rows):
    """CSV with a header row; floats written with repr precision"""
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w', newline='') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
    return path


def format_value(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def format_fraction(value):
    """
    Format a rational exponent

    Returns:
        str: '3/14 (0.214286)' style text
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value} ({float(value):.6f})"


def write_manifest(run, artifacts, summary=None):
    """manifest.json echoing the resolved configuration next to the artifacts"""
    manifest = {
        'command': run.command,
        'config': run.to_dict(),
        'artifacts': sorted(artifacts),
        'summary': summary or {},
    }
    return write_json(os.path.join(run.output_dir, 'manifest.json'), manifest)
