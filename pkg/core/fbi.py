"""
FBI transform T, its adjoint T* and phase-space mass diagnostics

Tf(x, xi) = 2^(-d/2) pi^(-3d/4) int e^{-|x-y|^2/2} e^{i xi.(x-y)} f(y) dy

On the torus the Gaussian window is summed periodically; each x-slice is a
windowed DFT over the displacement x - y, so T maps the N^d grid onto the
N^d x N^d lattice of (x_j, xi_k) with xi_k on the dual lattice 2 pi k / L.
"""

import logging
import math
import struct

import numpy as np
from scipy import fft

from config import Config
from core.errors import DomainError
from models.grid import Grid, PhaseSpaceField, SampledField

logger = logging.getLogger(__name__)

_PHASE_MAGIC = b'PSFD'
_PHASE_HEADER = struct.Struct('<4siidiid')


def fbi_constant(d):
    return 2.0 ** (-d / 2) * math.pi ** (-3 * d / 4)


def _window(grid):
    """Periodized unit Gaussian over lattice displacements, shape grid.shape"""
    s = grid.wrap(np.arange(grid.N) * grid.dx)
    axes = np.meshgrid(*([s] * grid.d), indexing='ij')
    return np.exp(-0.5 * sum(axis ** 2 for axis in axes))


def _check_resolution(grid):
    if grid.dx > Config.FBI_MAX_SPACING:
        required = 2 ** math.ceil(math.log2(grid.L / Config.FBI_MAX_SPACING))
        raise DomainError(
            f'grid spacing {grid.dx:g} does not resolve the unit Gaussian window '
            f'(need dx <= {Config.FBI_MAX_SPACING}, i.e. N >= {required} for L = {grid.L:g})'
        )
    if grid.L < 32:
        logger.warning('period L=%g < 32: periodic window wrap-around exceeds 1e-12', grid.L)


def _select(grid, coordinates, window_range, periodic):
    """Indices along one axis within (center, halfwidth) of a coordinate array"""
    center, halfwidth = window_range
    offset = coordinates - center
    if periodic:
        offset = grid.wrap(offset)
    return np.nonzero(np.abs(offset) <= halfwidth)[0]


def _axes(grid, coordinates, window_range, periodic):
    """Per-axis index selections; a window centre may be a scalar or a d-vector"""
    if window_range is None:
        return [np.arange(grid.N)] * grid.d
    center, halfwidth = window_range
    center = np.broadcast_to(np.asarray(center, dtype=float), (grid.d,))
    return [_select(grid, coordinates, (value, halfwidth), periodic) for value in center]


def _block_indices(grid, x_range, xi_range):
    x_axes = _axes(grid, grid.axis(), x_range, periodic=True)
    xi_axes = _axes(grid, grid.frequency_axis(), xi_range, periodic=False)
    x_index = np.stack(np.meshgrid(*x_axes, indexing='ij'), axis=-1).reshape(-1, grid.d)
    xi_index = np.stack(np.meshgrid(*xi_axes, indexing='ij'), axis=-1).reshape(-1, grid.d)
    return x_index, xi_index


def _gather_indices(grid, rows):
    """Per-axis index arrays (j - m) mod N broadcast to (B, N, ..., N)"""
    d, n = grid.d, grid.N
    displacement = np.arange(n)
    indices = []
    for axis in range(d):
        shape = [1] * (d + 1)
        shape[axis + 1] = n
        indices.append((rows[:, axis].reshape(-1, *([1] * d)) - displacement.reshape(shape)) % n)
    return tuple(indices)


def _flat(grid, index):
    return np.ravel_multi_index(tuple(index.T), grid.shape)


def fbi_forward(f, x_range=None, xi_range=None, chunk=None):
    """Phase-space transform of a physical-space field

    x_range / xi_range restrict the output block to (center, halfwidth) windows
    per axis; total_mass of a partial block is the isometric value ||f||^2.
    """
    if f.spectral:
        raise DomainError('fbi_forward expects a physical-space field')
    grid = f.grid
    _check_resolution(grid)
    chunk = chunk or Config.FBI_CHUNK_SLICES
    x_index, xi_index = _block_indices(grid, x_range, xi_range)
    columns = _flat(grid, xi_index)
    window = _window(grid)
    scale = fbi_constant(grid.d) * grid.cell_volume * grid.size
    axes = tuple(range(1, grid.d + 1))

    values = np.empty((len(x_index), len(columns)), dtype=complex)
    for start in range(0, len(x_index), chunk):
        rows = x_index[start:start + chunk]
        slab = window[None] * f.values[_gather_indices(grid, rows)]
        transformed = scale * fft.ifftn(slab, axes=axes)
        values[start:start + chunk] = transformed.reshape(len(rows), -1)[:, columns]

    complete = x_range is None and xi_range is None
    total = None if complete else f.norm() ** 2
    logger.debug('fbi_forward %r block=%s', grid, values.shape)
    return PhaseSpaceField(grid, values, x_index, xi_index, total_mass=total)


def fbi_adjoint(F, grid=None, chunk=None):
    """T*F; entries outside a partial block count as zero"""
    if grid is not None and grid != F.grid:
        raise DomainError(f'phase-space grid {F.grid!r} does not match target {grid!r}')
    grid = F.grid
    _check_resolution(grid)
    chunk = chunk or Config.FBI_CHUNK_SLICES
    columns = _flat(grid, F.xi_index)
    window = _window(grid)
    scale = fbi_constant(grid.d) * grid.cell_volume * grid.dxi ** grid.d
    axes = tuple(range(1, grid.d + 1))

    out = np.zeros(grid.shape, dtype=complex)
    for start in range(0, len(F.x_index), chunk):
        rows = F.x_index[start:start + chunk]
        spread = np.zeros((len(rows), grid.size), dtype=complex)
        spread[:, columns] = F.values[start:start + chunk]
        spread = fft.fftn(spread.reshape(len(rows), *grid.shape), axes=axes)
        np.add.at(out, _gather_indices(grid, rows), scale * window[None] * spread)
    return SampledField(grid, out)


def mass_fraction(F, center, radius):
    """Share of squared phase-space mass within a Euclidean ball (x periodic)"""
    if F.total_mass <= 0:
        return 0.0
    grid = F.grid
    center = np.asarray(center, dtype=float).reshape(2, grid.d)
    dx2 = np.sum(grid.wrap(F.x_points - center[0]) ** 2, axis=-1)
    dxi2 = np.sum((F.xi_points - center[1]) ** 2, axis=-1)
    inside = dx2[:, None] + dxi2[None, :] <= radius ** 2
    mass = F.cell_volume * np.sum(np.abs(F.values[inside]) ** 2)
    return float(min(1.0, max(0.0, mass / F.total_mass)))


def isometry_report(f):
    """Relative isometry and inversion errors of T on one field"""
    norm = f.norm()
    transformed = fbi_forward(f)
    restored = fbi_adjoint(transformed)
    return {
        'norm': norm,
        'isometry_error': abs(transformed.norm() / norm - 1.0),
        'inversion_error': (restored - f).norm() / norm,
    }


def peak_location(F):
    """(x, xi) of the largest |F| entry"""
    row, column = np.unravel_index(np.argmax(np.abs(F.values)), F.values.shape)
    return F.x_points[row], F.xi_points[column]


def phase_space_rows(F):
    """Plot rows (x..., xi..., |F|^2)"""
    power = np.abs(F.values) ** 2
    for row, x in enumerate(F.x_points):
        for column, xi in enumerate(F.xi_points):
            yield [*x, *xi, power[row, column]]


def save_phase_space(path, F):
    grid = F.grid
    header = _PHASE_HEADER.pack(_PHASE_MAGIC, grid.d, grid.N, grid.L, len(F.x_index), len(F.xi_index), F.total_mass)
    with open(path, 'wb') as stream:
        stream.write(header)
        stream.write(np.ascontiguousarray(F.x_index, dtype='<i4').tobytes())
        stream.write(np.ascontiguousarray(F.xi_index, dtype='<i4').tobytes())
        stream.write(np.ascontiguousarray(F.values, dtype='<c16').tobytes())


def load_phase_space(path):
    with open(path, 'rb') as stream:
        raw = stream.read()
    magic, d, n, length, n_x, n_xi, total = _PHASE_HEADER.unpack_from(raw)
    if magic != _PHASE_MAGIC:
        raise DomainError(f'{path} is not a phase-space file')
    offset = _PHASE_HEADER.size
    x_index = np.frombuffer(raw, dtype='<i4', count=n_x * d, offset=offset).reshape(n_x, d)
    offset += 4 * n_x * d
    xi_index = np.frombuffer(raw, dtype='<i4', count=n_xi * d, offset=offset).reshape(n_xi, d)
    offset += 4 * n_xi * d
    values = np.frombuffer(raw, dtype='<c16', count=n_x * n_xi, offset=offset).reshape(n_x, n_xi)
    return PhaseSpaceField(Grid(d, n, length), values, x_index, xi_index, total_mass=total)
