"""
Discrete Fourier transforms, Littlewood-Paley projections and mixed norms on the torus
"""

import logging
import math
import struct

import numpy as np
from scipy import fft

from core.errors import DomainError
from models.grid import Grid, SampledField

logger = logging.getLogger(__name__)

BUMP_PROFILE = 'smoothstep7: s(t)=35t^4-84t^5+70t^6-20t^7; P_lambda ramps on [1/2,3/4] and [3/2,2]'

_FIELD_MAGIC = b'SFLD'
_FIELD_HEADER = struct.Struct('<4sii2dI')


def smoothstep(t):
    """C^3 ramp from 0 (t <= 0) to 1 (t >= 1)"""
    t = np.clip(t, 0.0, 1.0)
    return t ** 4 * (35 - 84 * t + 70 * t ** 2 - 20 * t ** 3)


def annulus(r, inner0, inner1, outer1, outer0):
    """Bump rising on [inner0, inner1], equal to 1 up to outer1, vanishing from outer0"""
    r = np.asarray(r, dtype=float)
    rise = smoothstep((r - inner0) / (inner1 - inner0))
    fall = smoothstep((outer0 - r) / (outer0 - outer1))
    return rise * fall


def lp_bump(r):
    """Profile of P_lambda as a function of |xi|/lambda"""
    return annulus(r, 0.5, 0.75, 1.5, 2.0)


def data_bump(r):
    """Spectral profile of the scan data: 1 on [1/2, 2], supported in [1/4, 4]"""
    return annulus(r, 0.25, 0.5, 2.0, 4.0)


def low_pass(r):
    """chi: 1 on [0, 1], 0 on [2, inf)"""
    return 1.0 - smoothstep(np.asarray(r, dtype=float) - 1.0)


def dyadic_piece(magnitude, j):
    """psi_j = chi(|xi|/2^j) - chi(|xi|/2^(j-1)), a partition of unity away from 0"""
    return low_pass(magnitude / 2.0 ** j) - low_pass(magnitude / 2.0 ** (j - 1))


def dyadic_range(grid):
    """Shell indices j whose pieces meet the nonzero lattice frequencies"""
    lowest = math.floor(math.log2(grid.dxi))
    highest = math.ceil(math.log2(grid.nyquist * math.sqrt(grid.d))) + 1
    return range(lowest, highest + 1)


def _phase(grid):
    origin = np.full(grid.d, -grid.L / 2)
    return np.exp(-1j * grid.frequencies() @ origin)


def fourier_forward(f):
    """Continuous-normalized transform: (2 pi)^(-d/2) dx^d sum f(x_j) e^{-i x_j xi}"""
    if f.spectral:
        raise DomainError('field is already spectral')
    grid = f.grid
    scale = grid.cell_volume / (2 * math.pi) ** (grid.d / 2)
    values = scale * _phase(grid) * fft.fftn(f.values)
    return SampledField(grid, values, band=f.band, spectral=True)


def fourier_inverse(f):
    if not f.spectral:
        raise DomainError('field is not spectral')
    grid = f.grid
    scale = (2 * math.pi) ** (grid.d / 2) / grid.cell_volume
    values = scale * fft.ifftn(f.values / _phase(grid))
    return SampledField(grid, values, band=f.band, spectral=False)


def apply_multiplier(f, multiplier):
    """Multiply the spectrum of a physical-space field by an array on the lattice"""
    values = fft.ifftn(multiplier * fft.fftn(f.values))
    return SampledField(f.grid, values, band=f.band)


def lp_project(f, band):
    """Smooth projection P_lambda onto |xi| in [lambda/2, 2 lambda]"""
    grid = f.grid
    if not 0 < band <= grid.nyquist / 2:
        raise DomainError(
            f'band {band:g} outside (0, Nyquist/2 = {grid.nyquist / 2:g}]; '
            f'refine the grid to N >= {_required_points(grid, 4 * band)}'
        )
    multiplier = lp_bump(grid.frequency_magnitude() / band)
    projected = apply_multiplier(f, multiplier)
    return projected.with_values(projected.values, band=band)


def band_mass_fraction(f, band=None):
    """Share of spectral L2 mass with |xi| in [band/4, 4 band]"""
    band = band if band is not None else f.band
    if band is None:
        raise DomainError('field carries no band')
    power = np.abs(fft.fftn(f.values)) ** 2
    total = power.sum()
    if total == 0:
        return 1.0
    magnitude = f.grid.frequency_magnitude()
    inside = (magnitude >= band / 4) & (magnitude <= 4 * band)
    return float(power[inside].sum() / total)


def check_band(f, threshold=0.999):
    """(is_banded, fraction) for a field with band metadata"""
    if f.band is None:
        return True, 1.0
    fraction = band_mass_fraction(f)
    return fraction >= threshold, fraction


def band_bump(grid, band, normalize='l1'):
    """Real even field centred at the origin with spectrum data_bump(|xi|/band)"""
    if 4 * band > grid.nyquist:
        raise DomainError(
            f'grid Nyquist {grid.nyquist:g} does not resolve 4*band = {4 * band:g}; '
            f'need N >= {_required_points(grid, 4 * band)}'
        )
    spectrum = SampledField(grid, data_bump(grid.frequency_magnitude() / band), spectral=True)
    values = fourier_inverse(spectrum).values.real
    field = SampledField(grid, values, band=band)
    q = {'l1': 1.0, 'l2': 2.0}[normalize]
    return field * (1.0 / field.norm(q))


def plane_wave(grid, frequency):
    """e^{i xi.x} for a frequency vector (snapped to the nearest lattice point)"""
    frequency = np.broadcast_to(np.asarray(frequency, dtype=float), (grid.d,))
    snapped = np.round(frequency / grid.dxi) * grid.dxi
    return SampledField(grid, np.exp(1j * grid.points() @ snapped))


def coherent_state(grid, center, frequency):
    """Unit-norm Gaussian pi^(-d/4) e^{-|x-x0|^2/2} e^{i xi0.(x-x0)}, periodized on the torus"""
    center = np.broadcast_to(np.asarray(center, dtype=float), (grid.d,))
    frequency = np.broadcast_to(np.asarray(frequency, dtype=float), (grid.d,))
    offset = grid.wrap(grid.points() - center)
    envelope = math.pi ** (-grid.d / 4) * np.exp(-0.5 * np.sum(offset ** 2, axis=-1))
    return SampledField(grid, envelope * np.exp(1j * offset @ frequency))


def random_banded_field(grid, rng, band=None, cutoff=None):
    """Complex Gaussian noise, projected onto a band or low-passed below a cutoff"""
    noise = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    field = SampledField(grid, noise)
    if band is not None:
        return lp_project(field, band)
    if cutoff is not None:
        mask = low_pass(grid.frequency_magnitude() / (cutoff / 2))
        return apply_multiplier(field, mask)
    return field


def mixed_norm(series, p, q, dt, rule='rectangle'):
    """(dt sum_n ||u(t_n)||_q^p)^(1/p) over uniformly spaced samples

    series is a sequence of SampledField on a shared grid. rule
    'trapezoid' halves the end weights so a time-constant series reproduces
    its L^q norm over [t_0, t_n] exactly.
    """
    norms = _slice_norms(series, q)
    return time_norm(norms, p, dt, rule)


def time_norm(norms, p, dt, rule='rectangle'):
    norms = np.asarray(norms, dtype=float)
    if norms.size == 0:
        raise DomainError('mixed norm of an empty time series')
    if math.isinf(p):
        return float(norms.max())
    weights = np.ones_like(norms)
    if rule == 'trapezoid' and norms.size > 1:
        weights[0] = weights[-1] = 0.5
    return float((dt * np.sum(weights * norms ** p)) ** (1.0 / p))


def _slice_norms(series, q):
    series = list(series)
    if not series:
        raise DomainError('mixed norm of an empty time series')
    norms = []
    for item in series:
        if isinstance(item, SampledField):
            norms.append(item.norm(q))
        else:
            raise DomainError('time series entries must be SampledField instances')
    return norms


def save_field(path, f):
    """Flat binary layout: header (magic, d, N, L, band, spectral) + row-major complex128"""
    band = math.nan if f.band is None else float(f.band)
    header = _FIELD_HEADER.pack(_FIELD_MAGIC, f.grid.d, f.grid.N, f.grid.L, band, int(f.spectral))
    with open(path, 'wb') as stream:
        stream.write(header)
        stream.write(np.ascontiguousarray(f.values, dtype='<c16').tobytes())
    logger.debug('wrote field %s to %s', f, path)


def load_field(path):
    with open(path, 'rb') as stream:
        raw = stream.read()
    magic, d, n, length, band, spectral = _FIELD_HEADER.unpack_from(raw)
    if magic != _FIELD_MAGIC:
        raise DomainError(f'{path} is not a sampled-field file')
    grid = Grid(d, n, length)
    values = np.frombuffer(raw, dtype='<c16', offset=_FIELD_HEADER.size).reshape(grid.shape)
    return SampledField(grid, values, band=None if math.isnan(band) else band, spectral=bool(spectral))


def _required_points(grid, frequency):
    return 2 ** math.ceil(math.log2(max(8, frequency * grid.L / math.pi)))
