"""
Grid and sampled-field models for the periodic torus
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from core.errors import DomainError


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with N points per axis on [-L/2, L/2)^d"""

    d: int
    N: int
    L: float

    def __post_init__(self):
        if self.d not in (1, 2):
            raise DomainError(f'grid dimension must be 1 or 2, got {self.d}')
        if self.N < 8 or self.N & (self.N - 1):
            raise DomainError(f'points per axis must be a power of two >= 8, got {self.N}')
        if not self.L > 0:
            raise DomainError(f'grid period must be positive, got {self.L}')

    def __repr__(self):
        return f'<Grid d={self.d} N={self.N} L={self.L:g}>'

    @property
    def dx(self):
        return self.L / self.N

    @property
    def dxi(self):
        """Spacing of the dual frequency lattice"""
        return 2 * math.pi / self.L

    @property
    def nyquist(self):
        return math.pi * self.N / self.L

    @property
    def shape(self):
        return (self.N,) * self.d

    @property
    def size(self):
        return self.N ** self.d

    @property
    def cell_volume(self):
        return self.dx ** self.d

    @property
    def origin_index(self):
        return (self.N // 2,) * self.d

    def axis(self):
        """Coordinates along one axis, x_j = -L/2 + j dx"""
        return -self.L / 2 + self.dx * np.arange(self.N)

    def frequency_axis(self):
        """Lattice frequencies along one axis in FFT order"""
        return 2 * np.pi * np.fft.fftfreq(self.N, d=self.dx)

    def points(self):
        """Grid coordinates, shape (*shape, d)"""
        axes = np.meshgrid(*([self.axis()] * self.d), indexing='ij')
        return np.stack(axes, axis=-1)

    def frequencies(self):
        """Frequency lattice in FFT order, shape (*shape, d)"""
        axes = np.meshgrid(*([self.frequency_axis()] * self.d), indexing='ij')
        return np.stack(axes, axis=-1)

    def frequency_magnitude(self):
        return np.linalg.norm(self.frequencies(), axis=-1)

    def wrap(self, dx):
        """Map coordinate differences into [-L/2, L/2)"""
        return (np.asarray(dx) + self.L / 2) % self.L - self.L / 2

    def to_dict(self):
        return {'d': self.d, 'N': self.N, 'L': self.L, 'dx': self.dx, 'nyquist': self.nyquist}


@dataclass(frozen=True, eq=False)
class SampledField:
    """Complex samples on a grid, in physical space or (spectral=True) on the dual lattice"""

    grid: Grid
    values: np.ndarray
    band: Optional[float] = None
    spectral: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise DomainError(f'field shape {values.shape} does not match grid shape {self.grid.shape}')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def __repr__(self):
        kind = 'spectral' if self.spectral else 'space'
        return f'<SampledField {kind} {self.grid!r} band={self.band}>'

    @property
    def weight(self):
        """Quadrature weight of one lattice cell"""
        return self.grid.dxi ** self.grid.d if self.spectral else self.grid.cell_volume

    def norm(self, q=2.0):
        """Discrete L^q norm (weight * sum |u|^q)^(1/q); q = inf gives max |u|"""
        return lq_norm(self.values, self.weight, q)

    def with_values(self, values, band=None):
        return replace(self, values=values, band=band)

    def __add__(self, other):
        _check_compatible(self, other)
        return replace(self, values=self.values + other.values, band=None)

    def __sub__(self, other):
        _check_compatible(self, other)
        return replace(self, values=self.values - other.values, band=None)

    def __mul__(self, scalar):
        return replace(self, values=scalar * self.values)

    __rmul__ = __mul__

    def to_dict(self):
        return {
            'grid': self.grid.to_dict(),
            'band': self.band,
            'spectral': self.spectral,
            'l2_norm': self.norm(),
        }


@dataclass(frozen=True, eq=False)
class PhaseSpaceField:
    """FBI-side samples on a block of the (x, xi) lattice

    values has shape (n_x, n_xi); x_index and xi_index hold the integer lattice
    indices (FFT order for xi) of the rows and columns. total_mass is the squared
    L2 mass of the whole lattice, which may exceed the mass of a partial block.
    """

    grid: Grid
    values: np.ndarray
    x_index: np.ndarray
    xi_index: np.ndarray
    total_mass: float = field(default=None)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (len(self.x_index), len(self.xi_index)):
            raise DomainError('phase-space values do not match the index blocks')
        if self.total_mass is None:
            object.__setattr__(self, 'total_mass', float(self.cell_volume * np.sum(np.abs(values) ** 2)))
        object.__setattr__(self, 'values', values)

    def __repr__(self):
        return f'<PhaseSpaceField {self.grid!r} block={self.values.shape}>'

    @property
    def cell_volume(self):
        return (self.grid.dx * self.grid.dxi) ** self.grid.d

    @property
    def complete(self):
        return self.values.shape == (self.grid.size, self.grid.size)

    @property
    def x_points(self):
        return -self.grid.L / 2 + self.grid.dx * np.asarray(self.x_index, dtype=float)

    @property
    def xi_points(self):
        k = np.asarray(self.xi_index)
        k = np.where(k >= self.grid.N // 2, k - self.grid.N, k)
        return self.grid.dxi * k.astype(float)

    def mass(self):
        return float(self.cell_volume * np.sum(np.abs(self.values) ** 2))

    def norm(self):
        return math.sqrt(self.mass())

    def to_dict(self):
        return {
            'grid': self.grid.to_dict(),
            'block': list(self.values.shape),
            'complete': self.complete,
            'total_mass': self.total_mass,
        }


def lq_norm(values, weight, q):
    """Weighted discrete L^q norm of an array"""
    magnitude = np.abs(values)
    if magnitude.size == 0:
        return 0.0
    if math.isinf(q):
        return float(magnitude.max())
    return float((weight * np.sum(magnitude ** q)) ** (1.0 / q))


def _check_compatible(a, b):
    if a.grid != b.grid or a.spectral != b.spectral:
        raise DomainError('fields live on different grids or domains')
