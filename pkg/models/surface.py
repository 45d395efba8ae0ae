"""
Surface data and the gravity-capillary symbol suite
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from core.errors import DomainError
from models.grid import Grid


@dataclass(frozen=True, eq=False)
class SurfaceData:
    """Sampled elevation eta, potential trace psi, surface velocity V and B

    V has shape (d, *grid.shape). grad_eta, when given, replaces the spectral
    gradient of eta (used for surfaces such as tilted planes that are not periodic).
    """

    grid: Grid
    eta: np.ndarray
    psi: np.ndarray
    V: Optional[np.ndarray] = None
    B: Optional[np.ndarray] = None
    grad_eta: Optional[np.ndarray] = None

    def __post_init__(self):
        shape = self.grid.shape
        for name in ('eta', 'psi', 'B'):
            value = getattr(self, name)
            if value is None:
                value = np.zeros(shape)
            value = np.asarray(value, dtype=float)
            if value.shape != shape:
                raise DomainError(f'{name} has shape {value.shape}, expected {shape}')
            if not np.all(np.isfinite(value)):
                raise DomainError(f'{name} must be finite')
            object.__setattr__(self, name, value)
        V = np.zeros((self.grid.d,) + shape) if self.V is None else np.asarray(self.V, dtype=float)
        if V.shape != (self.grid.d,) + shape:
            raise DomainError(f'V has shape {V.shape}, expected {(self.grid.d,) + shape}')
        object.__setattr__(self, 'V', V)
        if self.grad_eta is not None:
            gradient = np.asarray(self.grad_eta, dtype=float)
            if gradient.shape != (self.grid.d,) + shape:
                raise DomainError('grad_eta must have shape (d, *grid.shape)')
            object.__setattr__(self, 'grad_eta', gradient)

    def __repr__(self):
        return f'<SurfaceData {self.grid!r} max|eta|={np.abs(self.eta).max():.3g}>'

    def to_dict(self):
        return {
            'grid': self.grid.to_dict(),
            'max_eta': float(np.abs(self.eta).max()),
            'max_psi': float(np.abs(self.psi).max()),
            'max_V': float(np.abs(self.V).max()),
            'max_B': float(np.abs(self.B).max()),
        }


@dataclass(frozen=True, eq=False)
class WWSymbols:
    """Evaluators lambda, ell, gamma, p (principal part) in (x-index, xi) and q(x)

    Each xi-dependent evaluator takes xi of shape (..., d) and broadcasts it against
    the grid, returning an array (*grid.shape, ...) when xi is a stack of vectors or
    (*grid.shape,) for a single vector.
    """

    grid: Grid
    gradient: np.ndarray
    lam: Callable
    ell: Callable
    gamma: Callable
    q: np.ndarray
    p: Callable

    def __repr__(self):
        return f'<WWSymbols {self.grid!r}>'

    def to_dict(self):
        return {
            'grid': self.grid.to_dict(),
            'max_slope': float(np.sqrt(np.sum(self.gradient ** 2, axis=0)).max()),
            'min_q': float(self.q.min()),
        }


@dataclass(frozen=True, eq=False)
class SeparableSymbol:
    """c(x) m(xi): a coefficient array on the grid times a Fourier multiplier

    multiplier takes xi of shape (..., d) and returns an array of shape (...).
    """

    coefficient: np.ndarray
    multiplier: Callable

    def __repr__(self):
        return f'<SeparableSymbol max|c|={np.abs(self.coefficient).max():.3g}>'
