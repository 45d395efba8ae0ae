"""
Budget densities and time partitions
"""

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from core.errors import DomainError


@dataclass(frozen=True, eq=False)
class BudgetDensity:
    """Forcing and symbol densities on a uniform time grid over [0, T]

    forcing[i] = ||f(t_i)||_2; symbol[b, i] = ||d_xi^beta a(t_i)||_(Linf_xi C2_x)
    maximized over |beta| = b.
    """

    times: np.ndarray
    forcing: np.ndarray
    symbol: np.ndarray
    band: float
    order: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        forcing = np.asarray(self.forcing, dtype=float)
        symbol = np.atleast_2d(np.asarray(self.symbol, dtype=float))
        if times.ndim != 1 or len(times) < 2:
            raise DomainError('budget densities need at least one time cell')
        if forcing.shape != times.shape or symbol.shape[1] != len(times):
            raise DomainError('density samples do not match the time grid')
        if (forcing < 0).any() or (symbol < 0).any():
            raise DomainError('budget densities must be nonnegative')
        if not np.all(np.isfinite(forcing)) or not np.all(np.isfinite(symbol)):
            raise DomainError('budget densities must be finite')
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'forcing', forcing)
        object.__setattr__(self, 'symbol', symbol)

    def __repr__(self):
        return f'<BudgetDensity cells={self.cells} T={self.T:g} N={self.n_beta}>'

    @property
    def T(self):
        return float(self.times[-1] - self.times[0])

    @property
    def cells(self):
        return len(self.times) - 1

    @property
    def n_beta(self):
        return self.symbol.shape[0] - 1

    def cell_forcing(self):
        """Trapezoid mass of F on each cell"""
        return 0.5 * np.diff(self.times) * (self.forcing[:-1] + self.forcing[1:])

    def cell_symbol(self):
        """Trapezoid mass of each g_beta on each cell, shape (N + 1, cells)"""
        return 0.5 * np.diff(self.times) * (self.symbol[:, :-1] + self.symbol[:, 1:])

    def symbol_weights(self):
        """lambda^(-2(1-m)) lambda^(|beta|-m) per |beta|"""
        orders = np.arange(self.n_beta + 1)
        return self.band ** (2 * self.order - 2) * self.band ** (orders - self.order)

    def rescaled(self, T):
        """Densities of T a(T t, T^(1/m) x, T^(-1/m) xi) on [0, 1] when self spans [0, T]"""
        if not np.isclose(self.T, T) or self.times[0] != 0:
            raise DomainError(f'densities span [{self.times[0]:g}, {self.times[-1]:g}], not [0, {T:g}]')
        orders = np.arange(self.n_beta + 1)[:, None]
        factors = T ** (1 + (2 - orders) / self.order)
        return BudgetDensity(
            times=self.times / T,
            forcing=self.forcing,
            symbol=factors * self.symbol,
            band=T ** (1 / self.order) * self.band,
            order=self.order,
        )

    def to_dict(self):
        return {
            'cells': self.cells,
            'T': self.T,
            'N': self.n_beta,
            'band': self.band,
            'order': self.order,
            'forcing_mass': float(self.cell_forcing().sum()),
        }


@dataclass
class TimePartition:
    """Grid-node breakpoints t_0 < ... < t_k with per-interval budget fractions"""

    nodes: List[int]
    times: np.ndarray
    mu: float
    n_beta: int
    fractions: List[Dict[str, float]] = field(default_factory=list)

    def __repr__(self):
        return f'<TimePartition k={self.k} mu={self.mu:g}>'

    @property
    def k(self):
        return len(self.nodes) - 1

    @property
    def breakpoints(self):
        return [float(self.times[node]) for node in self.nodes]

    @property
    def T(self):
        return float(self.times[self.nodes[-1]] - self.times[self.nodes[0]])

    def intervals(self):
        return list(zip(self.nodes[:-1], self.nodes[1:]))

    def to_dict(self):
        return {
            'T': self.T,
            'mu': self.mu,
            'N': self.n_beta,
            'breakpoints': self.breakpoints,
            'intervals': [{'budget_fractions': dict(item)} for item in self.fractions],
            'k': self.k,
        }


@dataclass
class PartitionReport:
    """Independent re-check of a partition: budgets, tiling, maximality and the count law"""

    passed: bool
    k: int
    kstar: int
    kbeta: List[int]
    free: int
    lower_bound: int
    violations: List[str] = field(default_factory=list)
    slack: List[float] = field(default_factory=list)
    certificate: float = float('nan')

    def __repr__(self):
        status = 'pass' if self.passed else 'fail'
        return f'<PartitionReport k={self.k} {status}>'

    def to_dict(self):
        return {
            'pass': self.passed,
            'k': self.k,
            'kstar': self.kstar,
            'kbeta': list(self.kbeta),
            'free': self.free,
            'lower_bound': self.lower_bound,
            'violations': list(self.violations),
            'maximality_slack': list(self.slack),
            'certificate': self.certificate,
        }
