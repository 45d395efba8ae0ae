"""
Symbol and symbol-class report models
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from core.errors import DomainError
from models.grid import Grid


class ClassTag(str, Enum):
    """Symbol classes a measured report can be checked against"""

    S00 = 'S00'        # |d_x^a d_xi^b a| <= c for |a| + |b| >= k
    L1S = 'L1S'        # ||d_x^a d_xi^b a||_{L1_t Linf} <= c lam^(m-|b|+delta(|a|-k)), |a| >= k
    S1 = 'S1'          # |d_xi^b a| <= c lam^(m-|b|)
    HOLDER = 'Cr'      # ||d_xi^b a||_{L1_t Linf_xi C^r_x} <= c lam^(m-|b|), |b| <= k


@dataclass(frozen=True, eq=False)
class Symbol:
    """Black-box real symbol a(t, x, xi) with order m and band lambda

    The evaluator receives t (float) and arrays x, xi whose last axis has
    length d, and returns a real array of the broadcast leading shape.
    """

    evaluator: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    order: float
    band: float
    d: int = 1
    T: float = 1.0
    name: str = 'symbol'
    x_independent: bool = False
    time_independent: bool = True
    shell: bool = True
    x_scale: float = 1.0
    x_grid: Optional[Grid] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not 1.0 <= self.order <= 2.0:
            raise DomainError(f'symbol order must lie in [1, 2], got {self.order}')
        if not self.band > 0:
            raise DomainError(f'symbol band must be positive, got {self.band}')
        if self.d not in (1, 2):
            raise DomainError(f'symbol dimension must be 1 or 2, got {self.d}')

    def __repr__(self):
        return f'<Symbol {self.name} m={self.order:g} lambda={self.band:g} d={self.d}>'

    @property
    def delta(self):
        return (2.0 - self.order) / 2.0

    @property
    def shell_bounds(self):
        """Declared evaluation domain |xi| in [lambda/4, 4 lambda]"""
        return self.band / 4, 4 * self.band

    def _vector(self, value):
        value = np.asarray(value, dtype=float)
        if self.d == 1 and (value.ndim == 0 or value.shape[-1] != 1):
            value = value[..., None]
        return value

    def __call__(self, t, x, xi):
        x, xi = self._vector(x), self._vector(xi)
        return np.asarray(self.evaluator(float(t), x, xi), dtype=float)

    def derived(self, evaluator, **changes):
        """Copy with a new evaluator and updated metadata"""
        return replace(self, evaluator=evaluator, **changes)

    def scaled(self, factor):
        base = self.evaluator
        return self.derived(lambda t, x, xi: factor * base(t, x, xi), name=f'{factor:g}*{self.name}')

    def negated(self):
        base = self.evaluator
        return self.derived(lambda t, x, xi: -base(t, x, xi), name=f'-{self.name}')

    def to_dict(self):
        return {
            'name': self.name,
            'order': self.order,
            'band': self.band,
            'delta': self.delta,
            'd': self.d,
            'T': self.T,
            'x_independent': self.x_independent,
            'time_independent': self.time_independent,
            'params': dict(self.params),
        }


@dataclass(frozen=True)
class ClassEntry:
    """One measured constant c_(alpha, beta) against its budget"""

    alpha: Any
    beta: Any
    measured: float
    budget: float

    @property
    def passed(self):
        return self.measured <= self.budget

    def to_dict(self):
        return {
            'alpha': self.alpha,
            'beta': self.beta,
            'measured': self.measured,
            'budget': self.budget,
            'pass': self.passed,
        }


@dataclass
class ClassReport:
    """Measured class constants; measured values are lower bounds on the true sups"""

    tag: ClassTag
    k: int
    r: Optional[float]
    entries: List[ClassEntry]
    sample_count: int = 0
    flagged: bool = False
    symbol: str = ''

    def __repr__(self):
        status = 'pass' if self.passed else 'fail'
        return f'<ClassReport {self.tag.value} {self.symbol} {status}>'

    @property
    def passed(self):
        return all(entry.passed for entry in self.entries)

    def entry(self, alpha, beta):
        for item in self.entries:
            if item.alpha == alpha and item.beta == beta:
                return item
        raise KeyError((alpha, beta))

    def to_dict(self):
        return {
            'class': self.tag.value,
            'k': self.k,
            'r': self.r,
            'symbol': self.symbol,
            'samples': self.sample_count,
            'flagged': self.flagged,
            'entries': [entry.to_dict() for entry in self.entries],
            'pass': self.passed,
        }
