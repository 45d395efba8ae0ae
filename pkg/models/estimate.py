"""
Decay fits, Strichartz scans and exponent tables
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np


@dataclass
class DecayFit:
    """Log-log fit of R(t) = ||u(t)||_inf / ||u_0||_1 against t"""

    band: float
    delta: float
    d: int
    times: np.ndarray
    ratios: np.ndarray
    slope: float
    prefactor: float
    residual: float
    t_min: float
    symbol: str = ''

    def __repr__(self):
        return f'<DecayFit lambda={self.band:g} slope={self.slope:.4f} prefactor={self.prefactor:.4g}>'

    @property
    def target_slope(self):
        return -self.d / 2

    def rows(self):
        for t, ratio in zip(self.times, self.ratios):
            yield [self.band, t, ratio, self.prefactor * t ** self.target_slope]

    def to_dict(self):
        return {
            'symbol': self.symbol,
            'band': self.band,
            'delta': self.delta,
            'd': self.d,
            't_min': self.t_min,
            'samples': len(self.times),
            'slope': self.slope,
            'prefactor': self.prefactor,
            'residual': self.residual,
        }


@dataclass
class ExponentFit:
    """OLS slope of log y against log x with its rms residual"""

    exponent: float
    intercept: float
    residual: float

    def to_dict(self):
        return {'exponent': self.exponent, 'intercept': self.intercept, 'residual': self.residual}


@dataclass
class StrichartzScan:
    """Measured mixed-norm ratios over dyadic bands and their fitted growth exponent"""

    bands: List[float]
    ratios: List[float]
    fit: ExponentFit
    p: float
    q: float
    d: int
    bound_exponent: float
    tolerance: float
    mu_exponent: Optional[float] = None
    symbol: str = ''

    def __repr__(self):
        return f'<StrichartzScan ({self.p:g},{self.q:g}) d={self.d} exponent={self.fit.exponent:.4f}>'

    @property
    def exponent(self):
        return self.fit.exponent

    @property
    def passed(self):
        return self.fit.exponent <= self.bound_exponent + self.tolerance

    def rows(self):
        """CSV rows: lambda, measured, bound (normalized at the first band)"""
        first_ratio, first_band = self.ratios[0], self.bands[0]
        for band, ratio in zip(self.bands, self.ratios):
            yield [band, ratio, first_ratio * (band / first_band) ** self.bound_exponent]

    def to_dict(self):
        return {
            'symbol': self.symbol,
            'p': self.p,
            'q': self.q,
            'd': self.d,
            'bands': list(self.bands),
            'fitted_exponent': self.fit.exponent,
            'residual': self.fit.residual,
            'bound_exponent': self.bound_exponent,
            'mu_exponent': self.mu_exponent,
            'tolerance': self.tolerance,
            'pass': self.passed,
        }


@dataclass
class ExponentTable:
    """Strichartz gains of the rough-surface water-wave argument at regularity r"""

    d: int
    r: Fraction
    eps: Fraction
    gain_d1: Fraction
    gain_dge2: Fraction
    sigma: Fraction
    mu_exponent: Fraction
    derivative_loss: Fraction
    p: Fraction
    references: Dict[str, Fraction] = field(default_factory=dict)
    limits: Dict[str, Fraction] = field(default_factory=dict)

    def __repr__(self):
        return f'<ExponentTable d={self.d} r={self.r} gain={self.gain}>'

    @property
    def gain(self):
        """Gain of the branch selected by d"""
        return self.gain_d1 if self.d == 1 else self.gain_dge2

    def rows(self):
        yield ['quantity', 'value', 'float']
        for name, value in self.entries():
            yield [name, str(value), float(value)]

    def entries(self):
        entries = [
            ('r', self.r),
            ('p', self.p),
            ('gain', self.gain),
            ('gain_d1', self.gain_d1),
            ('gain_dge2', self.gain_dge2),
            ('sigma', self.sigma),
            ('mu_exponent', self.mu_exponent),
            ('derivative_loss', self.derivative_loss),
        ]
        entries.extend((f'reference_{name}', value) for name, value in self.references.items())
        entries.extend((f'limit_{name}', value) for name, value in self.limits.items())
        return entries

    def to_dict(self):
        result = {'d': self.d, 'eps': str(self.eps)}
        result.update({name: str(value) for name, value in self.entries()})
        return result


@dataclass
class SymbolNormScan:
    """Measured ||d_xi^beta (a P_lambda)||_(Linf_xi C^rho_x) across bands and its fitted exponent

    kind 'dispersive' must match the target exponent within tolerance; kind
    'transport' must not exceed it.
    """

    kind: str
    beta: int
    rho: float
    bands: List[float]
    norms: List[float]
    fit: ExponentFit
    target: float
    tolerance: float

    def __repr__(self):
        return f'<SymbolNormScan {self.kind} beta={self.beta} exponent={self.fit.exponent:.4f}>'

    @property
    def passed(self):
        if self.kind == 'transport':
            return self.fit.exponent <= self.target + self.tolerance
        return abs(self.fit.exponent - self.target) <= self.tolerance

    def rows(self):
        first_norm, first_band = self.norms[0], self.bands[0]
        for band, norm in zip(self.bands, self.norms):
            yield [band, norm, first_norm * (band / first_band) ** self.target]

    def to_dict(self):
        return {
            'kind': self.kind,
            'beta': self.beta,
            'rho': self.rho,
            'bands': list(self.bands),
            'fitted_exponent': self.fit.exponent,
            'residual': self.fit.residual,
            'target_exponent': self.target,
            'tolerance': self.tolerance,
            'pass': self.passed,
        }


@dataclass
class TruncationScan:
    """||lambda^(-m) a_(>lambda^sigma)|| across bands against the decay lambda^(-r sigma)"""

    r: float
    sigma: float
    bands: List[float]
    norms: List[float]
    fit: ExponentFit
    tolerance: float
    symbol: str = ''

    def __repr__(self):
        return f'<TruncationScan r={self.r:g} sigma={self.sigma:.4f} exponent={self.fit.exponent:.4f}>'

    @property
    def target(self):
        return -self.r * self.sigma

    @property
    def passed(self):
        return abs(self.fit.exponent - self.target) <= self.tolerance

    def rows(self):
        first_norm, first_band = self.norms[0], self.bands[0]
        for band, norm in zip(self.bands, self.norms):
            yield [band, norm, first_norm * (band / first_band) ** self.target]

    def to_dict(self):
        return {
            'symbol': self.symbol,
            'r': self.r,
            'sigma': self.sigma,
            'bands': list(self.bands),
            'norms': list(self.norms),
            'fitted_exponent': self.fit.exponent,
            'residual': self.fit.residual,
            'target_exponent': self.target,
            'tolerance': self.tolerance,
            'pass': self.passed,
        }
