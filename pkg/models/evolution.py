"""
Quantized operator and evolution result models
"""

import json
import os
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import fft

from core.errors import DomainError
from models.grid import Grid, SampledField


@dataclass(frozen=True, eq=False)
class WeylOperator:
    """Discretized a^w: a dense matrix over grid points or an FFT-order multiplier

    correction is the operator norm of the anti-hermitian part removed by the
    (A + A*)/2 hermitization.
    """

    grid: Grid
    matrix: Optional[np.ndarray] = None
    multiplier: Optional[np.ndarray] = None
    correction: float = 0.0
    symbol: str = ''
    t: float = 0.0

    def __repr__(self):
        return f'<WeylOperator {self.kind} {self.symbol} {self.grid!r}>'

    @property
    def kind(self):
        return 'multiplier' if self.multiplier is not None else 'dense'

    @property
    def hermitian(self):
        """Whether the stored operator equals its adjoint (real multiplier, A = A*)"""
        if self.multiplier is not None:
            return not np.iscomplexobj(self.multiplier) or bool(np.all(self.multiplier.imag == 0))
        scale = max(1.0, float(np.abs(self.matrix).max()))
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0.0, atol=1e-12 * scale))

    def apply(self, f):
        if f.grid != self.grid:
            raise DomainError(f'operator grid {self.grid!r} does not match field grid {f.grid!r}')
        if self.multiplier is not None:
            values = fft.ifftn(self.multiplier * fft.fftn(f.values))
        else:
            values = self.matrix @ f.values.reshape(-1)
        return SampledField(self.grid, np.reshape(values, self.grid.shape))

    __call__ = apply

    def to_dict(self):
        return {
            'kind': self.kind,
            'symbol': self.symbol,
            't': self.t,
            'grid': self.grid.to_dict(),
            'hermitian': self.hermitian,
            'hermitian_correction': self.correction,
        }


@dataclass
class EvolutionResult:
    """Recorded snapshots u(t_n) of one evolution and the L2 norm after every step"""

    times: np.ndarray
    snapshots: List[SampledField]
    dt: float
    step_norms: Optional[np.ndarray] = None
    symbol: str = ''
    band: Optional[float] = None
    flagged: bool = False
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.step_norms is None:
            self.step_norms = np.array([snapshot.norm() for snapshot in self.snapshots])
        self.step_norms = np.asarray(self.step_norms, dtype=float)

    def __repr__(self):
        status = ' flagged' if self.flagged else ''
        return f'<EvolutionResult {self.symbol} steps={self.steps} dt={self.dt:g}{status}>'

    @property
    def steps(self):
        return len(self.step_norms) - 1

    @property
    def final(self):
        return self.snapshots[-1]

    @property
    def norms(self):
        """L2 norms of the recorded snapshots"""
        return np.array([snapshot.norm() for snapshot in self.snapshots])

    @property
    def norm_drift(self):
        """max_n | ||u(t_n)|| / ||u_0|| - 1 | over every step"""
        if self.step_norms[0] == 0:
            return 0.0
        return float(np.max(np.abs(self.step_norms / self.step_norms[0] - 1.0)))

    def to_dict(self):
        return {
            'symbol': self.symbol,
            'band': self.band,
            'dt': self.dt,
            'steps': self.steps,
            'T': float(self.times[-1]),
            'norm_drift': self.norm_drift,
            'flagged': self.flagged,
            **self.metadata,
        }

    def save(self, directory, save_field, every=1):
        """Snapshot files plus manifest.json; save_field(path, field) writes one snapshot"""
        os.makedirs(directory, exist_ok=True)
        names = []
        for index in range(0, len(self.snapshots), every):
            name = f'snapshot_{index:05d}.bin'
            save_field(os.path.join(directory, name), self.snapshots[index])
            names.append({'t': float(self.times[index]), 'file': name})
        manifest = {**self.to_dict(), 'snapshots': names}
        with open(os.path.join(directory, 'manifest.json'), 'w') as stream:
            json.dump(manifest, stream, indent=2, sort_keys=True)
        return manifest


@dataclass
class CoherentTrack:
    """Phase-space mass fractions of an evolved coherent state around the flow image"""

    times: np.ndarray
    centers: np.ndarray
    radii: List[float]
    fractions: np.ndarray
    symbol: str = ''
    flagged: bool = False
    rescaled_class: Optional[bool] = None

    def __repr__(self):
        return f'<CoherentTrack {self.symbol} samples={len(self.times)} radii={self.radii}>'

    def fraction(self, t_index, radius):
        return float(self.fractions[t_index, self.radii.index(radius)])

    def outside(self, t_index=-1):
        """1 - fraction per radius at one time sample"""
        return 1.0 - self.fractions[t_index]

    def rows(self):
        d = self.centers.shape[-1] // 2
        for t, center, fractions in zip(self.times, self.centers, self.fractions):
            for radius, fraction in zip(self.radii, fractions):
                yield [t, *center[:d], *center[d:], radius, fraction]

    def to_dict(self):
        return {
            'symbol': self.symbol,
            'times': self.times.tolist(),
            'radii': list(self.radii),
            'final_fractions': self.fractions[-1].tolist(),
            'flagged': self.flagged,
            'rescaled_class_pass': self.rescaled_class,
        }
