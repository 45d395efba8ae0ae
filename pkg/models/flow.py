"""
Bicharacteristic trajectory models
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np


@dataclass(frozen=True)
class FlowState:
    """Point (x, xi) of a trajectory at time t"""

    t: float
    x: np.ndarray
    xi: np.ndarray

    def __repr__(self):
        return f'<FlowState t={self.t:g} x={np.round(self.x, 6).tolist()} xi={np.round(self.xi, 6).tolist()}>'

    def to_dict(self):
        return {'t': self.t, 'x': np.asarray(self.x).tolist(), 'xi': np.asarray(self.xi).tolist()}


@dataclass
class FlowSeries:
    """Trajectory samples; flagged when the integration was halted"""

    states: List[FlowState]
    step: float
    flagged: bool = False
    reason: Optional[str] = None
    halvings: int = 0

    def __repr__(self):
        status = f' flagged: {self.reason}' if self.flagged else ''
        return f'<FlowSeries {len(self.states)} states step={self.step:g}{status}>'

    def __len__(self):
        return len(self.states)

    @property
    def times(self):
        return np.array([state.t for state in self.states])

    @property
    def positions(self):
        return np.array([state.x for state in self.states])

    @property
    def frequencies(self):
        return np.array([state.xi for state in self.states])

    @property
    def final(self):
        return self.states[-1]

    def to_dict(self):
        return {
            'samples': len(self.states),
            'step': self.step,
            'halvings': self.halvings,
            'flagged': self.flagged,
            'reason': self.reason,
            'final': self.final.to_dict(),
        }


@dataclass
class FlowBundle:
    """Trajectory with the variational matrices X = d x^t / d xi, Xi = d xi^t / d xi"""

    trajectory: FlowSeries
    X: np.ndarray
    Xi: np.ndarray
    constants: dict = field(default_factory=dict)

    def __repr__(self):
        return f'<FlowBundle {len(self.trajectory)} states d={self.X.shape[-1]}>'

    @property
    def flagged(self):
        return self.trajectory.flagged

    def index_at(self, t):
        """Index of the sample nearest to t"""
        return int(np.argmin(np.abs(self.trajectory.times - t)))

    def rows(self):
        """Trajectory CSV rows: t, x..., xi..., detX"""
        determinants = np.linalg.det(self.X)
        for state, det in zip(self.trajectory.states, determinants):
            yield [state.t, *np.atleast_1d(state.x), *np.atleast_1d(state.xi), det]

    def to_dict(self):
        return {
            'trajectory': self.trajectory.to_dict(),
            'X_final': self.X[-1].tolist(),
            'Xi_final': self.Xi[-1].tolist(),
            'det_X_final': float(np.linalg.det(self.X[-1])),
            'constants': dict(self.constants),
        }
