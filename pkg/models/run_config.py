"""
Resolved experiment configuration
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from models.grid import Grid


@dataclass
class RunConfig:
    """Every parameter of one CLI run after defaults, config file and options are merged"""

    command: str
    grid: Dict[str, Any]
    symbol: Dict[str, Any] = field(default_factory=dict)
    T: float = 1.0
    bands: List[float] = field(default_factory=list)
    times: List[float] = field(default_factory=list)
    center: Optional[List[float]] = None
    radii: List[float] = field(default_factory=lambda: [5.0, 10.0, 20.0, 40.0])
    mu: Optional[float] = None
    n_beta: int = 2
    cells: int = 1024
    uniform_forcing: bool = False
    synthetic: bool = False
    sigma: Optional[float] = None
    r: Optional[float] = None
    p: float = 4.0
    q: float = float('inf')
    eps: float = 0.0
    forcing: str = 'none'
    mu_exponent: Optional[float] = None
    beta: int = 0
    s: Optional[float] = None
    dt: Optional[float] = None
    record_every: int = 1
    surface: Dict[str, Any] = field(default_factory=dict)
    samples: int = 50
    output_dir: str = 'lab_output'
    seed: int = 0
    workers: int = 1
    source: Optional[str] = None

    def __repr__(self):
        return f'<RunConfig {self.command} grid={self.grid}>'

    def build_grid(self):
        return Grid(int(self.grid['d']), int(self.grid['N']), float(self.grid['L']))

    def to_dict(self):
        data = asdict(self)
        # JSON has no infinity literal
        data['q'] = 'inf' if self.q == float('inf') else self.q
        data['p'] = 'inf' if self.p == float('inf') else self.p
        return data
