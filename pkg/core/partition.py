"""
Greedy maximal time partitions under forcing-mass and symbol-regularity budgets

An interval I = [t_i, t_j] of grid nodes is admissible when

    int_I F <= mu^-1 int_0^T F                              (forcing)
    |I| lambda^(2m-2) lambda^(b-m) int_I g_b <= 1           (symbol, b = 0..N)

Integrals are trapezoid sums over the density grid.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from config import Config
from core.errors import DomainError
from core.symbols import multi_indices, xi_derivative_seminorm
from models.partition import BudgetDensity, PartitionReport, TimePartition

logger = logging.getLogger(__name__)

MIN_CELLS = 1000
BINDING_FRACTION = 1 - 1e-9


class _Budgets:
    """Cumulative budget masses of one density for O(1) interval checks"""

    def __init__(self, density, mu):
        self.density = density
        self.mu = float(mu)
        self.times = density.times
        forcing = density.cell_forcing()
        self.total_forcing = float(forcing.sum())
        self.forcing_active = self.total_forcing > 0
        self.forcing_cum = np.concatenate([[0.0], np.cumsum(forcing)])
        self.symbol_cum = np.concatenate(
            [np.zeros((density.n_beta + 1, 1)), np.cumsum(density.cell_symbol(), axis=1)], axis=1
        )
        self.weights = density.symbol_weights()

    def fractions(self, start, stop):
        """Consumed share of each budget on nodes [start, stop]"""
        result = {}
        if self.forcing_active:
            used = self.forcing_cum[stop] - self.forcing_cum[start]
            result['forcing'] = float(used * self.mu / self.total_forcing)
        length = self.times[stop] - self.times[start]
        masses = self.symbol_cum[:, stop] - self.symbol_cum[:, start]
        for order, value in enumerate(length * self.weights * masses):
            result[f'beta_{order}'] = float(value)
        return result

    def symbol_mass(self, start, stop):
        """Scaled symbol masses lambda^(2m-2) lambda^(b-m) int_I g_b per b"""
        return self.weights * (self.symbol_cum[:, stop] - self.symbol_cum[:, start])

    @staticmethod
    def violated(fractions):
        return [name for name, value in fractions.items() if value > 1 + Config.BUDGET_RTOL]


def _check_inputs(density, mu):
    if not mu >= 1:
        raise DomainError(f'mu must be at least 1, got {mu}')
    if density.cells < MIN_CELLS:
        raise DomainError(f'densities need at least {MIN_CELLS} grid cells, got {density.cells}')


def partition_build(density, mu):
    """Greedy left-to-right partition into maximal admissible intervals

    A forcing density that vanishes identically drops the forcing budget.
    """
    _check_inputs(density, mu)
    budgets = _Budgets(density, mu)
    cells = density.cells
    nodes, fractions = [0], []
    start = 0
    while start < cells:
        single = budgets.fractions(start, start + 1)
        broken = budgets.violated(single)
        if broken:
            raise DomainError(
                f'cell {start} alone violates the {broken[0]} budget '
                f'(fraction {single[broken[0]]:.3g}); the grid is too coarse for mu = {mu:g}'
            )
        stop = start + 1
        while stop < cells and not budgets.violated(budgets.fractions(start, stop + 1)):
            stop += 1
        nodes.append(stop)
        fractions.append(budgets.fractions(start, stop))
        start = stop
    partition = TimePartition(nodes, density.times, float(mu), density.n_beta, fractions)
    logger.info('partition_build mu=%g: k=%d over %d cells', mu, partition.k, cells)
    return partition


def _tiling_violations(partition, density):
    nodes = partition.nodes
    problems = []
    if nodes[0] != 0 or nodes[-1] != density.cells:
        problems.append(f'breakpoints span nodes {nodes[0]}..{nodes[-1]}, not 0..{density.cells}')
    if any(b <= a for a, b in zip(nodes[:-1], nodes[1:])):
        problems.append('breakpoints are not strictly increasing')
    return problems


def _classify(budgets, start, stop, last):
    """Budget that binds on an interval: the one an extension violates, or one at equality"""
    if last:
        current = budgets.fractions(start, stop)
        binding = [name for name, value in current.items() if value >= BINDING_FRACTION]
    else:
        binding = budgets.violated(budgets.fractions(start, stop + 1))
    if 'forcing' in binding:
        return 'forcing'
    return binding[0] if binding else None


def partition_verify(partition, density, mu, workers=1):
    """Re-check budgets, tiling, maximality and the interval count law"""
    _check_inputs(density, mu)
    budgets = _Budgets(density, mu)
    violations = _tiling_violations(partition, density)
    if violations:
        return PartitionReport(False, partition.k, 0, [0] * (density.n_beta + 1), 0, 0, violations)

    intervals = partition.intervals()
    count = len(intervals)

    def check(item):
        index, (start, stop) = item
        current = budgets.fractions(start, stop)
        problems = [
            f'interval {index} [{density.times[start]:g}, {density.times[stop]:g}] exceeds the '
            f'{name} budget (fraction {current[name]:.6g})'
            for name in budgets.violated(current)
        ]
        last = index == count - 1
        if not last and not budgets.violated(budgets.fractions(start, stop + 1)):
            problems.append(f'interval {index} is not maximal: one more cell violates no budget')
        slack = 1.0 - max(current.values()) if current else 1.0
        return problems, slack, _classify(budgets, start, stop, last)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(check, enumerate(intervals)))

    kstar, kbeta, free = 0, [0] * (density.n_beta + 1), 0
    slack, certificate = [], 0.0
    for (problems, gap, binding), (start, stop) in zip(results, intervals):
        violations.extend(problems)
        slack.append(gap)
        if binding == 'forcing':
            kstar += 1
        elif binding is None:
            free += 1
        else:
            order = int(binding.split('_')[1])
            kbeta[order] += 1
            length = density.times[stop] - density.times[start]
            certificate += budgets.mu * length + budgets.symbol_mass(start, stop)[order] / budgets.mu

    lower_bound = math.ceil(budgets.mu - 1e-9) if budgets.forcing_active else 1
    if partition.k < lower_bound:
        violations.append(f'k = {partition.k} is below the forcing lower bound {lower_bound}')
    report = PartitionReport(
        passed=not violations, k=partition.k, kstar=kstar, kbeta=kbeta, free=free,
        lower_bound=lower_bound, violations=violations, slack=slack, certificate=certificate,
    )
    log = logger.info if report.passed else logger.warning
    log('partition_verify mu=%g: k=%d kstar=%d kbeta=%s %s', mu, report.k, kstar, kbeta,
        'pass' if report.passed else f'{len(violations)} violations')
    return report


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------

def uniform_density(cells=None, T=1.0, band=64.0, order=1.5, n_beta=None, forcing_mass=1.0):
    """Uniform forcing of the given total mass with vanishing symbol densities"""
    cells = cells or Config.PARTITION_CELLS
    n_beta = Config.PARTITION_N_BETA if n_beta is None else n_beta
    times = np.linspace(0.0, T, cells + 1)
    return BudgetDensity(
        times=times,
        forcing=np.full(cells + 1, forcing_mass / T),
        symbol=np.zeros((n_beta + 1, cells + 1)),
        band=band,
        order=order,
    )


def hypothesis_density(mu, cells=None, T=1.0, band=64.0, order=1.5, n_beta=None):
    """Densities whose budgets total one forcing unit and mu^2 scaled symbol units

    The profiles oscillate smoothly around their means so that no two budgets
    tie on the grid.
    """
    cells = cells or Config.PARTITION_CELLS
    n_beta = Config.PARTITION_N_BETA if n_beta is None else n_beta
    times = np.linspace(0.0, T, cells + 1)
    forcing = (1 + 0.25 * np.cos(2 * np.pi * times / T)) / T
    orders = np.arange(n_beta + 1)
    weights = band ** (2 * order - 2) * band ** (orders - order)
    phases = np.sin(2 * np.pi * (orders[:, None] + 1) * times[None] / T + orders[:, None])
    profiles = 1 + 0.5 * phases
    masses = 0.5 * np.diff(times) * (profiles[:, :-1] + profiles[:, 1:])
    symbol = profiles * (mu ** 2 / (weights * masses.sum(axis=1)))[:, None]
    return BudgetDensity(times=times, forcing=forcing, symbol=symbol, band=band, order=order)


def budget_density_from_symbol(a, cells=None, forcing=None, n_beta=None, grid=None):
    """Sample F(t) = ||f(t)||_2 and g_b(t) = max_{|beta|=b} ||d_xi^beta a(t)||_(Linf_xi C2_x)

    forcing is None, a callable t -> SampledField, or an array of samples on the
    density grid. Time-independent symbols are measured once.
    """
    cells = cells or Config.PARTITION_CELLS
    n_beta = Config.PARTITION_N_BETA if n_beta is None else n_beta
    times = np.linspace(0.0, a.T, cells + 1)

    def seminorms(t):
        return [
            max(xi_derivative_seminorm(a, t, beta, 2.0, grid=grid) for beta in multi_indices(a.d, order))
            for order in range(n_beta + 1)
        ]

    if a.time_independent:
        symbol = np.repeat(np.array(seminorms(0.0))[:, None], cells + 1, axis=1)
    else:
        symbol = np.array([seminorms(t) for t in times]).T

    if forcing is None:
        values = np.zeros(cells + 1)
    elif callable(forcing):
        values = np.array([forcing(t).norm() for t in times])
    else:
        values = np.asarray(forcing, dtype=float)
    logger.debug('budget densities for %s on %d cells', a.name, cells)
    return BudgetDensity(times=times, forcing=values, symbol=symbol, band=a.band, order=a.order)
