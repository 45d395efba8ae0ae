"""
Hamilton flow x' = a_xi, xi' = -a_x, its variational system and flow-map measurements
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from config import Config
from core.errors import DomainError
from core.symbols import class_steps, derivatives, flow_steps, multi_indices
from models.flow import FlowBundle, FlowSeries, FlowState

logger = logging.getLogger(__name__)


def _span(t_span):
    if np.isscalar(t_span):
        return 0.0, float(t_span)
    start, stop = t_span
    return float(start), float(stop)


def _gradient(a, t, x, xi):
    """(a_x, a_xi) at one point; a_x is exactly zero for x-independent symbols"""
    d = a.d
    hx, hxi = flow_steps(a)
    units = np.eye(d, dtype=int)
    orders = [((0,) * d, tuple(unit)) for unit in units]
    if not a.x_independent:
        orders += [(tuple(unit), (0,) * d) for unit in units]
    values = derivatives(a, t, x, xi, orders, hx, hxi)
    a_xi = np.array([float(value) for value in values[:d]])
    a_x = np.zeros(d) if a.x_independent else np.array([float(value) for value in values[d:]])
    return a_x, a_xi


def _second(a, t, x, xi):
    """(a_xx, a_xxi, a_xixi) as d x d matrices; (a_xxi)_ij = d_xi_j d_x_i a"""
    d = a.d
    hx, hxi = flow_steps(a)
    pairs = [(i, j) for i in range(d) for j in range(d)]

    def index(*units):
        order = [0] * d
        for unit in units:
            order[unit] += 1
        return tuple(order)

    zero = (0,) * d
    orders = [(zero, index(i, j)) for i, j in pairs]
    if not a.x_independent:
        orders += [(index(i, j), zero) for i, j in pairs]
        orders += [(index(i), index(j)) for i, j in pairs]
    values = [float(value) for value in derivatives(a, t, x, xi, orders, hx, hxi)]
    a_xixi = np.array(values[:d * d]).reshape(d, d)
    if a.x_independent:
        return np.zeros((d, d)), np.zeros((d, d)), a_xixi
    a_xx = np.array(values[d * d:2 * d * d]).reshape(d, d)
    a_xxi = np.array(values[2 * d * d:]).reshape(d, d)
    return a_xx, a_xxi, a_xixi


def _base_rhs(a):
    d = a.d

    def rhs(t, state):
        a_x, a_xi = _gradient(a, t, state[:d], state[d:])
        return np.concatenate([a_xi, -a_x])

    return rhs


def _variational_rhs(a):
    d = a.d

    def rhs(t, state):
        x, xi = state[:d], state[d:2 * d]
        X = state[2 * d:2 * d + d * d].reshape(d, d)
        Xi = state[2 * d + d * d:].reshape(d, d)
        a_x, a_xi = _gradient(a, t, x, xi)
        a_xx, a_xxi, a_xixi = _second(a, t, x, xi)
        dX = a_xxi.T @ X + a_xixi @ Xi
        dXi = -a_xx @ X - a_xxi @ Xi
        return np.concatenate([a_xi, -a_x, dX.ravel(), dXi.ravel()])

    return rhs


def _outside_shell(a, xi):
    if not a.shell:
        return False
    magnitude = float(np.linalg.norm(xi))
    return not a.band / 8 <= magnitude <= 8 * a.band


def _rk4(a, rhs, state, start, stop, step):
    """Classical fourth-order steps; halts when xi leaves [lambda/8, 8 lambda]"""
    d = a.d
    count = max(1, int(math.ceil(round((stop - start) / step, 9))))
    h = (stop - start) / count
    times = [start]
    states = [np.array(state, dtype=float)]
    reason = None
    for n in range(count):
        t, y = times[-1], states[-1]
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        times.append(start + (n + 1) * h)
        states.append(y)
        if _outside_shell(a, y[d:2 * d]):
            reason = f'|xi| = {np.linalg.norm(y[d:2 * d]):.4g} left [lambda/8, 8 lambda] at t = {times[-1]:.4g}'
            break
    return np.array(times), np.array(states), h, reason


def _relative_gap(a, coarse, fine):
    d = a.d
    dx = np.linalg.norm(coarse[:d] - fine[:d]) / (np.linalg.norm(fine[:d]) + a.x_scale)
    dxi = np.linalg.norm(coarse[d:2 * d] - fine[d:2 * d]) / (np.linalg.norm(fine[d:2 * d]) + a.band)
    return max(dx, dxi)


def _integrate(a, rhs, state, t_span, step):
    """RK4 at `step`, halving until doubling the step moves the endpoint < FLOW_REL_TOLERANCE"""
    start, stop = _span(t_span)
    step = step or Config.FLOW_STEP
    if stop == start:
        return np.array([start]), np.array([state], dtype=float), step, None, 0
    halvings = 0
    while True:
        times, states, h, reason = _rk4(a, rhs, state, start, stop, step)
        if reason is not None:
            logger.warning('flow of %s halted: %s', a.name, reason)
            return times, states, h, reason, halvings
        doubled = _rk4(a, rhs, state, start, stop, 2 * h)[1]
        gap = _relative_gap(a, doubled[-1], states[-1])
        if gap < Config.FLOW_REL_TOLERANCE or halvings >= Config.FLOW_MAX_HALVINGS:
            if gap >= Config.FLOW_REL_TOLERANCE:
                reason = f'step-doubling gap {gap:.3g} after {halvings} halvings'
                logger.warning('flow of %s not converged: %s', a.name, reason)
            return times, states, h, reason, halvings
        halvings += 1
        step = h / 2
        logger.debug('flow of %s: gap %.3g, halving step to %g', a.name, gap, step)


def _series(a, times, states, h, reason, halvings):
    d = a.d
    states_out = [FlowState(float(t), y[:d].copy(), y[d:2 * d].copy()) for t, y in zip(times, states)]
    return FlowSeries(states_out, h, flagged=reason is not None, reason=reason, halvings=halvings)


def _initial(a, init):
    x, xi = init
    x = np.broadcast_to(np.asarray(x, dtype=float), (a.d,)).copy()
    xi = np.broadcast_to(np.asarray(xi, dtype=float), (a.d,)).copy()
    if _outside_shell(a, xi):
        raise DomainError(f'initial frequency |xi| = {np.linalg.norm(xi):g} outside [lambda/8, 8 lambda]')
    return x, xi


def flow_integrate(a, init, t_span, step=None):
    """Trajectory (x^t, xi^t) from init = (x, xi) over t_span = T or (t0, t1)"""
    x, xi = _initial(a, init)
    result = _integrate(a, _base_rhs(a), np.concatenate([x, xi]), t_span, step)
    return _series(a, *result)


def variational_flow(a, init, t_span, step=None):
    """Trajectory with X = d x^t / d xi and Xi = d xi^t / d xi, X(0) = 0, Xi(0) = I"""
    d = a.d
    x, xi = _initial(a, init)
    state = np.concatenate([x, xi, np.zeros(d * d), np.eye(d).ravel()])
    times, states, h, reason, halvings = _integrate(a, _variational_rhs(a), state, t_span, step)
    X = states[:, 2 * d:2 * d + d * d].reshape(-1, d, d)
    Xi = states[:, 2 * d + d * d:].reshape(-1, d, d)
    # initial matrices are set exactly, not integrated
    X[0], Xi[0] = 0.0, np.eye(d)
    bundle = FlowBundle(_series(a, times, states, h, reason, halvings), X, Xi)
    bundle.constants = _bundle_constants(a, bundle)
    return bundle


def _bundle_constants(a, bundle):
    """sup ||X|| + sup ||Xi|| and the measured bound on ||Xi - I||"""
    norms_x = np.linalg.norm(bundle.X, ord=2, axis=(1, 2))
    norms_xi = np.linalg.norm(bundle.Xi, ord=2, axis=(1, 2))
    forcing = []
    for state, norm_x, norm_xi in zip(bundle.trajectory.states, norms_x, norms_xi):
        a_xx, a_xxi, _ = _second(a, state.t, state.x, state.xi)
        forcing.append(np.linalg.norm(a_xx, 2) * norm_x + np.linalg.norm(a_xxi, 2) * norm_xi)
    times = bundle.trajectory.times
    integral = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(times) * (np.array(forcing[:-1]) + np.array(forcing[1:])))])
    deviation = np.linalg.norm(bundle.Xi - np.eye(a.d), ord=2, axis=(1, 2))
    return {
        'sup_X_plus_sup_Xi': float(norms_x.max() + norms_xi.max()),
        'max_Xi_deviation': float(deviation.max()),
        'Xi_deviation_bound': float(integral[-1]),
        'Xi_deviation_margin': float(np.min(integral - deviation)),
    }


def flow_determinant(bundle, t):
    """det X(t) at the sample nearest t"""
    if t > bundle.trajectory.times[-1] + 1e-12:
        raise DomainError(f'bundle integrated only through t = {bundle.trajectory.times[-1]:g}')
    return float(np.linalg.det(bundle.X[bundle.index_at(t)]))


def flow_map(a, points, t, step=None, workers=1):
    """Images chi(t, 0)(p) of phase-space points p = (x..., xi...), shape (P, 2d)"""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    d = a.d

    def image(point):
        series = flow_integrate(a, (point[:d], point[d:]), t, step=step)
        if series.flagged:
            return None
        final = series.final
        return np.concatenate([final.x, final.xi])

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        images = list(pool.map(image, points))
    return images


def bilipschitz_estimate(a, samples, t, step=None, workers=1, min_distance=1e-9):
    """(L-, L+): min and max of |chi(p) - chi(q)| / |p - q| over sample pairs"""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    images = flow_map(a, samples, t, step=step, workers=workers)
    kept = [index for index, image in enumerate(images) if image is not None]
    if len(kept) < len(samples):
        logger.warning('bilipschitz: %d trajectories left the shell and were skipped', len(samples) - len(kept))
    points = samples[kept]
    mapped = np.array([images[index] for index in kept])
    if len(points) < 2:
        raise DomainError('bilipschitz estimate needs at least two valid samples')
    i, j = np.triu_indices(len(points), k=1)
    distance = np.linalg.norm(points[i] - points[j], axis=-1)
    usable = distance >= min_distance
    if not usable.any():
        raise DomainError('all sample pairs are closer than the lattice tolerance')
    ratios = np.linalg.norm(mapped[i] - mapped[j], axis=-1)[usable] / distance[usable]
    return float(ratios.min()), float(ratios.max())


def symplectic_jacobian(a, point, t, step=None):
    """Central-difference Jacobian of the flow map at a phase-space point, shape (2d, 2d)"""
    point = np.asarray(point, dtype=float)
    d = a.d
    hx, hxi = flow_steps(a)
    increments = np.concatenate([np.full(d, hx), np.full(d, hxi)])
    jacobian = np.empty((2 * d, 2 * d))
    for column in range(2 * d):
        shift = np.zeros(2 * d)
        shift[column] = increments[column]
        forward = flow_integrate(a, (point[:d] + shift[:d], point[d:] + shift[d:]), t, step=step).final
        backward = flow_integrate(a, (point[:d] - shift[:d], point[d:] - shift[d:]), t, step=step).final
        difference = np.concatenate([forward.x - backward.x, forward.xi - backward.xi])
        jacobian[:, column] = difference / (2 * increments[column])
    return jacobian


def flow_integrated_constants(a, samples, max_order=2, t_span=1.0, step=None, workers=1):
    """sup over samples of int_0^1 |d_x^alpha d_xi^beta a(t, chi(t, 0)(x, xi))| dt

    Returns {(|alpha|, |beta|): value} for |alpha| + |beta| <= max_order, each
    maximized over multi-indices of that order.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    d = a.d
    wanted = [(na, nb) for na in range(max_order + 1) for nb in range(max_order + 1 - na)]

    def along(point):
        series = flow_integrate(a, (point[:d], point[d:]), t_span, step=step)
        times = series.times
        x, xi = series.positions, series.frequencies
        result = {}
        for na, nb in wanted:
            best = 0.0
            hx, hxi = class_steps(a, na + nb)
            for alpha in multi_indices(d, na):
                for beta in multi_indices(d, nb):
                    if a.x_independent and na > 0:
                        continue
                    values = np.array([
                        abs(float(derivatives(a, s, xs, xis, [(alpha, beta)], hx, hxi)[0]))
                        for s, xs, xis in zip(times, x, xi)
                    ])
                    integral = float(np.sum(0.5 * np.diff(times) * (values[:-1] + values[1:]))) if len(times) > 1 else 0.0
                    best = max(best, integral)
            result[(na, nb)] = best
        return result

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        per_sample = list(pool.map(along, samples))
    return {key: max(item[key] for item in per_sample) for key in wanted}
