"""
Dispersive decay fits, Strichartz scans, admissibility and exponent bookkeeping
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np
from scipy import stats

from config import Config
from core.errors import DomainError, NumericalValidityError
from core.fields import band_bump, time_norm
from core.propagate import evolve, exact_multiplier_state
from core.symbols import truncation_remainder_norm
from models.estimate import DecayFit, ExponentFit, ExponentTable, StrichartzScan, TruncationScan
from models.grid import Grid

logger = logging.getLogger(__name__)

INFINITY = float('inf')


# ---------------------------------------------------------------------------
# exact arithmetic
# ---------------------------------------------------------------------------

def _rational(value):
    """Fraction for finite exponents, None for infinity"""
    if isinstance(value, str):
        if value.strip().lower() in ('inf', 'infinity', '∞'):
            return None
        return Fraction(value.strip())
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if math.isinf(value):
        return None
    return Fraction(repr(float(value)))


def _reciprocal(value):
    rational = _rational(value)
    return Fraction(0) if rational is None else 1 / rational


def admissible(p, q, d):
    """2/p + d/q = d/2 with 2 <= p <= inf, 2 <= q <= inf and (p, q) != (2, inf)"""
    inv_p, inv_q = _reciprocal(p), _reciprocal(q)
    if not (0 <= inv_p <= Fraction(1, 2) and 0 <= inv_q <= Fraction(1, 2)):
        return False
    if inv_p == Fraction(1, 2) and inv_q == 0:
        return False
    return 2 * inv_p + d * inv_q == Fraction(d, 2)


def truncation_sigma(r):
    """sigma = 2 / (2 + r)"""
    r = _rational(r)
    return Fraction(2) / (2 + r)


def partition_mu_exponent(m, r):
    """mu = lambda^((m - 1) + (2 - r)/(2 + r)) for C^r coefficients"""
    m, r = _rational(m), _rational(r)
    return (m - 1) + (2 - r) / (2 + r)


def _gains(r, eps):
    gain_d1 = Fraction(1, 2) - Fraction(2) / (2 * r + 3)
    gain_dge2 = (2 * r - 1) / (2 * r + 3) - eps
    return gain_d1, gain_dge2


def exponent_bookkeeper(d, r, eps=0, p=None):
    """Strichartz gains and the bookkeeping exponents at coefficient regularity r > 2"""
    r, eps = _rational(r), _rational(eps)
    if r is None or r <= 2:
        raise DomainError(f'r must exceed 2, got {r}')
    if d < 1:
        raise DomainError(f'dimension must be positive, got {d}')
    return _table(d, r, eps, p)


def exponent_limits(d, eps=0, p=None):
    """The table at r = 2, i.e. the one-sided limits r -> 2+ of every entry"""
    return _table(d, Fraction(2), _rational(eps), p)


def _table(d, r, eps, p):
    gain_d1, gain_dge2 = _gains(r, eps)
    if p is None:
        p = Fraction(4) if d == 1 else 2 + eps
    p = _rational(p)
    limit_d1, limit_dge2 = _gains(Fraction(2), Fraction(0))
    return ExponentTable(
        d=d,
        r=r,
        eps=eps,
        gain_d1=gain_d1,
        gain_dge2=gain_dge2,
        sigma=truncation_sigma(r - Fraction(1, 2)),
        mu_exponent=(5 - 2 * r) / (3 + 2 * r) + Fraction(1, 2),
        derivative_loss=Fraction(8) / (p * (3 + 2 * r)),
        p=p,
        references={
            'constant_coefficient': Fraction(3, 8) if d == 1 else Fraction(3, 4),
            'paracomposition_d1': Fraction(1, 4),
            'equal_partition': Fraction(3, 20) if d == 1 else Fraction(3, 10),
        },
        limits={'d1': limit_d1, 'dge2': limit_dge2},
    )


def regularity_window(d, s, r=None, mu=None):
    """Well-posedness and paralinearization thresholds for Sobolev index s"""
    s = _rational(s)
    mu = _rational(mu) if mu is not None else exponent_limits(d).gain
    window = {
        's_min': Fraction(d, 2) + 2 - mu,
        'r_max': s - Fraction(d, 2) + mu,
        's_min_paralinear': Fraction(3, 2) + Fraction(d, 2),
        'r_max_paralinear': s - Fraction(d, 2) + Fraction(1, 2),
    }
    window['well_posed'] = s > window['s_min']
    if r is not None:
        r = _rational(r)
        window['r_admissible'] = 2 < r < window['r_max']
        window['paralinear_admissible'] = s > window['s_min_paralinear'] and 2 < r < window['r_max_paralinear']
    return window


# ---------------------------------------------------------------------------
# fits and time ladders
# ---------------------------------------------------------------------------

def fit_exponent(xs, ys):
    """OLS of log y on log x"""
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if len(xs) < 2 or (ys <= 0).any() or (xs <= 0).any():
        raise DomainError('exponent fits need at least two positive samples')
    logs_x, logs_y = np.log(xs), np.log(ys)
    fit = stats.linregress(logs_x, logs_y)
    residual = float(np.sqrt(np.mean((logs_y - fit.intercept - fit.slope * logs_x) ** 2)))
    return ExponentFit(float(fit.slope), float(fit.intercept), residual)


def time_ladder(band, m, T=1.0, samples=None):
    """Uniform segments [0, 8 lambda^-m], then factor-8 segments up to T"""
    samples = samples or Config.LADDER_SAMPLES
    edges = [0.0, min(T, 8 * band ** (-m))]
    while edges[-1] < T:
        edges.append(min(T, 8 * edges[-1]))
    return [np.linspace(start, stop, samples + 1) for start, stop in zip(edges[:-1], edges[1:])]


def piecewise_mixed_norm(segments, norms, p):
    """L^p_t norm over uniform segments; trapezoid p-th powers add across segments"""
    if not segments:
        raise DomainError('mixed norm of an empty time series')
    if math.isinf(p):
        return float(max(np.max(values) for values in norms))
    total = 0.0
    for times, values in zip(segments, norms):
        if len(times) < 2:
            continue
        total += time_norm(values, p, times[1] - times[0], rule='trapezoid') ** p
    return float(total ** (1.0 / p))


def strichartz_ratio(segments, norms_q, norms_2, p, forcing_norm=0.0, T=1.0, mu=None):
    """||u||_(L^p L^q) / (||u||_(L^inf L^2) + ||f||_(L^1 L^2)), or the mu-weighted form

    With mu the denominator is ||u||_(L^1 L^2) + mu^-1 ||f||_(L^1 L^2) and the
    ratio is divided by mu^(1/p). forcing_norm is ||f(t)||_2 of a time-constant f.
    """
    numerator = piecewise_mixed_norm(segments, norms_q, p)
    forcing_mass = T * forcing_norm
    if mu is None:
        denominator = piecewise_mixed_norm(segments, norms_2, INFINITY) + forcing_mass
        return numerator / denominator
    denominator = piecewise_mixed_norm(segments, norms_2, 1.0) + forcing_mass / mu
    return numerator / (denominator * mu ** (0.0 if math.isinf(p) else 1.0 / p))


def _next_power(value):
    return 2 ** max(3, math.ceil(math.log2(value)))


def scan_grid(a, T=1.0):
    """Torus wide enough for the data's group velocities over [0, T], resolving 4.5 lambda"""
    band, m = a.band, a.order
    speed = m * (4 * band) ** (m - 1)
    length = min(Config.MAX_PERIOD, _next_power(max(32.0, 2 * speed * T + 32.0)))
    if 2 * speed * T + 32.0 > Config.MAX_PERIOD:
        logger.warning('scan grid for %s capped at L = %g; wrap-around expected', a.name, length)
    points = _next_power(4.5 * band * length / math.pi)
    return Grid(a.d, points, float(length))


def _states(a, u0, times, forcing=None, grid=None):
    """u(t) at each requested time: closed form for constant coefficients, evolve otherwise"""
    if a.x_independent and a.time_independent:
        return [exact_multiplier_state(a, u0, t, forcing) for t in times], False
    constant = None if forcing is None else (lambda t: forcing)
    result = evolve(a, u0, forcing=constant, T=float(max(times)), record_times=times)
    lookup = {round(t, 12): snapshot for t, snapshot in zip(result.times, result.snapshots)}
    states = [lookup[round(result.dt * round(t / result.dt), 12)] for t in times]
    return states, result.flagged


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

def decay_times(band, m, samples=None):
    """Log-spaced samples on [lambda^-m, 1]"""
    samples = samples or Config.TIME_SAMPLES
    return np.geomspace(band ** (-m), 1.0, samples)


def dispersive_scan(a, times=None, grid=None):
    """R(t) = ||u(t)||_inf / ||u_0||_1 for the L1-normalized band bump, with its log-log fit"""
    grid = grid or (a.x_grid if not a.x_independent else None) or scan_grid(a)
    t_min = a.band ** (-a.order)
    times = decay_times(a.band, a.order) if times is None else np.asarray(times, dtype=float)
    times = times[times >= t_min * (1 - 1e-12)]
    if len(times) < 2:
        raise DomainError('decay fit needs at least two samples with t >= lambda^-m')
    u0 = band_bump(grid, a.band, normalize='l1')
    states, flagged = _states(a, u0, times)
    if flagged:
        raise NumericalValidityError(f'evolution of {a.name} flagged invalid; no decay fit')
    ratios = np.array([state.norm(INFINITY) for state in states]) / u0.norm(1.0)
    fit = fit_exponent(times, ratios)
    prefactor = float(np.exp(np.mean(np.log(ratios) + (a.d / 2) * np.log(times))))
    logger.info('dispersive_scan %s lambda=%g: slope %.4f prefactor %.4g', a.name, a.band, fit.exponent, prefactor)
    return DecayFit(
        band=a.band, delta=a.delta, d=a.d, times=times, ratios=ratios, slope=fit.exponent,
        prefactor=prefactor, residual=fit.residual, t_min=t_min, symbol=a.name,
    )


def prefactor_exponent(fits):
    """Growth exponent of the decay prefactor across bands"""
    return fit_exponent([fit.band for fit in fits], [fit.prefactor for fit in fits])


def _strichartz_point(a, p, q, forcing, mu, T):
    grid = a.x_grid if not a.x_independent and a.x_grid is not None else scan_grid(a, T)
    u0 = band_bump(grid, a.band, normalize='l2')
    f = u0 if forcing == 'constant' else None
    segments = time_ladder(a.band, a.order, T)
    states, flagged = _states(a, u0, np.concatenate(segments), forcing=f)
    if flagged:
        raise NumericalValidityError(f'evolution of {a.name} flagged invalid at lambda = {a.band:g}')
    norms_q, norms_2, start = [], [], 0
    for times in segments:
        block = states[start:start + len(times)]
        start += len(times)
        norms_q.append(np.array([state.norm(q) for state in block]))
        norms_2.append(np.array([state.norm() for state in block]))
    forcing_norm = f.norm() if f is not None else 0.0
    return strichartz_ratio(segments, norms_q, norms_2, p, forcing_norm=forcing_norm, T=T, mu=mu)


def strichartz_scan(family, bands, p, q, forcing='none', mu_exponent=None, T=1.0, workers=1, tolerance=None):
    """Fitted lambda-growth of the Strichartz ratio for symbols family(lambda)

    mu_exponent, when given, weights each point by mu = lambda^mu_exponent and
    raises the bound exponent by mu_exponent / p.
    """
    bands = [float(band) for band in bands]
    if len(bands) < 4:
        raise DomainError(f'Strichartz scans need at least 4 bands, got {len(bands)}')
    if forcing not in ('none', 'constant'):
        raise DomainError(f'unknown forcing {forcing!r}')
    symbols = [family(band) for band in bands]
    d = symbols[0].d
    if not admissible(p, q, d):
        raise DomainError(f'(p, q) = ({p}, {q}) is not admissible in d = {d}')
    tolerance = Config.FIT_TOLERANCE if tolerance is None else tolerance

    def point(symbol):
        mu = None if mu_exponent is None else symbol.band ** mu_exponent
        return _strichartz_point(symbol, p, q, forcing, mu, T)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        ratios = list(pool.map(point, symbols))
    fit = fit_exponent(bands, ratios)
    inverse_p = 0.0 if math.isinf(p) else 1.0 / p
    bound = 2 * symbols[0].delta * inverse_p
    if mu_exponent is not None:
        bound += mu_exponent * inverse_p
    scan = StrichartzScan(
        bands=bands, ratios=ratios, fit=fit, p=p, q=q, d=d, bound_exponent=bound,
        tolerance=tolerance, mu_exponent=mu_exponent, symbol=symbols[0].name,
    )
    logger.info('strichartz_scan %s (p, q) = (%g, %g): exponent %.4f vs bound %.4f',
                scan.symbol, p, q, fit.exponent, bound)
    return scan


def truncation_scan(family, bands, r, sigma=None, tolerance=0.1, workers=1):
    """Fitted lambda-decay of the x-frequency truncation remainder of symbols family(lambda)

    sigma defaults to 2 / (2 + r); the remainder should decay like lambda^(-r sigma).
    """
    bands = [float(band) for band in bands]
    if len(bands) < 2:
        raise DomainError(f'truncation scans need at least 2 bands, got {len(bands)}')
    if not r > 2:
        raise DomainError(f'r must exceed 2, got {r}')
    sigma = float(truncation_sigma(r)) if sigma is None else float(sigma)
    symbols = [family(band) for band in bands]
    if any(symbol.x_independent for symbol in symbols):
        raise DomainError('truncation scans need x-dependent symbols')

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        norms = list(pool.map(lambda symbol: truncation_remainder_norm(symbol, sigma), symbols))
    fit = fit_exponent(bands, norms)
    scan = TruncationScan(r=float(r), sigma=sigma, bands=bands, norms=norms, fit=fit,
                          tolerance=tolerance, symbol=symbols[0].name)
    logger.info('truncation_scan %s sigma=%.4f: exponent %.4f vs %.4f',
                scan.symbol, sigma, fit.exponent, scan.target)
    return scan
