"""
Symbol library, finite-difference derivatives, class verification,
parabolic rescaling and x-frequency truncation
"""

import itertools
import logging
import math

import numpy as np
from scipy import fft

from config import Config
from core.errors import DomainError
from core.fields import annulus, dyadic_piece, dyadic_range, low_pass
from models.grid import Grid
from models.symbol import ClassEntry, ClassReport, ClassTag, Symbol

logger = logging.getLogger(__name__)

# central stencils (offsets, weights) of second-order accuracy per derivative order
STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def shell_bump(r):
    """1 on [1/4, 4], tapering to 0 on [1/8, 1/4] and [4, 8]"""
    return annulus(r, 0.125, 0.25, 4.0, 8.0)


# ---------------------------------------------------------------------------
# library
# ---------------------------------------------------------------------------

def make_fractional(m, band, d=1):
    """|xi|^m localized to the lambda-shell; x- and t-independent"""
    if not 1.0 <= m <= 2.0:
        raise DomainError(f'order must lie in [1, 2], got {m}')

    def evaluate(t, x, xi):
        magnitude = np.linalg.norm(xi, axis=-1)
        return magnitude ** m * shell_bump(magnitude / band)

    return Symbol(evaluate, m, band, d=d, name=f'fractional(m={m:g})', x_independent=True,
                  x_scale=1.0, params={'kind': 'fractional', 'm': m, 'band': band})


def holder_profile(grid, rho, per_octave=4):
    """Frequencies and cosine weights of a profile w with unit C^rho seminorm on the torus

    w(x) = sum_k c_k cos(zeta_k x_1), c_k ~ zeta_k^(-rho), zeta_k spread per_octave
    times per octave between 4 dxi and Nyquist/2.
    """
    line = Grid(1, grid.N, grid.L)
    lowest, highest = 4 * line.dxi, line.nyquist / 2
    count = int(math.floor(per_octave * math.log2(highest / lowest))) + 1
    targets = lowest * 2.0 ** (np.arange(count) / per_octave)
    frequencies = np.unique(np.round(targets / line.dxi)) * line.dxi
    weights = frequencies ** (-rho)
    samples = np.cos(np.outer(line.axis(), frequencies)) @ weights
    weights = weights / holder_seminorm(samples, line, rho)
    return frequencies, weights


def make_perturbed(m, band, rho, amplitude, grid, time_frequency=0.0):
    """|xi|^m bump (1 + A w(x) cos(omega t)) with w of unit C^rho seminorm"""
    frequencies, weights = holder_profile(grid, rho)
    base = make_fractional(m, band, d=grid.d)

    def profile(x):
        return np.cos(x[..., 0, None] * frequencies) @ weights

    def evaluate(t, x, xi):
        modulation = 1.0 + amplitude * profile(x) * math.cos(time_frequency * t)
        return base.evaluator(t, x, xi) * modulation

    symbol = Symbol(
        evaluate, m, band, d=grid.d, name=f'perturbed(m={m:g},rho={rho:g},A={amplitude:g})',
        x_independent=amplitude == 0, time_independent=time_frequency == 0,
        x_scale=min(grid.L, 2 * math.pi / frequencies.max()), x_grid=grid,
        params={'kind': 'perturbed', 'm': m, 'band': band, 'rho': rho, 'A': amplitude,
                'time_frequency': time_frequency},
    )
    if amplitude:
        measured = convexity_constant(symbol)
        reference = convexity_constant(base)
        if measured <= 0 or measured < Config.CONVEXITY_MIN_RATIO * reference:
            raise DomainError(
                f'convexity violated: min det d_xi^2 a / lambda^(d(m-2)) = {measured:.4g} '
                f'(unperturbed {reference:.4g}, amplitude {amplitude:g})'
            )
    return symbol


def make_harmonic(d=1):
    """(|x|^2 + |xi|^2) / 2"""

    def evaluate(t, x, xi):
        return 0.5 * (np.sum(x ** 2, axis=-1) + np.sum(xi ** 2, axis=-1))

    return Symbol(evaluate, 2.0, 1.0, d=d, name='harmonic', shell=False, params={'kind': 'harmonic'})


def make_zero(d=1):
    def evaluate(t, x, xi):
        return np.zeros(np.broadcast_shapes(x.shape, xi.shape)[:-1])

    return Symbol(evaluate, 2.0, 1.0, d=d, name='zero', shell=False, x_independent=True,
                  params={'kind': 'zero'})


def make_polynomial(kind, d=1):
    """First-order test symbols xi, x and x*xi (d = 1)"""
    evaluators = {
        'xi': lambda t, x, xi: xi[..., 0] + 0.0 * x[..., 0],
        'x': lambda t, x, xi: x[..., 0] + 0.0 * xi[..., 0],
        'x*xi': lambda t, x, xi: x[..., 0] * xi[..., 0],
    }
    if kind not in evaluators:
        raise DomainError(f'unknown polynomial symbol {kind!r}')
    return Symbol(evaluators[kind], 1.0, 1.0, d=d, name=kind, shell=False,
                  x_independent=kind == 'xi', params={'kind': 'polynomial', 'form': kind})


def build_symbol(spec, grid):
    """Library symbol from a config mapping {kind, m, band, rho, A, ...}"""
    kind = spec.get('kind', 'fractional')
    if kind == 'fractional':
        return make_fractional(spec['m'], spec['band'], d=grid.d)
    if kind == 'perturbed':
        return make_perturbed(spec['m'], spec['band'], spec['rho'], spec['A'], grid,
                              time_frequency=spec.get('time_frequency', 0.0))
    if kind == 'harmonic':
        return make_harmonic(grid.d)
    if kind == 'zero':
        return make_zero(grid.d)
    if kind == 'polynomial':
        return make_polynomial(spec['form'], grid.d)
    raise DomainError(f'unknown symbol kind {kind!r}')


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------

def multi_indices(d, order):
    """All multi-indices of total order `order` in d variables"""
    return [combo for combo in itertools.product(range(order + 1), repeat=d) if sum(combo) == order]


def _as_index(value, d):
    if isinstance(value, (int, np.integer)):
        if d != 1:
            raise DomainError('integer derivative orders require d = 1')
        return (int(value),)
    return tuple(int(v) for v in value)


def difference_stencil(alpha, beta):
    """(shifts (M, 2d), weights (M,)) of the tensor-product central stencil"""
    stencils = [STENCILS[order] for order in alpha + beta]
    shifts, weights = [], []
    for combo in itertools.product(*[range(len(stencil[0])) for stencil in stencils]):
        shifts.append([stencils[axis][0][choice] for axis, choice in enumerate(combo)])
        weights.append(np.prod([stencils[axis][1][choice] for axis, choice in enumerate(combo)]))
    return np.array(shifts, dtype=float), np.array(weights)


def derivatives(a, t, x, xi, orders, hx, hxi):
    """Finite-difference d_x^alpha d_xi^beta a for each (alpha, beta) in orders

    All stencil points are evaluated in a single call of the symbol. x and xi
    have shape (..., d); each result has the leading shape.
    """
    d = a.d
    x, xi = a._vector(x), a._vector(xi)
    plans = []
    shifts = []
    for alpha, beta in orders:
        alpha, beta = _as_index(alpha, d), _as_index(beta, d)
        stencil_shifts, weights = difference_stencil(alpha, beta)
        start = sum(len(item) for item in shifts)
        shifts.append(stencil_shifts)
        plans.append((slice(start, start + len(weights)), weights, hx ** sum(alpha) * hxi ** sum(beta)))
    shifts = np.concatenate(shifts)
    values = a(t, x[..., None, :] + hx * shifts[:, :d], xi[..., None, :] + hxi * shifts[:, d:])
    return [values[..., block] @ weights / scale for block, weights, scale in plans]


def derivative(a, t, x, xi, alpha, beta, hx, hxi):
    """Central finite-difference d_x^alpha d_xi^beta a at points x, xi of shape (P, d)"""
    return derivatives(a, t, x, xi, [(alpha, beta)], hx, hxi)[0]


def flow_steps(a):
    """(h_x, h_xi) used by the flow: 1e-4 of the x length scale and of the band"""
    return Config.FD_X_STEP * a.x_scale, Config.FD_XI_STEP * a.band


def class_steps(a, order):
    """Steps balancing truncation against rounding for an order-n difference"""
    factor = 1e-16 ** (1.0 / (order + 2))
    return 2 * factor * a.x_scale, 2 * factor * a.band


def hessian_xi(a, t, x, xi):
    """d_xi^2 a as (P, d, d) with flow steps"""
    hx, hxi = flow_steps(a)
    d = a.d
    result = np.empty(xi.shape[:-1] + (d, d))
    for i in range(d):
        for j in range(d):
            beta = [0] * d
            beta[i] += 1
            beta[j] += 1
            result[..., i, j] = derivative(a, t, x, xi, (0,) * d, tuple(beta), hx, hxi)
    return result


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def shell_samples(a, count):
    """Deterministic xi samples over the declared shell (or [-4 lambda, 4 lambda])"""
    low, high = a.shell_bounds
    if a.d == 1:
        if a.shell:
            magnitudes = np.geomspace(low, high, (count + 1) // 2)
            return np.concatenate([magnitudes, -magnitudes])[:, None]
        return np.linspace(-high, high, count)[:, None]
    radial = max(2, int(math.sqrt(count)))
    angular = max(4, count // radial)
    radii = np.geomspace(low, high, radial) if a.shell else np.linspace(0, high, radial)
    angles = 2 * math.pi * (np.arange(angular) + 0.5) / angular
    r, theta = np.meshgrid(radii, angles, indexing='ij')
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1).reshape(-1, 2)


def _strata(a):
    """xi-magnitude strata: dyadic sub-shells of the declared shell"""
    low, high = a.shell_bounds
    if not a.shell:
        low = 0.0
    edges = np.geomspace(low, high, 5) if low > 0 else np.linspace(0.0, high, 5)
    return list(zip(edges[:-1], edges[1:]))


def _x_samples(a, count):
    if a.x_independent:
        return np.zeros((1, a.d))
    if a.x_grid is not None:
        half = a.x_grid.L / 2
    else:
        half = 8.0 * a.x_scale
    per_axis = max(2, int(round(count ** (1.0 / a.d))))
    axis = -half + 2 * half * (np.arange(per_axis) + 0.5) / per_axis
    grids = np.meshgrid(*([axis] * a.d), indexing='ij')
    return np.stack(grids, axis=-1).reshape(-1, a.d)


def _t_samples(a, count):
    if a.time_independent:
        return np.array([0.0])
    return a.T * (np.arange(count) + 0.5) / count


def _stratum_xi(a, bounds, count):
    low, high = bounds
    if a.d == 1:
        half = max(1, count // 2)
        magnitudes = low + (high - low) * (np.arange(half) + 0.5) / half
        return np.concatenate([magnitudes, -magnitudes])[:, None]
    radial = max(2, int(math.sqrt(count)))
    angular = max(2, count // radial)
    radii = low + (high - low) * (np.arange(radial) + 0.5) / radial
    angles = 2 * math.pi * (np.arange(angular) + 0.5) / angular
    r, theta = np.meshgrid(radii, angles, indexing='ij')
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1).reshape(-1, 2)


def stratified_sample(a, points_per_stratum=None, sample_limit=None):
    """Lattice samples (t, x, xi) per stratum and a flag for a clipped budget"""
    points_per_stratum = points_per_stratum or Config.CLASS_POINTS_PER_STRATUM
    sample_limit = sample_limit or Config.CLASS_SAMPLE_LIMIT
    strata = _strata(a)
    flagged = False
    if points_per_stratum * len(strata) > sample_limit:
        points_per_stratum = sample_limit // len(strata)
        flagged = True
    times = _t_samples(a, 8)
    xs = _x_samples(a, 16)
    per_xi = max(2, math.ceil(points_per_stratum / (len(times) * len(xs))))
    samples = []
    for bounds in strata:
        xis = _stratum_xi(a, bounds, per_xi)
        x_grid = np.repeat(xs, len(xis), axis=0)
        xi_grid = np.tile(xis, (len(xs), 1))
        samples.append((times, x_grid, xi_grid))
    return samples, flagged


# ---------------------------------------------------------------------------
# seminorms and class verification
# ---------------------------------------------------------------------------

def holder_seminorm(values, grid, r):
    """Dyadic seminorm sup_j 2^(jr) ||Delta_j f||_inf over the trailing grid axes"""
    values = np.asarray(values)
    axes = tuple(range(values.ndim - grid.d, values.ndim))
    spectrum = fft.fftn(values, axes=axes)
    magnitude = grid.frequency_magnitude()
    best = np.zeros(values.shape[:values.ndim - grid.d])
    for j in dyadic_range(grid):
        piece = dyadic_piece(magnitude, j)
        if not piece.any():
            continue
        block = fft.ifftn(spectrum * piece, axes=axes)
        best = np.maximum(best, 2.0 ** (j * r) * np.abs(block).max(axis=axes))
    return best


def _profile_on_grid(a, t, grid, xi):
    """a(t, x_grid, xi_p) as (P, *grid.shape)"""
    points = grid.points()
    x = points[None]
    xi = xi.reshape((len(xi),) + (1,) * grid.d + (a.d,))
    return a(t, x, xi)


def xi_derivative_seminorm(a, t, beta, r, grid=None, xi_count=17):
    """sup over shell samples xi of the C^r_x seminorm of d_xi^beta a(t, ., xi)"""
    if a.x_independent:
        return 0.0
    grid = grid or a.x_grid
    if grid is None:
        raise DomainError(f'Hölder seminorms of {a.name} need a periodic x grid')
    beta = _as_index(beta, a.d)
    xis = shell_samples(a, xi_count)
    hxi = class_steps(a, sum(beta))[1]
    shifts, weights = difference_stencil((0,) * a.d, beta)
    total = 0.0
    for shift, weight in zip(shifts[:, a.d:], weights):
        total = total + weight * _profile_on_grid(a, t, grid, xis + hxi * shift)
    total = total / hxi ** sum(beta)
    return float(holder_seminorm(total, grid, r).max())


def _holder_entries(a, k, r, budget):
    if a.x_grid is None and not a.x_independent:
        raise DomainError(f'Hölder class check of {a.name} needs a periodic x grid')
    times = _t_samples(a, 8)
    entries = []
    for order in range(k + 1):
        for beta in multi_indices(a.d, order):
            sups = [xi_derivative_seminorm(a, t, beta, r) for t in times]
            measured = _time_integral(a, sups) / a.band ** (a.order - order)
            label = beta[0] if a.d == 1 else list(beta)
            entries.append(ClassEntry('r', label, float(measured), _budget(budget, 'r', label)))
    return entries


def _time_integral(a, values):
    values = np.asarray(values, dtype=float)
    if a.time_independent:
        return a.T * float(values.max())
    return a.T * float(values.mean())


def _budget(budget, alpha, beta):
    if isinstance(budget, dict):
        return float(budget.get((alpha, beta if not isinstance(beta, list) else tuple(beta)),
                                budget.get('default', Config.CLASS_BUDGET)))
    return float(budget)


def verify_class(a, tag, k=None, r=None, budget=None, max_order=None,
                 points_per_stratum=None, sample_limit=None):
    """Measure the constants of a symbol class on a stratified sample

    Measured values are sample sups (lower bounds of the true constants). A
    clipped sampling budget yields a report with flagged=True.
    """
    tag = ClassTag(tag)
    k = Config.CLASS_DEFAULT_K if k is None else k
    budget = Config.CLASS_BUDGET if budget is None else budget
    max_order = Config.CLASS_MAX_ORDER if max_order is None else max_order
    if max_order > 4:
        raise DomainError('derivative orders above 4 are not supported')

    if tag is ClassTag.HOLDER:
        if r is None:
            raise DomainError('the Hölder class needs r')
        entries = _holder_entries(a, k, r, budget)
        report = ClassReport(tag, k, r, entries, symbol=a.name)
        logger.info('verify_class %s %s: %s', tag.value, a.name, 'pass' if report.passed else 'fail')
        return report

    samples, flagged = stratified_sample(a, points_per_stratum, sample_limit)
    wanted = []
    for total in range(0, max_order + 1):
        for x_order in range(total + 1):
            xi_order = total - x_order
            if tag is ClassTag.S00 and total < k:
                continue
            if tag is ClassTag.L1S and x_order < k:
                continue
            if tag is ClassTag.S1 and x_order > 0:
                continue
            for alpha in multi_indices(a.d, x_order):
                for beta in multi_indices(a.d, xi_order):
                    wanted.append((alpha, beta))

    entries = []
    count = 0
    for alpha, beta in wanted:
        x_order, xi_order = sum(alpha), sum(beta)
        if a.x_independent and x_order > 0:
            per_time = [0.0]
        else:
            hx, hxi = class_steps(a, x_order + xi_order)
            per_time = []
            for times, xs, xis in samples:
                for index, t in enumerate(times):
                    values = np.abs(derivative(a, t, xs, xis, alpha, beta, hx, hxi))
                    while len(per_time) <= index:
                        per_time.append(0.0)
                    per_time[index] = max(per_time[index], float(values.max()))
                    count += len(xs)
        measured = _class_scale(a, tag, k, per_time, x_order, xi_order)
        label_alpha = alpha[0] if a.d == 1 else list(alpha)
        label_beta = beta[0] if a.d == 1 else list(beta)
        entries.append(ClassEntry(label_alpha, label_beta, measured, _budget(budget, label_alpha, label_beta)))

    if r is not None:
        entries.extend(_holder_entries(a, k, r, budget))
    report = ClassReport(tag, k, r, entries, sample_count=count, flagged=flagged, symbol=a.name)
    logger.info('verify_class %s %s: %s (%d samples%s)', tag.value, a.name,
                'pass' if report.passed else 'fail', count, ', partial' if flagged else '')
    return report


def _class_scale(a, tag, k, per_time, x_order, xi_order):
    if tag is ClassTag.S00:
        return float(max(per_time))
    if tag is ClassTag.S1:
        return float(max(per_time)) / a.band ** (a.order - xi_order)
    weight = a.band ** (a.order - xi_order + a.delta * (x_order - k))
    return _time_integral(a, per_time) / weight


def rescaled_bound(m, band, tau, x_order, xi_order):
    """Derivative bound on the rescaled symbol for |alpha| = x_order, |beta| = xi_order"""
    small = 1.0 / (tau * band ** m)
    if x_order >= 2:
        return tau ** (x_order / 2) * small ** (xi_order / 2)
    if x_order == 1:
        return small ** ((xi_order - 1) / 2)
    return small ** ((xi_order - 2) / 2)


def convexity_constant(a, t=0.0, xi_count=33, x_count=None):
    """min over samples of det d_xi^2 a / lambda^(d(m-2))"""
    xis = shell_samples(a, xi_count)
    if a.x_independent:
        xs = np.zeros((1, a.d))
    elif a.x_grid is not None:
        xs = a.x_grid.points().reshape(-1, a.d)
        if x_count is not None and len(xs) > x_count:
            xs = xs[:: len(xs) // x_count]
    else:
        xs = _x_samples(a, x_count or 64)
    x = np.repeat(xs, len(xis), axis=0)
    xi = np.tile(xis, (len(xs), 1))
    det = np.linalg.det(hessian_xi(a, t, x, xi))
    return float(det.min() / a.band ** (a.d * (a.order - 2)))


# ---------------------------------------------------------------------------
# rescaling and truncation
# ---------------------------------------------------------------------------

def rescale(a, tau, band=None):
    """tau a(tau t, mu x, xi / mu) with mu = tau^(1/2) lambda^(-delta)"""
    band = a.band if band is None else band
    if not 0 < tau <= 1:
        raise DomainError(f'tau must lie in (0, 1], got {tau}')
    if tau * band ** a.order < 1:
        raise DomainError(
            f'tau lambda^m = {tau * band ** a.order:.3g} < 1: Sobolev-embedding regime, '
            'no rescaled analysis'
        )
    mu = math.sqrt(tau) * band ** (-a.delta)
    base = a.evaluator

    def evaluate(t, x, xi):
        return tau * base(tau * t, mu * x, xi / mu)

    grid = Grid(a.x_grid.d, a.x_grid.N, a.x_grid.L / mu) if a.x_grid is not None else None
    return a.derived(
        evaluate, band=mu * band, x_scale=a.x_scale / mu, x_grid=grid, name=f'rescaled({a.name})',
        params={**a.params, 'tau': tau, 'mu': mu, 'parent_band': band},
    )


def rescale_lifespan(a, T):
    """T a(T t, T^(1/m) x, T^(-1/m) xi) with band T^(1/m) lambda"""
    if not 0 < T <= 1:
        raise DomainError(f'lifespan T must lie in (0, 1], got {T}')
    stretch = T ** (1.0 / a.order)
    base = a.evaluator

    def evaluate(t, x, xi):
        return T * base(T * t, stretch * x, xi / stretch)

    grid = Grid(a.x_grid.d, a.x_grid.N, a.x_grid.L / stretch) if a.x_grid is not None else None
    return a.derived(
        evaluate, band=stretch * a.band, x_scale=a.x_scale / stretch, x_grid=grid,
        name=f'lifespan({a.name},T={T:g})', params={**a.params, 'lifespan': T},
    )


def _low_spectrum(a, t, grid, xi, cutoff):
    """x-spectrum of a(t, ., xi_p) after the low-pass chi(|zeta| / cutoff)"""
    axes = tuple(range(1, grid.d + 1))
    profile = _profile_on_grid(a, t, grid, xi)
    return fft.fftn(profile, axes=axes) * low_pass(grid.frequency_magnitude() / cutoff)


def truncate_x_frequency(a, sigma, grid=None, chunk=256):
    """Split a = a_low + a_high at x-frequency lambda^sigma

    a_low keeps x-frequencies up to 2 lambda^sigma (smooth cutoff); a_high is
    defined as a - a_low, so the decomposition is exact pointwise.
    """
    if not 0 < sigma <= 1:
        raise DomainError(f'sigma must lie in (0, 1], got {sigma}')
    cutoff = a.band ** sigma
    meta = {**a.params, 'sigma': sigma, 'cutoff': cutoff}
    if a.x_independent:
        zero = make_zero(a.d)
        high = a.derived(zero.evaluator, name=f'high({a.name})', x_independent=True, params=meta)
        return a.derived(a.evaluator, name=f'low({a.name})', params=meta), high

    grid = grid or a.x_grid
    if grid is None:
        raise DomainError(f'truncating {a.name} needs a periodic x grid')
    frequencies = grid.frequencies().reshape(-1, grid.d)
    keep = np.nonzero(low_pass(np.linalg.norm(frequencies, axis=-1) / cutoff) > 0)[0]
    modes = frequencies[keep]
    origin = np.full(grid.d, -grid.L / 2)

    def evaluate_low(t, x, xi):
        x, xi = np.broadcast_arrays(x, xi)
        shape = x.shape[:-1]
        x = x.reshape(-1, grid.d)
        xi = xi.reshape(-1, grid.d)
        out = np.empty(len(x))
        for start in range(0, len(x), chunk):
            block = slice(start, start + chunk)
            spectrum = _low_spectrum(a, t, grid, xi[block], cutoff).reshape(len(xi[block]), -1)[:, keep]
            phases = np.exp(1j * (x[block] - origin) @ modes.T)
            out[block] = np.real(np.sum(spectrum * phases, axis=-1)) / grid.size
        return out.reshape(shape)

    base = a.evaluator

    def evaluate_high(t, x, xi):
        return base(t, x, xi) - evaluate_low(t, x, xi)

    low = a.derived(evaluate_low, name=f'low({a.name})', params=meta)
    high = a.derived(evaluate_high, name=f'high({a.name})', params=meta)
    return low, high


def truncation_remainder_norm(a, sigma, grid=None, xi_count=33):
    """||lambda^(-m) a_(>lambda^sigma)||_(L1_t Linf_(x, xi)) evaluated on the grid"""
    if a.x_independent:
        return 0.0
    grid = grid or a.x_grid
    if grid is None:
        raise DomainError(f'truncating {a.name} needs a periodic x grid')
    cutoff = a.band ** sigma
    axes = tuple(range(1, grid.d + 1))
    xis = shell_samples(a, xi_count)
    sups = []
    for t in _t_samples(a, 8):
        profile = _profile_on_grid(a, t, grid, xis)
        high = fft.ifftn(fft.fftn(profile, axes=axes) * (1 - low_pass(grid.frequency_magnitude() / cutoff)),
                         axes=axes)
        sups.append(np.abs(high).max())
    return _time_integral(a, sups) / a.band ** a.order
