"""
Gravity-capillary symbols, paradifferential quantization and the good unknown

With G = 1 + |grad eta|^2:

    lambda = sqrt(G |xi|^2 - (grad eta . xi)^2)
    ell    = G^(-1/2) (|xi|^2 - (grad eta . xi)^2 / G)
    gamma  = sqrt(ell lambda)
    q      = G^(-1/2)
    p      = G^(-5/4) |xi|^(1/2)        (principal part)

T_a u = sum_j S_(j-3)(a) Delta_j u, where S_(j-3) low-passes the coefficient in x
to |zeta| <= 2^(j-3) and Delta_j is the dyadic piece psi_j of module fields.
"""

import logging
import math
import numbers

import numpy as np
from scipy import fft

from config import Config
from core.errors import DomainError
from core.estimates import fit_exponent
from core.fields import dyadic_piece, dyadic_range, low_pass, lp_bump
from core.symbols import difference_stencil, holder_seminorm
from models.estimate import SymbolNormScan
from models.grid import SampledField
from models.surface import SeparableSymbol, SurfaceData, WWSymbols

logger = logging.getLogger(__name__)

# relative spectral mass a truncated shell may carry before it is reported
TRUNCATION_REPORT_LEVEL = 1e-12


# ---------------------------------------------------------------------------
# surfaces
# ---------------------------------------------------------------------------

def _lattice(grid, wavenumber):
    return round(wavenumber / grid.dxi) * grid.dxi


def ripple_surface(grid, amplitude, wavenumber, psi=None, V=None, B=None):
    """eta = amplitude cos(k x_1) with k snapped to the dual lattice"""
    k = _lattice(grid, wavenumber)
    x = grid.points()[..., 0]
    return SurfaceData(grid, amplitude * np.cos(k * x), psi, V=V, B=B)


def tilted_surface(grid, slope, psi=None, V=None, B=None):
    """eta = slope x_1 with its exact constant gradient (eta itself is not periodic)"""
    x = grid.points()[..., 0]
    gradient = np.zeros((grid.d,) + grid.shape)
    gradient[0] = slope
    return SurfaceData(grid, slope * x, psi, V=V, B=B, grad_eta=gradient)


def _wavenumbers(grid, axis):
    """i zeta_axis with the Nyquist mode removed so derivatives of real fields stay real"""
    wave = grid.frequencies()[..., axis].copy()
    wave[np.isclose(np.abs(wave), grid.nyquist)] = 0.0
    return wave


def spectral_gradient(grid, values):
    """(d, *shape) gradient of a periodic real field"""
    spectrum = fft.fftn(values)
    return np.stack([fft.ifftn(1j * _wavenumbers(grid, axis) * spectrum).real for axis in range(grid.d)])


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

def _components(grid, xi):
    """xi (..., d) as d arrays shaped (1,)*d + xi.shape[:-1]"""
    xi = np.asarray(xi, dtype=float)
    if grid.d == 1 and (xi.ndim == 0 or xi.shape[-1] != 1):
        xi = xi[..., None]
    lead = xi.shape[:-1]
    return [xi[..., k].reshape((1,) * grid.d + lead) for k in range(grid.d)], lead


def build_symbols(surface):
    """Evaluators lambda, ell, gamma, p and the array q for one sampled surface"""
    grid = surface.grid
    gradient = surface.grad_eta if surface.grad_eta is not None else spectral_gradient(grid, surface.eta)
    G = 1.0 + np.sum(gradient ** 2, axis=0)

    def expand(array, lead):
        return array.reshape(array.shape + (1,) * len(lead))

    def parts(xi):
        components, lead = _components(grid, xi)
        shape = grid.shape + lead
        slopes = [expand(gradient[k], lead) for k in range(grid.d)]
        xi2 = sum(component ** 2 for component in components)
        dot = sum(slope * component for slope, component in zip(slopes, components))
        # Lagrange identity: |g|^2 |xi|^2 - (g . xi)^2, which vanishes identically in d = 1
        cross = sum(
            (slopes[i] * components[j] - slopes[j] * components[i]) ** 2
            for i in range(grid.d) for j in range(i + 1, grid.d)
        )
        return np.broadcast_to(xi2, shape), dot, cross, expand(G, lead), shape

    def lam(xi):
        xi2, _, cross, _, shape = parts(xi)
        return np.broadcast_to(np.sqrt(xi2 + cross), shape).copy()

    def ell(xi):
        xi2, dot, _, g, shape = parts(xi)
        return np.broadcast_to(g ** -0.5 * (xi2 - dot ** 2 / g), shape).copy()

    def gamma(xi):
        return np.sqrt(np.maximum(ell(xi), 0.0) * lam(xi))

    def p(xi):
        xi2, _, _, g, shape = parts(xi)
        return np.broadcast_to(g ** -1.25 * xi2 ** 0.25, shape).copy()

    symbols = WWSymbols(grid, gradient, lam, ell, gamma, G ** -0.5, p)
    logger.debug('build_symbols %r: max slope %.3g', grid, math.sqrt(float(G.max()) - 1.0))
    return symbols


def identity_report(symbols, xis):
    """Worst-case deviations of the pointwise identities on frequency samples xis (K, d)"""
    xis = np.asarray(xis, dtype=float)
    magnitude = np.linalg.norm(xis, axis=-1)
    lam, ell, gamma = symbols.lam(xis), symbols.ell(xis), symbols.gamma(xis)
    scale = np.maximum(np.abs(ell * lam), np.finfo(float).tiny)
    degrees = {'lambda': (symbols.lam, 1.0), 'ell': (symbols.ell, 2.0), 'gamma': (symbols.gamma, 1.5),
               'p': (symbols.p, 0.5)}
    homogeneity = {}
    for name, (evaluator, degree) in degrees.items():
        base = evaluator(xis)
        scaled = evaluator(2 * xis)
        homogeneity[name] = float(np.max(np.abs(scaled - 2 ** degree * base) / np.maximum(np.abs(scaled), 1e-300)))
    return {
        'gamma_squared_error': float(np.max(np.abs(gamma ** 2 - ell * lam) / scale)),
        'lambda_minus_xi_min': float(np.min(lam - magnitude)),
        'ell_min': float(ell.min()),
        'homogeneity_error': homogeneity,
    }


def principal_p(symbols):
    """p as the separable symbol q^(5/2) |xi|^(1/2)"""
    return SeparableSymbol(symbols.q ** 2.5, lambda xi: np.linalg.norm(xi, axis=-1) ** 0.5)


# ---------------------------------------------------------------------------
# paradifferential quantization
# ---------------------------------------------------------------------------

def _shells(grid):
    """Dyadic shells of the paraproduct ladder and the ones cut off by the Nyquist frequency"""
    lowest = round(math.log2(Config.PARAPRODUCT_MIN_FREQUENCY)) + 1
    ladder = [j for j in dyadic_range(grid) if j >= lowest]
    cut = [j for j in ladder if 2.0 ** (j + 1) > grid.nyquist]
    return ladder, cut


def _coefficient_cutoff(grid, j):
    return low_pass(grid.frequency_magnitude() / 2.0 ** (j - Config.PARAPRODUCT_CUTOFF_LOG2))


def _multiplication(coefficient, spectrum, grid, ladder):
    """sum_j S_(j-3)(c) Delta_j u for a coefficient array"""
    coefficient_hat = fft.fftn(np.broadcast_to(coefficient, grid.shape))
    magnitude = grid.frequency_magnitude()
    total = np.zeros(grid.shape, dtype=complex)
    for j in ladder:
        piece = dyadic_piece(magnitude, j)
        if not piece.any():
            continue
        low = fft.ifftn(coefficient_hat * _coefficient_cutoff(grid, j))
        total += low * fft.ifftn(piece * spectrum)
    return total


def _general(evaluator, spectrum, grid, ladder):
    """sum_j sum_xi S_(j-3)(a(., xi)) psi_j(xi) u^(xi) e^{i x xi} for an (x, xi) evaluator"""
    magnitude = grid.frequency_magnitude().reshape(-1)
    frequencies = grid.frequencies().reshape(-1, grid.d)
    flat = spectrum.reshape(-1)
    positions = grid.points() + grid.L / 2
    axes = tuple(range(grid.d))
    total = np.zeros(grid.shape, dtype=complex)
    sup = 0.0
    for j in ladder:
        weights = dyadic_piece(magnitude, j) * flat
        index = np.nonzero(weights)[0]
        if not len(index):
            continue
        xis = frequencies[index]
        values = evaluator(xis)
        sup = max(sup, float(np.abs(values).max()))
        cutoff = _coefficient_cutoff(grid, j).reshape(grid.shape + (1,))
        low = fft.ifftn(fft.fftn(values, axes=axes) * cutoff, axes=axes)
        waves = np.exp(1j * positions @ xis.T)
        total += np.sum(low * waves * weights[index], axis=-1) / grid.size
    return total, sup


def _paradiff(a, u):
    grid = u.grid
    if u.spectral:
        raise DomainError('paradiff_apply expects a physical-space field')
    ladder, cut = _shells(grid)
    spectrum = fft.fftn(u.values)
    magnitude = grid.frequency_magnitude()

    if isinstance(a, numbers.Number):
        values = _multiplication(np.full(grid.shape, a), spectrum, grid, ladder)
        sup = abs(a)
    elif isinstance(a, np.ndarray):
        if a.shape != grid.shape:
            raise DomainError(f'coefficient shape {a.shape} does not match grid shape {grid.shape}')
        values = _multiplication(a, spectrum, grid, ladder)
        sup = float(np.abs(a).max())
    elif isinstance(a, SeparableSymbol):
        multiplier = np.asarray(a.multiplier(grid.frequencies()), dtype=float)
        values = _multiplication(a.coefficient, multiplier * spectrum, grid, ladder)
        active = np.abs(spectrum) > 0
        sup = float(np.abs(a.coefficient).max()) * (float(np.abs(multiplier[active]).max()) if active.any() else 0.0)
    elif callable(a):
        values, sup = _general(a, spectrum, grid, ladder)
    else:
        raise DomainError(f'cannot quantize a symbol of type {type(a).__name__}')

    power = np.abs(spectrum) ** 2
    total = power.sum()
    truncated = []
    for j in cut:
        share = float((dyadic_piece(magnitude, j) * power).sum() / total) if total else 0.0
        if share > TRUNCATION_REPORT_LEVEL:
            truncated.append(j)
    if truncated:
        logger.warning('paraproduct ladder cut by Nyquist %.4g at shells %s', grid.nyquist, truncated)
    return values, {'shells': list(ladder), 'truncated_shells': truncated, 'symbol_sup': sup}


def paradiff_apply(a, u):
    """T_a u for a constant, a coefficient array, a SeparableSymbol or an evaluator xi -> a(., xi)"""
    values, _ = _paradiff(a, u)
    return SampledField(u.grid, values, band=u.band)


def paradiff_bound(a, u):
    """Ladder report with the measured constant ||T_a u|| / (sup |a| ||u||)"""
    values, info = _paradiff(a, u)
    norm = SampledField(u.grid, values).norm()
    denominator = info['symbol_sup'] * u.norm()
    info['operator_ratio'] = norm / denominator if denominator > 0 else 0.0
    return info


# ---------------------------------------------------------------------------
# good unknown and the transport-dispersive generator
# ---------------------------------------------------------------------------

def good_unknown(surface, symbols=None):
    """u = T_p eta + i T_q (psi - T_B eta) with p reduced to its principal part"""
    symbols = symbols or build_symbols(surface)
    grid = surface.grid
    eta = SampledField(grid, surface.eta)
    psi = SampledField(grid, surface.psi)
    elevation = paradiff_apply(principal_p(symbols), eta)
    shifted = psi - paradiff_apply(surface.B, eta)
    potential = paradiff_apply(symbols.q, shifted)
    return SampledField(grid, elevation.values + 1j * potential.values)


def _derivative(u, axis):
    grid = u.grid
    return SampledField(grid, fft.ifftn(1j * grid.frequencies()[..., axis] * fft.fftn(u.values)))


def transport_term(surface, u):
    """T_V . grad u"""
    if u.grid != surface.grid:
        raise DomainError('field and surface live on different grids')
    values = sum(paradiff_apply(surface.V[k], _derivative(u, k)).values for k in range(u.grid.d))
    return SampledField(u.grid, values, band=u.band)


def dispersive_term(surface, u, symbols=None):
    """i T_gamma u"""
    if u.grid != surface.grid:
        raise DomainError('field and surface live on different grids')
    symbols = symbols or build_symbols(surface)
    return SampledField(u.grid, 1j * paradiff_apply(symbols.gamma, u).values, band=u.band)


def transport_dispersive_rhs(surface, u, symbols=None):
    """T_V . grad u + i T_gamma u"""
    transport = transport_term(surface, u)
    dispersive = dispersive_term(surface, u, symbols)
    return SampledField(u.grid, transport.values + dispersive.values, band=u.band)


# ---------------------------------------------------------------------------
# symbol-norm scans
# ---------------------------------------------------------------------------

def _shell_frequencies(d, band, count):
    magnitudes = np.linspace(band / 2, 2 * band, count)
    if d == 1:
        return magnitudes[:, None]
    angles = np.arange(8) * np.pi / 4
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    return (magnitudes[:, None, None] * directions[None]).reshape(-1, 2)


def _localized(surface, symbols, kind, band):
    """xi -> (a P_lambda)(., xi) for the dispersive or transport coefficient"""
    grid = surface.grid
    if kind == 'dispersive':
        def evaluate(xi):
            return symbols.gamma(xi) * lp_bump(np.linalg.norm(xi, axis=-1) / band)
        return evaluate

    cutoff = low_pass(grid.frequency_magnitude() / (band * 2.0 ** -Config.PARAPRODUCT_CUTOFF_LOG2))
    slow = [fft.ifftn(cutoff * fft.fftn(surface.V[k])).real for k in range(grid.d)]

    def evaluate(xi):
        bump = lp_bump(np.linalg.norm(xi, axis=-1) / band)
        extra = (1,) * (xi.ndim - 1)
        return sum(slow[k].reshape(grid.shape + extra) * xi[..., k] * bump for k in range(grid.d))
    return evaluate


def symbol_norm(surface, band, beta=0, r=2.5, kind='dispersive', xi_count=17, symbols=None):
    """sup over shell xi of the C^(r-1/2)_x seminorm of d_xi^beta (a P_lambda)"""
    grid = surface.grid
    symbols = symbols or build_symbols(surface)
    evaluate = _localized(surface, symbols, kind, band)
    xis = _shell_frequencies(grid.d, band, xi_count)
    order = (beta,) + (0,) * (grid.d - 1) if isinstance(beta, numbers.Integral) else tuple(beta)
    shifts, weights = difference_stencil((0,) * grid.d, order)
    step = 2 * 1e-16 ** (1.0 / (sum(order) + 2)) * band
    total = sum(weight * evaluate(xis + step * shift[grid.d:]) for shift, weight in zip(shifts, weights))
    total = total / step ** sum(order)
    trailing = np.moveaxis(total, list(range(grid.d)), list(range(-grid.d, 0)))
    return float(holder_seminorm(trailing, grid, r - 0.5).max())


def symbol_norm_scan(surface, bands, beta=0, r=2.5, kind='dispersive', tolerance=0.1, xi_count=17):
    """Fitted band exponent of symbol_norm against the target 3/2 - |beta|"""
    if kind not in ('dispersive', 'transport'):
        raise DomainError(f'unknown symbol-norm kind {kind!r}')
    bands = [float(band) for band in bands]
    if len(bands) < 2:
        raise DomainError('symbol-norm scans need at least two bands')
    symbols = build_symbols(surface)
    norms = [symbol_norm(surface, band, beta, r, kind, xi_count, symbols) for band in bands]
    fit = fit_exponent(bands, norms)
    order = beta if isinstance(beta, numbers.Integral) else sum(beta)
    scan = SymbolNormScan(
        kind=kind, beta=int(order), rho=r - 0.5, bands=bands, norms=norms, fit=fit,
        target=1.5 - order, tolerance=tolerance,
    )
    logger.info('symbol_norm_scan %s beta=%d: exponent %.4f (target %.2f)', kind, order, fit.exponent, scan.target)
    return scan
