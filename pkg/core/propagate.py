"""
Weyl quantization on the torus and the reference solver for (i d_t + a^w) u = f

u(t) = e^{i t a^w} u_0 - i int_0^t e^{i (t - s) a^w} f(s) ds; wave packets follow
the Hamilton flow of -a under this sign.
"""

import logging
import math

import numpy as np
from scipy import fft, linalg

from config import Config
from core.errors import DomainError
from core.fbi import fbi_forward, mass_fraction
from core.fields import check_band, coherent_state
from core.hamflow import flow_integrate
from core.symbols import rescale, verify_class
from models.evolution import CoherentTrack, EvolutionResult, WeylOperator
from models.grid import SampledField
from models.symbol import ClassTag

logger = logging.getLogger(__name__)


def _dense_cost(n):
    entries = n * n
    return f'{(2 * n - 1) * n:,} symbol evaluations, {entries:,} entries ({16 * entries / 2 ** 20:.1f} MiB)'


def weyl_quantize(a, grid, t=0.0):
    """Midpoint quantization of a at time t

    x-independent symbols become exact Fourier multipliers in any d. General
    symbols need d = 1 and N <= MAX_DENSE_POINTS: A_jl = (1/N) sum_k
    a((x_j + x_l)/2, xi_k) e^{i xi_k (x_j - x_l)}, one inverse FFT per midpoint.
    """
    if a.d != grid.d:
        raise DomainError(f'symbol dimension {a.d} does not match grid dimension {grid.d}')
    if a.x_independent:
        multiplier = a(t, np.zeros(grid.d), grid.frequencies())
        return WeylOperator(grid, multiplier=np.asarray(multiplier, dtype=float), symbol=a.name, t=t)
    if grid.d != 1:
        raise DomainError('dense Weyl quantization of x-dependent symbols requires d = 1')
    n = grid.N
    if n > Config.MAX_DENSE_POINTS:
        raise DomainError(
            f'dense operator with N = {n} exceeds MAX_DENSE_POINTS = {Config.MAX_DENSE_POINTS}: '
            f'{_dense_cost(n)}, O(N^3) per diagonalization'
        )
    midpoints = -grid.L / 2 + 0.5 * grid.dx * np.arange(2 * n - 1)
    frequencies = grid.frequency_axis()
    samples = a(t, midpoints[:, None, None], frequencies[None, :, None])
    table = fft.ifft(samples, axis=1)
    j, l = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    matrix = table[j + l, (j - l) % n]
    skew = 0.5 * (matrix - matrix.conj().T)
    correction = float(np.linalg.norm(skew, 2))
    if correction > Config.HERMITIAN_TOLERANCE:
        logger.warning('weyl_quantize %s: anti-hermitian part %.3g removed', a.name, correction)
    hermitian = 0.5 * (matrix + matrix.conj().T)
    logger.debug('weyl_quantize %s on %r: %s', a.name, grid, _dense_cost(n))
    return WeylOperator(grid, matrix=hermitian, correction=correction, symbol=a.name, t=t)


class _Propagator:
    """e^{i dt A} for one frozen operator, in its eigenbasis or in Fourier space"""

    def __init__(self, operator, dt):
        self.operator = operator
        self.grid = operator.grid
        if operator.multiplier is not None:
            self.phase = np.exp(1j * dt * operator.multiplier)
            self.basis = None
        else:
            values, self.basis = linalg.eigh(operator.matrix)
            self.phase = np.exp(1j * dt * values)

    def __call__(self, values):
        if self.basis is None:
            return fft.ifftn(self.phase * fft.fftn(values))
        flat = self.basis @ (self.phase * (self.basis.conj().T @ values.reshape(-1)))
        return flat.reshape(self.grid.shape)


def _forcing_values(forcing, t, grid):
    if forcing is None:
        return None
    value = forcing(t)
    if value.grid != grid:
        raise DomainError('forcing lives on a different grid than the data')
    return value.values


def _check_data(a, u0):
    grid = u0.grid
    if u0.band is None:
        return
    if 4 * u0.band > grid.nyquist:
        raise DomainError(f'grid Nyquist {grid.nyquist:g} does not resolve 4 lambda = {4 * u0.band:g}')
    banded, fraction = check_band(u0)
    if not banded:
        raise DomainError(f'u0 carries band {u0.band:g} but only {fraction:.6f} of its mass lies in the band')


def default_step(a, T):
    """Largest uniform step <= 1/(10 lambda^m) dividing T"""
    steps = max(1, math.ceil(round(10 * a.band ** a.order * T, 9)))
    return T / steps


def evolve(a, u0, forcing=None, T=1.0, dt=None, record_every=1, record_times=None):
    """Solve (i d_t + a^w) u = f, u(0) = u0, on [0, T]

    forcing is None or a callable t -> SampledField. Each step applies the
    exponential of the operator frozen at the step midpoint (once for
    time-independent symbols); forcing enters by the trapezoid rule
    u_{n+1} = U u_n - i dt/2 (U f_n + f_{n+1}). Snapshots are kept every
    record_every steps, or at the steps nearest to record_times. Unforced runs
    whose norm drifts by more than NORM_DRIFT_LIMIT are flagged.
    """
    grid = u0.grid
    _check_data(a, u0)
    dt = dt or default_step(a, T)
    if dt > 1.0 / (10 * a.band ** a.order) * (1 + 1e-12):
        raise DomainError(f'step {dt:g} exceeds 1/(10 lambda^m) = {1.0 / (10 * a.band ** a.order):g}')
    steps = max(1, int(round(T / dt)))
    dt = T / steps
    if record_times is not None:
        recorded = {min(steps, int(round(t / dt))) for t in record_times} | {0, steps}
    else:
        recorded = set(range(0, steps + 1, record_every)) | {steps}

    frozen = _Propagator(weyl_quantize(a, grid, 0.0), dt) if a.time_independent else None
    corrections = [frozen.operator.correction] if frozen else []
    u = np.array(u0.values)
    f_now = _forcing_values(forcing, 0.0, grid)
    times, snapshots, norms = [0.0], [u0], [u0.norm()]
    for n in range(steps):
        t = n * dt
        propagator = frozen
        if propagator is None:
            propagator = _Propagator(weyl_quantize(a, grid, t + dt / 2), dt)
            corrections.append(propagator.operator.correction)
        u_next = propagator(u)
        if forcing is not None:
            f_next = _forcing_values(forcing, t + dt, grid)
            u_next = u_next - 0.5j * dt * (propagator(f_now) + f_next)
            f_now = f_next
        u = u_next
        norms.append(math.sqrt(grid.cell_volume * np.sum(np.abs(u) ** 2)))
        if n + 1 in recorded:
            times.append((n + 1) * dt)
            snapshots.append(SampledField(grid, u, band=u0.band))

    result = EvolutionResult(
        times, snapshots, dt, step_norms=norms, symbol=a.name, band=u0.band,
        metadata={
            'operator': 'multiplier' if a.x_independent else 'dense',
            'hermitian_correction': max(corrections) if corrections else 0.0,
            'forced': forcing is not None,
        },
    )
    if forcing is None and result.norm_drift > Config.NORM_DRIFT_LIMIT:
        result.flagged = True
        logger.warning('evolve %s: norm drift %.3g exceeds %g', a.name, result.norm_drift, Config.NORM_DRIFT_LIMIT)
    logger.debug('evolve %s: %d steps of %g, drift %.3g', a.name, steps, dt, result.norm_drift)
    return result


def exact_multiplier_state(a, u0, t, forcing=None):
    """Closed-form state for x- and t-independent symbols and time-constant forcing

    u^(t) = e^{i t a} u0^ - (e^{i t a} - 1) / a f^, with the limit -i t f^ where a = 0.
    """
    if not (a.x_independent and a.time_independent):
        raise DomainError(f'{a.name} is not a constant-coefficient time-independent symbol')
    grid = u0.grid
    symbol = np.asarray(a(0.0, np.zeros(grid.d), grid.frequencies()), dtype=float)
    phase = np.exp(1j * t * symbol)
    spectrum = phase * fft.fftn(u0.values)
    if forcing is not None:
        safe = np.where(symbol == 0, 1.0, symbol)
        weight = np.where(symbol == 0, 1j * t, (phase - 1.0) / safe)
        spectrum = spectrum - weight * fft.fftn(forcing.values)
    return SampledField(grid, fft.ifftn(spectrum), band=u0.band)


def duhamel_sum(a, series, dt):
    """-i dt sum_n w_n e^{i (t_N - t_n) a^w} f_n with trapezoid weights, for time-independent a

    series holds f at t_0, ..., t_N; the propagators are applied in the
    operator's eigenbasis (or Fourier space) independently of evolve's recursion.
    """
    if not a.time_independent:
        raise DomainError('duhamel_sum needs a time-independent symbol')
    series = list(series)
    if not series:
        raise DomainError('empty forcing series')
    grid = series[0].grid
    operator = weyl_quantize(a, grid)
    count = len(series) - 1
    weights = np.ones(count + 1)
    weights[0] = weights[-1] = 0.5
    if count == 0:
        weights[:] = 0.0
    lags = dt * (count - np.arange(count + 1))
    if operator.multiplier is not None:
        spectra = np.array([fft.fftn(item.values) for item in series])
        phases = np.exp(1j * lags.reshape((-1,) + (1,) * grid.d) * operator.multiplier[None])
        total = fft.ifftn(np.tensordot(weights, phases * spectra, axes=1))
    else:
        values, basis = linalg.eigh(operator.matrix)
        coefficients = np.array([basis.conj().T @ item.values.reshape(-1) for item in series])
        phases = np.exp(1j * np.outer(lags, values))
        total = (basis @ np.tensordot(weights, phases * coefficients, axes=1)).reshape(grid.shape)
    return SampledField(grid, -1j * dt * total)


def rescaled_class_check(a, T):
    """S_00 report of the symbol rescaled at tau = min(1, T); None in the Sobolev regime"""
    tau = min(1.0, float(T))
    if tau * a.band ** a.order < 1:
        logger.debug('%s: tau lambda^m < 1 at tau = %g, no rescaled class check', a.name, tau)
        return None
    report = verify_class(rescale(a, tau), ClassTag.S00)
    if not report.passed:
        failing = [(entry.alpha, entry.beta) for entry in report.entries if not entry.passed]
        logger.warning('%s rescaled at tau = %g fails S00 at (alpha, beta) %s; packet localization '
                       'is not guaranteed', a.name, tau, failing)
    return report


def coherent_track(a, center, T, grid, radii=(5.0, 10.0, 20.0, 40.0), times=None, margin=2.0):
    """Mass fractions of the evolved coherent state within balls around the flow image

    The state starts as the FBI window modulated to (x0, xi0). Balls are centred
    on the flow of -a from (x0, xi0); the FBI is evaluated on the block of
    the lattice the largest ball can reach.
    """
    report = rescaled_class_check(a, T)
    x0, xi0 = (np.broadcast_to(np.asarray(part, dtype=float), (grid.d,)) for part in center)
    u0 = coherent_state(grid, x0, xi0)
    times = np.asarray([0.0, T] if times is None else times, dtype=float)
    radii = [float(radius) for radius in radii]
    reach = max(radii) + margin

    exact = a.x_independent and a.time_independent
    if exact:
        states = [exact_multiplier_state(a, u0, t) for t in times]
        flagged = False
    else:
        result = evolve(a, u0, T=float(times.max()), record_times=times)
        lookup = {round(t, 9): snapshot for t, snapshot in zip(result.times, result.snapshots)}
        states = [lookup[round(result.dt * round(t / result.dt), 9)] for t in times]
        flagged = result.flagged

    flow = flow_integrate(a.negated(), (x0, xi0), float(times.max()))
    flagged = flagged or flow.flagged
    centers, fractions = [], []
    for t, state in zip(times, states):
        index = int(np.argmin(np.abs(flow.times - t)))
        x_t, xi_t = flow.states[index].x, flow.states[index].xi
        block = fbi_forward(
            state,
            x_range=(x_t, min(reach, grid.L / 2)),
            xi_range=(xi_t, reach),
        )
        centers.append(np.concatenate([x_t, xi_t]))
        fractions.append([mass_fraction(block, (x_t, xi_t), radius) for radius in radii])
        logger.debug('coherent_track %s t=%g centre=(%s, %s) fractions=%s', a.name, t, x_t, xi_t, fractions[-1])
    return CoherentTrack(times, np.array(centers), radii, np.array(fractions), symbol=a.name, flagged=flagged,
                         rescaled_class=None if report is None else report.passed)
