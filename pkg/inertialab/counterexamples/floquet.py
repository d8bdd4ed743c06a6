"""
A 2T-periodic linear equation w' + Aw = Phi(x(t)) w whose period map is a
weighted shift, so it has no Floquet multipliers and every solution decays
like exp(-beta t^2).

On [0, T] (x >= 0) Phi rotates each pair (e_{2n-1}, e_{2n}) by a quarter turn,
on [T, 2T] (x <= 0) it rotates the pairs (e_{2n}, e_{2n+1}). The composition
sends e_{2n-1} -> e_{2n+1} and e_{2n} -> e_{2n-2}, and e_2 -> e_1.

The period map is kept as per-phase cells (mode pair, log scale, 2x2 matrix)
and applied in log form, so chains of multipliers far below exp(-700) stay
representable.
"""

__package__ = 'inertialab.counterexamples'

import math

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, NamedTuple, Sequence, Dict, Any

import numpy as np
from scipy.integrate import quad, solve_ivp

from ..spectral_core import Spectrum
from ..models.nonlinearity import smooth_step
from ..dynamics import DecayFit, log_decay_fit
from ..system import parallel_map
from ..reports.schema import CheckResult, ValidationError, NumericalError
from ..reports.csv import columns_to_csv
from .obstruction import minus_pairs, plus_pairs


QUAD_TOL = 1e-10
ODE_RTOL, ODE_ATOL = 1e-12, 1e-14
NORM_SAMPLES = 401
SPARSE_TOL = 1e-9       # cell entries below this share of the cell's largest entry are dropped before iterating


### The periodic operator

@dataclass(frozen=True, eq=False)
class PeriodicOperator:
    spectrum: Spectrum
    T: float
    amplitude: float
    eps: float
    first_gain: float
    L: float
    T0: float
    rotation_integrals: Tuple[float, float]
    norm_sup: float
    growth_bounds: Tuple[float, float]
    checks: List[CheckResult] = field(default_factory=list)
    schema: str = 'PeriodicOperator'

    @property
    def M(self) -> int:
        return self.spectrum.M

    @property
    def period(self) -> float:
        return 2 * self.T

    def profile(self, t):
        """x(t) = N sin(pi t / T): odd, x(T - t) = x(t), maximum N at T/2"""
        return self.amplitude * np.sin(np.pi * np.asarray(t, dtype=float) / self.T)

    def theta1(self, x):
        """0 for x <= N/4, 1 on [N/2, N]"""
        return smooth_step(np.asarray(x, dtype=float) / (self.amplitude / 4) - 1.0)

    def theta2(self, x):
        """0 for x <= 0, 1 for x >= N/4"""
        return smooth_step(np.asarray(x, dtype=float) / (self.amplitude / 4))

    def operator_at(self, x) -> np.ndarray:
        """Phi(x) as an (..., M, M) matrix"""
        return _assemble(self.spectrum, self.eps, self.first_gain, self.theta1, self.theta2, x)

    def at_time(self, t) -> np.ndarray:
        return self.operator_at(self.profile(t))

    def _asdict(self):
        return {
            'schema': self.schema,
            'M': self.M,
            'source': self.spectrum.source,
            'T': self.T,
            'amplitude': self.amplitude,
            'eps': self.eps,
            'first_gain': self.first_gain,
            'L': self.L,
            'T0': self.T0,
            'rotation_integrals': list(self.rotation_integrals),
            'norm_sup': self.norm_sup,
            'growth_bounds': list(self.growth_bounds),
        }


def _assemble(spectrum: Spectrum, eps: float, gain: float, theta1, theta2, x) -> np.ndarray:
    lam = spectrum.values
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape + (spectrum.M, spectrum.M))
    for sign, pairs in ((1.0, minus_pairs(spectrum.M)), (-1.0, plus_pairs(spectrum.M))):
        th1, th2 = theta1(sign * x), theta2(sign * x)
        for a, b in pairs:
            d = 0.5 * (lam[a] - lam[b])
            out[..., a, a] += d * th2
            out[..., b, b] -= d * th2
            out[..., a, b] += eps * th1
            out[..., b, a] -= eps * th1
    out[..., 0, 0] += 0.5 * lam[0] * gain * theta2(-x)
    return out


def _quad(func, a: float, b: float, what: str) -> float:
    result = quad(func, a, b, epsabs=1e-13, epsrel=1e-13, limit=200, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3 or not math.isfinite(value) or abserr > QUAD_TOL:
        raise NumericalError(
            f'Quadrature for {what} did not converge (estimate {value:g}, error {abserr:g})',
            hints=(result[3],) if len(result) > 3 else None,
        )
    return float(value)


def build_periodic_operator(spectrum: Spectrum, T: float=1.0, amplitude: float=1.0,
                            L: Optional[float]=None, samples: int=NORM_SAMPLES) -> PeriodicOperator:
    """
    Assemble Phi with the rotation amplitude fixed by quadrature so that every
    half period turns its pairs by exactly pi/2. The lone mode e_1 of the second
    half gets the gain that makes its half-period factor exp(-T lambda_1 / 2).

    With L=None the realized sup of |Phi(x)| becomes the reported L.
    """
    if T <= 0 or amplitude <= 0:
        raise ValidationError(f'Need T > 0 and amplitude > 0, got T={T}, amplitude={amplitude}')
    if spectrum.M < 3:
        raise ValidationError(f'Need at least 3 modes for the shift structure, got {spectrum.M}')

    lam = spectrum.values
    k = np.arange(1, spectrum.M + 1)
    growth = (float(np.min(lam / k)), float(np.max(lam / k)))
    L0 = float(np.max(np.diff(lam)))

    shell = PeriodicOperator(spectrum=spectrum, T=T, amplitude=amplitude, eps=0.0, first_gain=1.0, L=0.0,
                             T0=0.0, rotation_integrals=(0.0, 0.0), norm_sup=0.0, growth_bounds=growth)
    x = shell.profile
    T0 = T * math.asin(0.25) / math.pi
    I_plus = _quad(lambda t: float(shell.theta1(x(t))), T0, T - T0, 'the first rotation')
    I_minus = _quad(lambda t: float(shell.theta1(-x(t))), T + T0, 2 * T - T0, 'the second rotation')
    J = _quad(lambda t: float(shell.theta2(-x(t))), T, 2 * T, 'the e_1 gain')
    eps = math.pi / (2 * I_plus)
    gain = T / J

    xs = np.linspace(-amplitude, amplitude, samples)
    norms = np.linalg.norm(_assemble(spectrum, eps, gain, shell.theta1, shell.theta2, xs), ord=2, axis=(-2, -1))
    norm_sup = float(np.max(norms))

    if L is None:
        L = norm_sup
    elif L <= L0 / 2:
        raise ValidationError(f'Need L > L0/2 = {L0 / 2:g}, got L={L:g}')
    elif norm_sup > L * (1 + 1e-12):
        raise ValidationError(
            f'|Phi(x)| reaches {norm_sup:g} > L={L:g} at T={T:g}',
            hints=('The rotation amplitude shrinks like 1/T, increase T.',),
        )

    block_bound = max(
        max((0.5 * (lam[b] - lam[a]) + eps for a, b in minus_pairs(spectrum.M) + plus_pairs(spectrum.M)), default=0.0),
        0.5 * lam[0] * gain,
    )
    t_check = np.linspace(0, 2 * T, 9)
    drift = float(np.max(np.abs(
        _assemble(spectrum, eps, gain, shell.theta1, shell.theta2, x(t_check))
        - _assemble(spectrum, eps, gain, shell.theta1, shell.theta2, x(t_check + 2 * T))
    )))
    checks = [
        CheckResult.compare('rotation_symmetry', abs(I_plus - I_minus), '<=', 1e-10),
        CheckResult.compare('quarter_turn', abs(eps * I_minus - math.pi / 2), '<=', 1e-10),
        CheckResult.compare('eps_bound', eps, '<=', math.pi / T),
        CheckResult.compare('block_norm_bound', norm_sup, '<=', block_bound * (1 + 1e-12)),
        CheckResult.compare('norm_bound', norm_sup, '<=', L * (1 + 1e-12)),
        CheckResult.compare('periodicity', drift, '<=', 1e-12),
    ]
    return PeriodicOperator(
        spectrum=spectrum, T=float(T), amplitude=float(amplitude), eps=eps, first_gain=gain, L=float(L),
        T0=T0, rotation_integrals=(I_plus, I_minus), norm_sup=norm_sup, growth_bounds=growth, checks=checks,
    )


### The period map

class MapCell(NamedTuple):
    modes: Tuple[int, ...]      # 0-based
    log_scale: float
    matrix: np.ndarray


def _cell_specs(op: PeriodicOperator, phase: int) -> List[Tuple[Tuple[int, ...], float, Tuple]]:
    """(modes, log scale, integration key) for every cell of one half period"""
    lam, T, M = op.spectrum.values, op.T, op.M
    specs = []
    if phase == 0:
        pairs = minus_pairs(M)
        lone = [M - 1] if M % 2 else []
    else:
        specs.append(((0,), -T * lam[0] / 2, ('gain', 1)))
        pairs = plus_pairs(M)
        lone = [] if M % 2 else [M - 1]
    for a, b in pairs:
        specs.append(((a, b), -T * (lam[a] + lam[b]) / 2, ('pair', phase, round(0.5 * (lam[b] - lam[a]), 12))))
    for m in lone:
        specs.append(((m,), -T * lam[m], ('still',)))
    return specs


def _integrate_cell(op: PeriodicOperator, key: Tuple, dt: float) -> np.ndarray:
    """fundamental matrix of the rescaled cell equation over its half period"""
    if key[0] == 'still':
        return np.eye(1)

    T, x = op.T, op.profile
    if key[0] == 'gain':
        half_lam = 0.5 * op.spectrum.values[0]
        t0, size = T, 1

        def rhs(t, y):
            return half_lam * (op.first_gain * op.theta2(-x(t)) - 1.0) * y
    else:
        _, phase, delta = key
        sign = 1.0 if phase == 0 else -1.0
        t0, size = phase * T, 2

        def rhs(t, y):
            xt = sign * x(t)
            d, r = delta * (1.0 - op.theta2(xt)), op.eps * op.theta1(xt)
            Y = y.reshape(2, 2)
            return (np.array([[d, r], [-r, -d]]) @ Y).ravel()

    sol = solve_ivp(rhs, (t0, t0 + T), np.eye(size).ravel(), method='DOP853',
                    rtol=ODE_RTOL, atol=ODE_ATOL, max_step=dt)
    if not sol.success or not np.all(np.isfinite(sol.y[:, -1])):
        raise NumericalError(f'Half-period integration failed for cell {key}: {sol.message}')
    return sol.y[:, -1].reshape(size, size)


def _sparsified(cell: MapCell) -> MapCell:
    matrix = np.where(np.abs(cell.matrix) < SPARSE_TOL * np.abs(cell.matrix).max(), 0.0, cell.matrix)
    return cell._replace(matrix=matrix)


def apply_phase(cells: Sequence[MapCell], log_norm: float, v: np.ndarray) -> Tuple[float, np.ndarray]:
    """one half-period map on a vector stored as exp(log_norm) * v with |v| = 1"""
    out = np.zeros_like(v)
    parts, logs = [], []
    for cell in cells:
        idx = list(cell.modes)
        y = cell.matrix @ v[idx]
        ny = float(np.linalg.norm(y))
        if ny > 0:
            parts.append((idx, y / ny))
            logs.append(cell.log_scale + math.log(ny))
    if not logs:
        raise NumericalError('Period map annihilated the vector')
    top = max(logs)
    for (idx, y), lg in zip(parts, logs):
        out[idx] = y * math.exp(lg - top)
    n = float(np.linalg.norm(out))
    return log_norm + top + math.log(n), out / n


def target_mode(j: int) -> int:
    """1-based image index of e_j under the weighted shift"""
    if j % 2:
        return j + 2
    return 1 if j == 2 else j - 2


def log_multiplier(lam: np.ndarray, T: float, j: int) -> float:
    """log of the coefficient of P e_j on e_{target_mode(j)} (1-based j)"""
    l = lambda n: float(lam[n - 1])
    if j == 2:
        return -T * (2 * l(1) + l(2)) / 2
    if j % 2:
        return -T * (l(j) + 2 * l(j + 1) + l(j + 2)) / 2
    return -T * (l(j - 2) + 2 * l(j - 1) + l(j)) / 2


def predicted_multipliers(spectrum: Spectrum, T: float) -> Dict[int, float]:
    """mu_0 and mu_n for every n the truncation supports, keyed by the mu index"""
    lam, M = spectrum.values, spectrum.M
    out = {0: math.exp(log_multiplier(lam, T, 2))}
    for n in range(1, M - 1):
        out[n] = math.exp(-T * (lam[n - 1] + 2 * lam[n] + lam[n + 1]) / 2)
    return out


def chain_log_norm(log_mu, start: int, N: int) -> float:
    """log |P^N e_start| as a sum of log multipliers along the shift chain"""
    total, j = 0.0, start
    for _ in range(N):
        total += log_mu(j)
        j = target_mode(j)
    return total


@dataclass(frozen=True, eq=False)
class PoincareReport:
    T: float
    M: int
    eps: float
    dt: float
    sources: np.ndarray
    targets: np.ndarray
    log_measured: np.ndarray
    log_predicted: np.ndarray
    rel_errors: np.ndarray
    residuals: np.ndarray
    minus_cells: List[MapCell]
    plus_cells: List[MapCell]
    checks: List[CheckResult] = field(default_factory=list)
    schema: str = 'PoincareReport'

    def apply(self, log_norm: float, v: np.ndarray) -> Tuple[float, np.ndarray]:
        log_norm, v = apply_phase(self.minus_cells, log_norm, v)
        return apply_phase(self.plus_cells, log_norm, v)

    def iterate_log(self, start: int, N: int) -> np.ndarray:
        """log |P^k e_start| for k = 1..N by repeated application"""
        v = np.zeros(self.M)
        v[start - 1] = 1.0
        log_norm, out = 0.0, []
        for _ in range(N):
            log_norm, v = self.apply(log_norm, v)
            out.append(log_norm)
        return np.array(out)

    def measured_log_mu(self, j: int) -> float:
        hits = np.flatnonzero(self.sources == j)
        if not hits.size:
            raise ValidationError(f'Column e_{j} is outside the verified part of the map (M={self.M})')
        return float(self.log_measured[hits[0]])

    def _asdict(self):
        cells = lambda cs: [{'modes': [m + 1 for m in c.modes], 'log_scale': c.log_scale, 'matrix': c.matrix}
                            for c in cs]
        return {
            'schema': self.schema,
            'T': self.T,
            'M': self.M,
            'eps': self.eps,
            'dt': self.dt,
            'sources': self.sources,
            'targets': self.targets,
            'log_measured': self.log_measured,
            'log_predicted': self.log_predicted,
            'rel_errors': self.rel_errors,
            'residuals': self.residuals,
            'minus_cells': cells(self.minus_cells),
            'plus_cells': cells(self.plus_cells),
        }

    def to_csv(self) -> str:
        return columns_to_csv({
            'source': self.sources,
            'target': self.targets,
            'log_measured': self.log_measured,
            'log_predicted': self.log_predicted,
            'rel_error': self.rel_errors,
            'residual': self.residuals,
        })


def poincare_map(op: PeriodicOperator, dt: Optional[float]=None, workers: Optional[int]=None) -> PoincareReport:
    """
    Integrate both half periods cell by cell and read off P e_j for every column
    whose image stays inside the truncation. Cells with the same half gap share
    one integration.
    """
    dt = op.T / 2000 if dt is None else dt
    if not 0 < dt <= op.T / 1000:
        raise ValidationError(f'dt must resolve the profile (0 < dt <= T/1000 = {op.T / 1000:g}), got {dt:g}')

    specs = [_cell_specs(op, 0), _cell_specs(op, 1)]
    keys = sorted({key for phase in specs for _, _, key in phase}, key=repr)
    matrices = dict(zip(keys, parallel_map(lambda key: _integrate_cell(op, key, dt), keys, workers=workers)))
    minus_cells, plus_cells = (
        [MapCell(modes, scale, matrices[key]) for modes, scale, key in phase]
        for phase in specs
    )

    lam, M = op.spectrum.values, op.M
    sources = [j for j in range(1, M + 1) if target_mode(j) <= M]
    targets, measured, residuals = [], [], []
    for j in sources:
        v = np.zeros(M)
        v[j - 1] = 1.0
        log_norm, v = apply_phase(plus_cells, *apply_phase(minus_cells, 0.0, v))
        t = target_mode(j)
        coeff = v[t - 1]
        off = np.delete(v, t - 1)
        if coeff <= 0:
            raise NumericalError(
                f'P e_{j} has coefficient {coeff:g} on e_{t}, expected a positive multiplier',
                hints=('Refine dt or check the rotation amplitude.',),
            )
        targets.append(t)
        measured.append(log_norm + math.log(coeff))
        residuals.append(float(np.linalg.norm(off)) / coeff)

    sources_arr = np.array(sources)
    log_measured = np.array(measured)
    log_predicted = np.array([log_multiplier(lam, op.T, j) for j in sources])
    rel_errors = np.abs(np.expm1(log_measured - log_predicted))
    residuals_arr = np.array(residuals)
    checks = [
        CheckResult.compare('multiplier_rel_error', rel_errors.max(), '<=', 1e-6),
        CheckResult.compare('off_target_residual', residuals_arr.max(), '<=', 1e-10),
    ]
    # residuals above come from the raw cells; iterating keeps only the shift entries,
    # leftover off-target mass would otherwise ride a slower-decaying chain
    return PoincareReport(
        T=op.T, M=M, eps=op.eps, dt=float(dt),
        sources=sources_arr, targets=np.array(targets),
        log_measured=log_measured, log_predicted=log_predicted,
        rel_errors=rel_errors, residuals=residuals_arr,
        minus_cells=[_sparsified(c) for c in minus_cells],
        plus_cells=[_sparsified(c) for c in plus_cells],
        checks=checks,
    )


### Super-exponential decay of P^N e_2

@dataclass(frozen=True, eq=False)
class DecayTable:
    N: np.ndarray
    log_iterated: np.ndarray
    log_product: np.ndarray
    fit: DecayFit
    bracket: Tuple[float, float]
    checks: List[CheckResult] = field(default_factory=list)
    schema: str = 'DecayTable'

    def _asdict(self):
        return {
            'schema': self.schema,
            'N': self.N,
            'log_iterated': self.log_iterated,
            'log_product': self.log_product,
            'fit': self.fit._asdict(),
            'bracket': list(self.bracket),
        }

    def to_csv(self) -> str:
        return columns_to_csv({
            'N': self.N,
            'log_iterated': self.log_iterated,
            'log_product': self.log_product,
            'norm': np.exp(self.log_product),
        })


def superexp_decay(op: PeriodicOperator, report: PoincareReport, N_iter: int=12) -> DecayTable:
    """|P^N e_2| by iterating the measured map and by the exact multiplier product, with a quadratic fit in N"""
    max_iter = (op.M + 1) // 2
    if not 3 <= N_iter <= max_iter:
        raise ValidationError(
            f'N_iter must lie in [3, {max_iter}] for M={op.M}, got {N_iter}',
            hints=(f'P^N e_2 lands on e_(2N-1), use at least {2 * N_iter - 1} modes.',),
        )
    lam = op.spectrum.values
    N = np.arange(1, N_iter + 1)
    log_iterated = report.iterate_log(2, N_iter)
    log_product = np.array([chain_log_norm(lambda j: log_multiplier(lam, op.T, j), 2, n) for n in N])
    fit = log_decay_fit(N.astype(float), log_product)

    c2, c1 = op.growth_bounds
    C1, C2 = 2 * c2, 2 * c1
    bracket = (-C2 * op.T * (1 + 1e-9), -C1 * op.T / 2)
    agreement = float(np.max(np.abs(np.expm1(log_iterated - log_product))))
    steps = np.diff(log_product)
    checks = [
        CheckResult.compare('first_step_is_mu0', abs(log_product[0] - log_multiplier(lam, op.T, 2)), '<=', 1e-12),
        CheckResult.compare('iterated_vs_product', agreement, '<=', 1e-6),
        CheckResult.compare('quad_coeff_negative', fit.quad_coeff, '<', 0.0),
        CheckResult.compare('fit_r2', fit.r2, '>', 0.99),
        CheckResult.compare('quad_coeff_lower', fit.quad_coeff, '>=', bracket[0]),
        CheckResult.compare('quad_coeff_upper', fit.quad_coeff, '<=', bracket[1]),
        # no fixed rate e^{-cN} bounds the decay from below
        CheckResult.flag('steps_unbounded', bool(np.all(np.diff(steps) < 0)), measured=float(steps[-1])),
    ]
    return DecayTable(N=N, log_iterated=log_iterated, log_product=log_product, fit=fit,
                      bracket=bracket, checks=checks)


### Non-uniform decay across the shift chain

@dataclass(frozen=True)
class NonuniformTable:
    rows: List[Dict[str, Any]]
    beta: float
    gamma: float
    gamma_spread: float
    checks: List[CheckResult] = field(default_factory=list)
    schema: str = 'NonuniformTable'

    COLUMNS = ('n', 'k', 'N', 'log_first_max', 'beta_n', 'log_middle_max', 'gamma_n', 'map_gap')

    def _asdict(self):
        return {
            'schema': self.schema,
            'rows': self.rows,
            'beta': self.beta,
            'gamma': self.gamma,
            'gamma_spread': self.gamma_spread,
        }

    def to_csv(self) -> str:
        return columns_to_csv({col: [row[col] for row in self.rows] for col in self.COLUMNS})


def nonuniform_ratios(op: PeriodicOperator, n_values: Sequence[int]=(4, 9, 16),
                      report: Optional[PoincareReport]=None) -> NonuniformTable:
    """
    For N = 2n + k, k = isqrt(n), compare |P^N e_1| with |P^N e_2s| and the
    e_2s among themselves for n <= s <= n + k, all in log form.

    beta is the smallest beta_n = -log(first ratio)/n^2 and gamma the largest
    gamma_n = max|log(middle ratio)|/n^{3/2}. With a report the same ratios are
    also taken from the iterated measured map (map_gap column).
    """
    n_values = sorted(int(n) for n in n_values)
    if not n_values or n_values[0] < 1:
        raise ValidationError(f'Need n >= 1, got {n_values}')
    need = 2 * (2 * n_values[-1] + math.isqrt(n_values[-1])) + 1
    if op.M < need:
        raise ValidationError(f'n={n_values[-1]} needs at least {need} modes, got {op.M}')
    if report is not None and report.M < need:
        raise ValidationError(f'Poincare report has {report.M} modes, n={n_values[-1]} needs {need}')

    lam = op.spectrum.values
    log_mu = lambda j: log_multiplier(lam, op.T, j)
    rows = []
    for n in n_values:
        k = math.isqrt(n)
        N = 2 * n + k
        s_range = list(range(n, n + k + 1))
        first = chain_log_norm(log_mu, 1, N)
        evens = np.array([chain_log_norm(log_mu, 2 * s, N) for s in s_range])
        log_first = first - evens
        log_middle = evens[:, None] - evens[None, :]
        map_gap = 0.0
        if report is not None:
            first_m = report.iterate_log(1, N)[-1]
            evens_m = np.array([report.iterate_log(2 * s, N)[-1] for s in s_range])
            map_gap = float(max(
                np.max(np.abs(np.expm1((first_m - evens_m) - log_first))),
                np.max(np.abs(np.expm1((evens_m[:, None] - evens_m[None, :]) - log_middle))),
            ))
        rows.append({
            'n': n,
            'k': k,
            'N': N,
            'log_first_max': float(log_first.max()),
            'beta_n': float(-log_first.max() / n ** 2),
            'log_middle_max': float(np.abs(log_middle).max()),
            'gamma_n': float(np.abs(log_middle).max() / n ** 1.5),
            'map_gap': map_gap,
            'middle_diagonal': float(np.abs(np.diag(log_middle)).max()),
        })

    beta = min(row['beta_n'] for row in rows)
    gamma = max(row['gamma_n'] for row in rows)
    gammas = [row['gamma_n'] for row in rows if row['gamma_n'] > 0]
    gamma_spread = max(gammas) / min(gammas) if gammas else 1.0
    firsts = [row['log_first_max'] for row in rows]
    checks = [
        CheckResult.compare('beta_positive', beta, '>', 0.0),
        CheckResult.compare('first_ratio_bound', max(row['log_first_max'] + beta * row['n'] ** 2 for row in rows), '<=', 1e-9),
        CheckResult.compare('middle_ratio_bound', max(row['log_middle_max'] - gamma * row['n'] ** 1.5 for row in rows), '<=', 1e-9),
        CheckResult.compare('middle_diagonal', max(row['middle_diagonal'] for row in rows), '<=', 0.0),
        CheckResult.flag('first_ratio_decreasing', bool(np.all(np.diff(firsts) < 0)) if len(firsts) > 1 else True),
    ]
    if report is not None:
        checks.append(CheckResult.compare('map_vs_product', max(row['map_gap'] for row in rows), '<=', 1e-6))
    return NonuniformTable(rows=rows, beta=beta, gamma=gamma, gamma_spread=gamma_spread, checks=checks)


def floquet_orbit_cloud(report: PoincareReport, start: int=2, N_iter: Optional[int]=None) -> np.ndarray:
    """
    Normalized iterates P^k e_start plus the origin: differences of two solutions
    of the linear equation, as input for romanov_check
    """
    N_iter = (report.M + 1) // 2 if N_iter is None else N_iter
    v = np.zeros(report.M)
    v[start - 1] = 1.0
    points, log_norm = [np.zeros(report.M), v.copy()], 0.0
    for _ in range(N_iter):
        log_norm, v = report.apply(log_norm, v)
        points.append(v.copy())
    return np.array(points)
