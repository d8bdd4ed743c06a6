"""
Time integration of u' + Au = F(u) and the probes built on top of it.

The linear part is always integrated exactly in the eigenbasis. The nonlinear part
goes through an exponential midpoint step:

    u_mid  = e^{-A dt/2} u + phi(dt/2) F(u)
    u_next = e^{-A dt} u   + phi(dt)   F(u_mid),      phi(h) = (1 - e^{-A h}) / A

The saddle solver handles the linear shifted problem u' + (A - alpha) u = h(t) on a
finite window, with the low modes solved backward from the right end and the high
modes forward from the left end, both by exact integration of the exponential kernel
against piecewise-linear forcing.
"""

__package__ = 'inertialab'

import math

from dataclasses import dataclass, fields
from typing import List, Optional, Tuple, Callable, Dict

import numpy as np
from scipy import signal, stats
from scipy.integrate import trapezoid

from .spectral_core import Spectrum, State, sobolev_norms, check_cut, split_constants
from .models.nonlinearity import NonlinearityModel
from .reports.schema import ValidationError, NumericalError, CheckResult, typechecked
from .reports.csv import rows_to_csv
from .util import default_rng
from .config import TIME_STEP, FIT_FLOOR, AVERAGING_KAPPA


STABILITY_BUDGET = 0.5      # dt * L


@dataclass(frozen=True, eq=False)
class TrajectorySegment:
    times: np.ndarray
    coeffs: np.ndarray
    spectrum: Spectrum
    model: Optional[NonlinearityModel] = None
    dt: float = math.nan
    schema: str = 'TrajectorySegment'

    def __post_init__(self):
        object.__setattr__(self, 'times', np.asarray(self.times, dtype=float))
        object.__setattr__(self, 'coeffs', np.asarray(self.coeffs, dtype=float))
        typechecked(self)

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        assert self.times.ndim == 1 and self.times.size >= 1
        assert np.all(np.diff(self.times) > 0), 'times must be strictly increasing'
        assert self.coeffs.shape == (self.times.size, self.spectrum.M), \
            f'expected coefficients of shape {(self.times.size, self.spectrum.M)}, got {self.coeffs.shape}'

    def _asdict(self):
        return {
            'schema': self.schema,
            'model': None if self.model is None else self.model.name,
            'dt': self.dt,
            'times': self.times,
            'coeffs': self.coeffs,
        }

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def states(self) -> List[State]:
        return [State(c, self.spectrum) for c in self.coeffs]

    @property
    def final(self) -> State:
        return State(self.coeffs[-1], self.spectrum)

    def index_at(self, t: float) -> int:
        """grid node closest to t; t must lie on the grid up to half a step"""
        k = int(np.argmin(np.abs(self.times - t)))
        step = float(np.min(np.diff(self.times))) if self.times.size > 1 else 0.0
        if abs(self.times[k] - t) > max(step / 2, 1e-12):
            raise ValidationError(f'Time t={t} is not on the trajectory grid [{self.times[0]}, {self.times[-1]}]')
        return k

    def at(self, t: float) -> State:
        return State(self.coeffs[self.index_at(t)], self.spectrum)

    def norms(self, s: float=0.0) -> np.ndarray:
        return sobolev_norms(self.coeffs, self.spectrum, s)

    def to_csv(self) -> str:
        return trajectory_to_csv(self)


### Exponential integrator

def _phi(lam: np.ndarray, h: float) -> np.ndarray:
    """(1 - e^{-lam h}) / lam, continued by h at lam = 0"""
    safe = np.where(lam == 0, 1.0, lam)
    return np.where(lam == 0, h, -np.expm1(-lam * h) / safe)


def _exp_midpoint(lam: np.ndarray, func: Callable[[np.ndarray], np.ndarray], u0: np.ndarray,
                  n_steps: int, dt: float, t0: float=0.0) -> np.ndarray:
    """n_steps exponential midpoint steps of u' = -lam u + func(u); u0 may carry leading batch axes"""
    E, E_half = np.exp(-lam * dt), np.exp(-lam * dt / 2)
    phi, phi_half = _phi(lam, dt), _phi(lam, dt / 2)

    out = np.empty((n_steps + 1,) + np.shape(u0))
    out[0] = u = np.asarray(u0, dtype=float)
    for k in range(n_steps):
        u_mid = E_half * u + phi_half * func(u)
        u = E * u + phi * func(u_mid)
        if not np.all(np.isfinite(u)):
            raise NumericalError(
                f'Non-finite state at t={t0 + (k + 1) * dt:.6g}',
                hints=('Reduce dt, or check that the nonlinearity is cut off (bounded).',),
            )
        out[k + 1] = u
    return out


def _step_count(T: float, dt: float) -> Tuple[int, float]:
    if not dt > 0:
        raise ValidationError(f'Time step must be positive, got dt={dt}')
    if T < 0:
        raise ValidationError(f'Integration horizon must be nonnegative, got T={T}')
    n_steps = int(math.ceil(T / dt - 1e-9)) if T > 0 else 0
    return n_steps, (T / n_steps if n_steps else dt)


def _check_budget(model: NonlinearityModel, dt: float) -> None:
    if math.isfinite(model.lipschitz_L) and dt * model.lipschitz_L > STABILITY_BUDGET:
        raise ValidationError(
            f'dt={dt:g} is too large for L={model.lipschitz_L:.4g} (need dt*L <= {STABILITY_BUDGET})',
            hints=(f'Use --dt {STABILITY_BUDGET / model.lipschitz_L:.3g} or smaller.',),
        )


def integrate(model: NonlinearityModel, u0: State, T: float, dt: Optional[float]=None) -> TrajectorySegment:
    """u(t) for t in [0, T] on a uniform grid; dt is shrunk slightly so the grid ends exactly at T"""
    dt = TIME_STEP if dt is None else dt
    n_steps, dt = _step_count(T, dt)
    _check_budget(model, dt)
    if u0.spectrum.M != model.M:
        raise ValidationError(f'Initial state has {u0.spectrum.M} modes, model has {model.M}')
    coeffs = _exp_midpoint(model.spectrum.values, model, u0.coeffs, n_steps, dt)
    times = np.linspace(0.0, T, n_steps + 1) if n_steps else np.array([0.0])
    return TrajectorySegment(times=times, coeffs=coeffs, spectrum=model.spectrum, model=model, dt=dt)


def integrate_batch(model: NonlinearityModel, U0: np.ndarray, T: float, dt: Optional[float]=None) -> Tuple[np.ndarray, np.ndarray]:
    """integrate many initial states at once: returns times (K+1,) and coefficients (K+1, B, M)"""
    dt = TIME_STEP if dt is None else dt
    n_steps, dt = _step_count(T, dt)
    _check_budget(model, dt)
    U0 = np.atleast_2d(np.asarray(U0, dtype=float))
    if U0.shape[-1] != model.M:
        raise ValidationError(f'Initial states have {U0.shape[-1]} modes, model has {model.M}')
    coeffs = _exp_midpoint(model.spectrum.values, model, U0, n_steps, dt)
    times = np.linspace(0.0, T, n_steps + 1) if n_steps else np.array([0.0])
    return times, coeffs


def trajectory_to_csv(traj: TrajectorySegment) -> str:
    cols = ['t'] + [f'c{n}' for n in range(1, traj.spectrum.M + 1)]
    rows = [[float(t), *map(float, c)] for t, c in zip(traj.times, traj.coeffs)]
    return rows_to_csv(rows, cols=cols)


### Linear saddle problem

@dataclass(frozen=True, eq=False)
class SaddleProblem:
    spectrum: Spectrum
    N: int
    times: np.ndarray
    forcing: np.ndarray
    eps: float = 0.0
    tau: float = 0.0
    schema: str = 'SaddleProblem'

    def __post_init__(self):
        object.__setattr__(self, 'times', np.asarray(self.times, dtype=float))
        object.__setattr__(self, 'forcing', np.asarray(self.forcing, dtype=float))
        typechecked(self)

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        assert 1 <= self.N <= self.spectrum.M - 1, f'cut N={self.N} out of range'
        assert self.times.ndim == 1 and self.times.size >= 2
        steps = np.diff(self.times)
        assert np.all(steps > 0) and np.allclose(steps, steps[0], rtol=1e-9), 'time grid must be uniform'
        assert self.forcing.shape == (self.times.size, self.spectrum.M), 'one forcing row per time node'
        assert self.theta <= 0 or abs(self.eps) < self.theta, f'need |eps| < theta={self.theta}, got eps={self.eps}'

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    @property
    def alpha(self) -> float:
        return split_constants(self.spectrum, self.N)[0]

    @property
    def theta(self) -> float:
        return split_constants(self.spectrum, self.N)[1]

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def forcing_segment(self) -> TrajectorySegment:
        return TrajectorySegment(times=self.times, coeffs=self.forcing, spectrum=self.spectrum, dt=self.dt)


def saddle_window(theta: float, tol: float=1e-10) -> float:
    """half-width T_w with e^{-theta T_w} < tol"""
    return math.log(1 / tol) / theta


def _kernel_weights(z: np.ndarray, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    weights (far, near) of the two endpoint values in int_0^dt e^{-mu (dt - s)} h(s) ds
    for linear h, with z = mu dt; series near z = 0
    """
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    E = np.exp(-zs)
    far = np.where(small, 0.5 - z / 3 + z ** 2 / 8, (1 - E * (1 + zs)) / zs ** 2)
    near = np.where(small, 0.5 - z / 6 + z ** 2 / 24, (zs - 1 + E) / zs ** 2)
    return dt * far, dt * near


def _forward_convolution(mu: float, h: np.ndarray, dt: float) -> np.ndarray:
    """u_0 = 0, u_{k+1} = e^{-mu dt} u_k + far h_k + near h_{k+1}"""
    E = math.exp(-mu * dt)
    far, near = _kernel_weights(mu * dt, dt)
    y = signal.lfilter([float(near), float(far)], [1.0, -E], h)
    return y - float(near) * h[0] * E ** np.arange(h.size)


def solve_saddle(problem: SaddleProblem) -> TrajectorySegment:
    """
    the bounded solution of u' + (A - alpha) u = h on the window, with h extended by zero
    outside it: high modes start from 0 at the left end, low modes end at 0 at the right end
    """
    if problem.theta <= 0:
        raise ValidationError(
            f'No spectral gap at N={problem.N}: lambda_N = lambda_(N+1) = {problem.spectrum.values[problem.N - 1]}',
            hints=('The exponential dichotomy fails without a gap, pick another N.',),
        )
    mu = problem.spectrum.values - problem.alpha
    dt, N = problem.dt, problem.N
    u = np.zeros_like(problem.forcing)
    for n in range(problem.spectrum.M):
        h = problem.forcing[:, n]
        if not np.any(h):
            continue
        if n >= N:
            u[:, n] = _forward_convolution(mu[n], h, dt)
        else:
            u[:, n] = -_forward_convolution(-mu[n], h[::-1], dt)[::-1]
    return TrajectorySegment(times=problem.times, coeffs=u, spectrum=problem.spectrum, dt=dt)


def weighted_norm(traj: TrajectorySegment, eps: float=0.0, tau: float=0.0) -> float:
    """(int e^{-2 eps |t - tau|} |u(t)|^2 dt)^{1/2} by the trapezoid rule; a single node gives |u(tau)|"""
    sq = np.sum(traj.coeffs ** 2, axis=1)
    if traj.times.size == 1:
        return float(math.sqrt(sq[0]))
    weight = np.exp(-2 * eps * np.abs(traj.times - tau))
    return float(math.sqrt(trapezoid(weight * sq, traj.times)))


### Dissipativity and attractors

@dataclass(frozen=True)
class DissipativityReport:
    C: float
    alpha: float
    C_star: float
    C_h2: float
    alpha_h2: float
    C_star_h2: float
    absorbing_radius: float
    samples: int
    horizon: float
    schema: str = 'DissipativityReport'

    def __post_init__(self):
        typechecked(self)

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        assert self.C_star >= 0 and self.C_star_h2 >= 0
        assert self.alpha >= 0 and self.alpha_h2 >= 0

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def _asdict(self):
        return {f: getattr(self, f) for f in self.field_names()}


def _fit_dissipation(times: np.ndarray, sq_norms: np.ndarray) -> Tuple[float, float, float]:
    """
    fit |u(t)|^2 <= C e^{-alpha t} |u(0)|^2 + C_* from a batch of squared norms (K+1, B):
    C_* is the late-time level, alpha the log-slope of the normalized excess, C the
    smallest constant making the bound hold on the data
    """
    tail = times >= 0.8 * times[-1]
    C_star = float(np.max(sq_norms[tail]))
    initial = np.maximum(sq_norms[0], 1e-300)
    excess = np.max(np.maximum(sq_norms - C_star, 0.0) / initial, axis=1)

    usable = (times <= 0.8 * times[-1]) & (excess > FIT_FLOOR * max(excess[0], 1e-300))
    alpha = 0.0
    if np.count_nonzero(usable) >= 3:
        fit = stats.linregress(times[usable], np.log(excess[usable]))
        alpha = max(-float(fit.slope), 0.0)
    C = float(np.max(excess * np.exp(alpha * times)))
    return C, alpha, C_star


def dissipativity_probe(model: NonlinearityModel, u0_samples: np.ndarray, horizon: float,
                        dt: Optional[float]=None) -> DissipativityReport:
    """fitted constants of |u(t)|^2 <= C e^{-alpha t}|u(0)|^2 + C_* and of its H^2 analogue"""
    if not math.isfinite(model.bound_C):
        raise ValidationError(
            f'Model {model.name} has no global bound (bound_C = inf)',
            hints=('Dissipativity needs a bounded nonlinearity, use a cut-off model.',),
        )
    U0 = np.atleast_2d(np.asarray(u0_samples, dtype=float))
    times, coeffs = integrate_batch(model, U0, horizon, dt)
    C, alpha, C_star = _fit_dissipation(times, np.sum(coeffs ** 2, axis=-1))
    C_h2, alpha_h2, C_star_h2 = _fit_dissipation(times, sobolev_norms(coeffs, model.spectrum, 2.0) ** 2)
    return DissipativityReport(
        C=C, alpha=alpha, C_star=C_star,
        C_h2=C_h2, alpha_h2=alpha_h2, C_star_h2=C_star_h2,
        absorbing_radius=2 * math.sqrt(C_star),
        samples=int(U0.shape[0]), horizon=float(horizon),
    )


def random_ball(M: int, n: int, radius: float, seed: Optional[int]=None) -> np.ndarray:
    """n points uniform in the ball of the given radius in R^M"""
    rng = default_rng(seed)
    directions = rng.standard_normal((n, M))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return directions * radius * rng.random(n)[:, None] ** (1 / M)


def attractor_sample(model: NonlinearityModel, n_traj: int, burn_in: float, keep: int,
                     seed: Optional[int]=None, dt: Optional[float]=None,
                     radius: float=1.0, spacing: float=0.05) -> np.ndarray:
    """
    (n_traj * keep, M) snapshots: random starts in the ball of the given radius, burn_in time
    discarded, then keep snapshots spaced by `spacing` per trajectory
    """
    dt = TIME_STEP if dt is None else dt
    U0 = random_ball(model.M, n_traj, radius, seed)
    _, burned = integrate_batch(model, U0, burn_in, dt)
    start = burned[-1]

    # variation of constants bounds every trajectory by |u0| + C / lambda_1
    limit = (radius + model.bound_C / model.spectrum.values[0]) * (1 + 1e-6)
    if not np.all(np.linalg.norm(start, axis=1) <= limit):
        raise NumericalError(
            f'Trajectories of {model.name} left the ball of radius {limit:.4g} during burn-in',
            hints=('The model is not dissipative at this truncation, check the cut-off.',),
        )
    if keep < 1:
        raise ValidationError(f'keep must be at least 1, got {keep}')
    if keep == 1:
        return start
    times, coeffs = integrate_batch(model, start, spacing * (keep - 1), min(dt, spacing))
    stride = max(int(round(spacing / (times[1] - times[0]))), 1)
    snapshots = coeffs[::stride][:keep]
    return np.transpose(snapshots, (1, 0, 2)).reshape(-1, model.M)


### Checks on trajectory pairs

def log_convexity_check(traj1: TrajectorySegment, traj2: TrajectorySegment, t: float, T: float,
                        L: Optional[float]=None) -> CheckResult:
    """
    |v(-t)| <= e^{2Lt + L^2 t (T - t)/4} |v(-T)|^{t/T} |v(0)|^{(T-t)/T} for v = u1 - u2,
    with time 0 at the end of the trajectories
    """
    if not 0 < t < T:
        raise ValidationError(f'log_convexity_check needs 0 < t < T, got t={t}, T={T}')
    if L is None:
        if traj1.model is None:
            raise ValidationError('Pass L explicitly for trajectories without a model')
        L = traj1.model.lipschitz_L
    end = float(traj1.times[-1])
    if end - T < traj1.times[0] - 1e-12:
        raise ValidationError(f'Trajectories span {end - traj1.times[0]:g}, shorter than T={T}')
    v = traj1.coeffs - traj2.coeffs
    norm = lambda s: float(np.linalg.norm(v[traj1.index_at(end + s)]))     # noqa: E731
    lhs = norm(-t)
    rhs = math.exp(2 * L * t + L ** 2 * t * (T - t) / 4) * norm(-T) ** (t / T) * norm(0.0) ** ((T - t) / T)
    return CheckResult.compare('log-convexity of differences', lhs, '<=', rhs * (1 + 1e-9),
                               detail=f't={t:g}, T={T:g}, L={L:.4g}')


def _pair_differences(model: NonlinearityModel, U1: np.ndarray, U2: np.ndarray, T: float, dt: Optional[float]):
    U1, U2 = np.atleast_2d(U1), np.atleast_2d(U2)
    times, coeffs = integrate_batch(model, np.concatenate([U1, U2]), T, dt)
    B = U1.shape[0]
    return times, coeffs[:, :B] - coeffs[:, B:]


def lipschitz_growth_check(model: NonlinearityModel, U1: np.ndarray, U2: np.ndarray, T: float,
                           dt: Optional[float]=None) -> Tuple[CheckResult, float]:
    """|u1(t) - u2(t)| <= sqrt(C) e^{Lt} |u1(0) - u2(0)|, with C fitted; returns the check against C = 1"""
    times, diff = _pair_differences(model, U1, U2, T, dt)
    norms = np.linalg.norm(diff, axis=-1)
    ratio = norms / np.maximum(norms[0], 1e-300) * np.exp(-model.lipschitz_L * times)[:, None]
    C = float(np.max(ratio)) ** 2
    check = CheckResult.compare('Lipschitz growth of differences', math.sqrt(C), '<=', 1 + 1e-6,
                                detail=f'{diff.shape[1]} pairs over T={T:g}')
    return check, C


def smoothing_check(model: NonlinearityModel, U1: np.ndarray, U2: np.ndarray, T: float=1.0,
                    dt: Optional[float]=None) -> Tuple[CheckResult, float]:
    """
    t |u1(t) - u2(t)|_{H^2} / |u1(0) - u2(0)| stays below the variation-of-constants bound
    1/e + t L e^{Lt} I(t), I(t) = (2 + log max(e lambda_M t, 1)) / e; returns the check and fitted C
    """
    times, diff = _pair_differences(model, U1, U2, T, dt)
    inner = times > 0
    t = times[inner]
    d0 = np.linalg.norm(diff[0], axis=-1)
    h2 = sobolev_norms(diff[inner], model.spectrum, 2.0) / np.maximum(d0, 1e-300)
    scaled = t[:, None] * h2
    C = float(np.max(scaled))

    L, lam_max = model.lipschitz_L, float(model.spectrum.values[-1])
    integral = (2 + np.log(np.maximum(math.e * lam_max * t, 1.0))) / math.e
    bound = 1 / math.e + t * L * np.exp(L * t) * integral
    excess = float(np.max(scaled - bound[:, None]))
    check = CheckResult.compare('H^2 smoothing of differences', excess, '<=', 1e-9,
                                detail=f'fitted C={C:.4g} on (0, {T:g}]')
    return check, C


def high_mode_dissipativity(model: NonlinearityModel, U0: np.ndarray, N_values: List[int], T: float,
                            dt: Optional[float]=None, kappa: float=AVERAGING_KAPPA) -> Tuple[Dict[int, float], List[CheckResult]]:
    """
    R_*(N) = sup (|Q_N u(t)|_{H^s} - e^{-lambda_{N+1} t}|Q_N u(0)|_{H^s}), s = 2 - kappa, per N,
    each checked against the N-uniform bound C (s/2e)^{s/2} r0^{1-s/2}/(1-s/2) + C lambda^{s/2-1} e^{-s/2}
    """
    s = 2 - kappa
    times, coeffs = integrate_batch(model, U0, T, dt)
    R, checks = {}, []
    for N in N_values:
        N = check_cut(model.spectrum, N)
        lam = float(model.spectrum.values[N])
        high = np.array(coeffs[..., N:])
        weights = model.spectrum.values[N:] ** s
        norms = np.sqrt(np.sum(weights * high ** 2, axis=-1))
        excess = norms - np.exp(-lam * times)[:, None] * norms[0]
        R[N] = max(float(np.max(excess)), 0.0)
        r0 = s / (2 * lam)
        bound = model.bound_C * ((s / (2 * math.e)) ** (s / 2) * r0 ** (1 - s / 2) / (1 - s / 2)
                                 + lam ** (s / 2 - 1) * math.exp(-s / 2))
        checks.append(CheckResult.compare(f'Q_N dissipativity at N={N}', R[N], '<=', bound))
    return R, checks


def almost_equivalence_ratio(cloud: np.ndarray, spectrum: Spectrum, K: Optional[float]=None,
                             max_pairs: int=5000, seed: Optional[int]=None) -> float:
    """max over sampled pairs of |v|_{H^2} / (|v| log^{1/2}(2K/|v|)), v a difference of cloud points"""
    cloud = np.asarray(cloud, dtype=float)
    if len(cloud) < 2:
        raise ValidationError('Need at least two points for pair differences')
    rng = default_rng(seed)
    i = rng.integers(0, len(cloud), max_pairs)
    j = rng.integers(0, len(cloud), max_pairs)
    v = cloud[i[i != j]] - cloud[j[i != j]]
    norms = np.linalg.norm(v, axis=1)
    v, norms = v[norms > 0], norms[norms > 0]
    if not norms.size:
        return 0.0
    K = float(np.max(norms)) if K is None else K
    return float(np.max(sobolev_norms(v, spectrum, 2.0) / (norms * np.sqrt(np.log(2 * K / norms)))))


### Norm series fits

@dataclass(frozen=True)
class DecayFit:
    exp_rate: float
    quad_coeff: float
    r2: float
    n_used: int
    floored: bool = False
    schema: str = 'DecayFit'

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def _asdict(self):
        return {f: getattr(self, f) for f in self.field_names()}


def _quadratic_log_fit(t: np.ndarray, y: np.ndarray, floored: bool=False) -> DecayFit:
    design = np.stack([np.ones_like(t), t, t ** 2], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(exp_rate=float(coef[1]), quad_coeff=float(coef[2]), r2=r2,
                    n_used=int(t.size), floored=floored)


def decay_rate_fit(times: np.ndarray, norms: np.ndarray, floor: float=FIT_FLOOR) -> DecayFit:
    """least squares log|v| ~ c0 + exp_rate t + quad_coeff t^2, dropping values below floor * |v(t_0)|"""
    times, norms = np.asarray(times, dtype=float), np.asarray(norms, dtype=float)
    if times.shape != norms.shape:
        raise ValidationError(f'times and norms must match, got {times.shape} and {norms.shape}')
    if np.any(norms < 0):
        raise ValidationError('Norm series must be nonnegative')
    keep = norms > floor * norms[0]
    if np.count_nonzero(keep) < 3:
        raise ValidationError(
            f'Only {np.count_nonzero(keep)} values above the truncation floor {floor:g}',
            hints=('Shorten the fit window or raise the floor.',),
        )
    return _quadratic_log_fit(times[keep], np.log(norms[keep]), floored=not bool(np.all(keep)))


def log_decay_fit(times: np.ndarray, log_norms: np.ndarray) -> DecayFit:
    """same fit for series already in log form, used where the norms underflow"""
    times, log_norms = np.asarray(times, dtype=float), np.asarray(log_norms, dtype=float)
    if times.shape != log_norms.shape or times.size < 3:
        raise ValidationError(f'Need at least 3 matching points, got {times.shape} and {log_norms.shape}')
    if not np.all(np.isfinite(log_norms)):
        raise NumericalError('Log norm series has non-finite entries')
    return _quadratic_log_fit(times, log_norms)
