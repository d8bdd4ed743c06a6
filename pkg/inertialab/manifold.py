"""
Inertial manifold graphs Phi: P_N H -> Q_N H, built pointwise on a box grid of
low-mode coefficients.

Two independent point builders:

    lp   Lyapunov-Perron fixed point on (-T_w, 0] in the weighted variable
         v(t) = e^{alpha t} u(t), one solve_saddle per iteration, contraction L/theta
    bvp  boundary value problem P_N u(0) = u_plus, Q_N u(-T) = 0 by shooting,
         with T doubled until Phi stops moving

The grid values are interpolated (multilinear or cubic) to give the graph and
the reduced N-dimensional inertial form.
"""

__package__ = 'inertialab'

import math

from dataclasses import dataclass, field, fields
from functools import partial
from typing import List, Optional, Tuple, Dict, Any, Sequence

import numpy as np
from scipy import stats
from scipy.integrate import trapezoid
from scipy.interpolate import RegularGridInterpolator
from scipy.spatial.distance import pdist

from .spectral_core import ConeForm, check_cut, split_constants
from .models.nonlinearity import NonlinearityModel
from .dynamics import (
    SaddleProblem,
    solve_saddle,
    integrate_batch,
    random_ball,
    decay_rate_fit,
    _exp_midpoint,
    _step_count,
    _check_budget,
)
from .reports.schema import LabError, ValidationError, NumericalError, CheckResult, typechecked
from .system import parallel_map
from .util import default_rng
from .config import TIME_STEP, MANIFOLD_TOL, LP_WINDOW_FACTOR, BVP_MAX_THETA_T


EXP_CUTOFF = 40.0       # e^{alpha t} F(...) is dropped once alpha t < -EXP_CUTOFF


@dataclass(frozen=True)
class GraphPoint:
    u_plus: Tuple[float, ...]
    value: Tuple[float, ...]
    method: str
    iterations: int = 0
    T: float = math.nan
    steps: Tuple[float, ...] = ()
    ratios: Tuple[float, ...] = ()
    residual: float = 0.0
    schema: str = 'GraphPoint'

    @property
    def Q(self) -> np.ndarray:
        return np.array(self.value)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios) if self.ratios else 0.0

    def _asdict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _as_low_point(u_plus: Sequence[float], N: int) -> np.ndarray:
    p = np.asarray(u_plus, dtype=float).reshape(-1)
    if p.shape != (N,):
        raise ValidationError(f'u_plus must have N={N} coefficients, got {p.size}')
    return p


### Lyapunov-Perron

def lp_window(theta: float, dt: float, window: Optional[float]=None) -> np.ndarray:
    T_w = LP_WINDOW_FACTOR / theta if window is None else window
    K = max(int(math.ceil(T_w / dt - 1e-9)), 2)
    return np.linspace(-T_w, 0.0, K + 1)


def _line_norm(w: np.ndarray, times: np.ndarray, mu: np.ndarray, N: int) -> float:
    """L^2(R) norm of a saddle solution: the window plus the free high-mode decay after t = 0"""
    inside = trapezoid(np.sum(w ** 2, axis=1), times)
    tail = float(np.sum(w[-1, N:] ** 2 / (2 * mu[N:])))
    return math.sqrt(inside + tail)


def build_graph_lp(model: NonlinearityModel, N: int, u_plus: Sequence[float], tol: Optional[float]=None,
                   dt: Optional[float]=None, window: Optional[float]=None, max_iter: int=500) -> GraphPoint:
    """Phi(u_plus) as w(0) of the fixed point w = T(Fbar(v_hom + w)), T the saddle solution operator"""
    tol = MANIFOLD_TOL if tol is None else tol
    dt = TIME_STEP if dt is None else dt
    N = check_cut(model.spectrum, N)
    alpha, theta = split_constants(model.spectrum, N)
    L = model.lipschitz_L
    if not theta > L:
        raise ValidationError(
            f'Lyapunov-Perron needs theta > L, got theta={theta:.4g}, L={L:.4g} at N={N}',
            hints=('Pick an N with a wider gap (see gap-find) or use the bvp method.',),
        )
    p = _as_low_point(u_plus, N)

    times = lp_window(theta, dt, window)
    mu = model.spectrum.values - alpha
    v_hom = np.zeros((times.size, model.M))
    v_hom[:, :N] = np.exp(-mu[:N] * times[:, None]) * p
    active = alpha * times > -EXP_CUTOFF
    damping = np.exp(alpha * times[active])[:, None]

    w = np.zeros_like(v_hom)
    steps: List[float] = []
    ratios: List[float] = []
    for iteration in range(1, max_iter + 1):
        forcing = np.zeros_like(w)
        forcing[active] = damping * model((v_hom[active] + w[active]) / damping)
        w_next = solve_saddle(SaddleProblem(model.spectrum, N, times, forcing)).coeffs
        step = _line_norm(w_next - w, times, mu, N)
        w = w_next
        if steps and steps[-1] > 10 * max(tol, 1e-12):
            ratio = step / steps[-1]
            ratios.append(ratio)
            if ratio >= 1 and step > tol:
                raise NumericalError(
                    f'Lyapunov-Perron iteration is not contracting at u_plus={p.tolist()} (ratio {ratio:.4g})',
                    hints=(f'Expected ratio <= L/theta = {L / theta:.4g}; the declared L may be too small.',),
                )
        steps.append(step)
        if step < tol:
            break
    else:
        raise NumericalError(
            f'Lyapunov-Perron did not converge in {max_iter} iterations (last step {steps[-1]:.3g})',
            hints=('Loosen --tol or raise max_iter.',),
        )

    return GraphPoint(
        u_plus=tuple(map(float, p)), value=tuple(map(float, w[-1, N:])), method='lp',
        iterations=iteration, T=float(-times[0]), steps=tuple(steps), ratios=tuple(ratios),
    )


### Boundary value problem

def default_schedule(theta: float, max_theta_T: float=BVP_MAX_THETA_T) -> List[float]:
    """T_0 = 1/theta, doubling while theta T <= max_theta_T"""
    schedule, T = [], 1 / theta
    while T * theta <= max_theta_T:
        schedule.append(T)
        T *= 2
    return schedule


def _shoot(model: NonlinearityModel, N: int, p: np.ndarray, T: float, dt: float, q: np.ndarray,
           tol: float, max_newton: int=30) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    solve G_T(q) = p where u(-T) = (e^{A_+ T} q, 0) and G_T(q) = P_N u(0), by damped
    Newton with a finite-difference Jacobian; returns q, Q_N u(0) and the residual
    """
    n_steps, dt = _step_count(T, dt)
    lam = model.spectrum.values
    growth = np.exp(lam[:N] * T)

    def run(qs: np.ndarray) -> np.ndarray:
        start = np.zeros((qs.shape[0], model.M))
        start[:, :N] = growth * qs
        return _exp_midpoint(lam, model, start, n_steps, dt, t0=-T)[-1]

    target = tol / 10
    for _ in range(max_newton):
        h = 1e-7 * max(1.0, float(np.linalg.norm(q)))
        batch = np.vstack([q, q + h * np.eye(N)])
        finals = run(batch)
        residual = finals[0, :N] - p
        res_norm = float(np.linalg.norm(residual))
        if res_norm <= target:
            return q, finals[0, N:], res_norm
        J = (finals[1:, :N] - finals[0, :N]).T / h
        try:
            delta = np.linalg.solve(J, -residual)
        except np.linalg.LinAlgError:
            raise NumericalError(
                f'Shooting Jacobian is singular at T={T:g} (residual {res_norm:.3g})',
                hints=('G_T is not invertible numerically, reduce T or dt.',),
            )
        damping = 1.0
        while True:
            trial = q + damping * delta
            trial_res = float(np.linalg.norm(run(trial[None, :])[0, :N] - p))
            if trial_res < res_norm or damping < 1 / 64:
                break
            damping /= 2
        q = trial

    raise NumericalError(
        f'Shooting did not invert G_T at T={T:g} after {max_newton} Newton steps (residual {res_norm:.3g})',
        hints=('Reduce dt, or use the lp method.',),
    )


def build_graph_bvp(model: NonlinearityModel, N: int, u_plus: Sequence[float],
                    T_schedule: Optional[Sequence[float]]=None, tol: Optional[float]=None,
                    dt: Optional[float]=None) -> GraphPoint:
    """Q_N u(0) of the solution with P_N u(0) = u_plus and Q_N u(-T) = 0, for T along the schedule"""
    tol = MANIFOLD_TOL if tol is None else tol
    dt = TIME_STEP if dt is None else dt
    N = check_cut(model.spectrum, N)
    _check_budget(model, dt)
    _, theta = split_constants(model.spectrum, N)
    if theta <= 0:
        raise ValidationError(f'No spectral gap at N={N}, the boundary value problem has no limit')
    p = _as_low_point(u_plus, N)

    schedule = list(T_schedule) if T_schedule is not None else default_schedule(theta)
    q = p.copy()
    previous: Optional[np.ndarray] = None
    differences: List[float] = []
    residual = 0.0
    for T in schedule:
        q, value, residual = _shoot(model, N, p, T, dt, q, tol)
        if previous is not None:
            differences.append(float(np.linalg.norm(value - previous)))
            if differences[-1] < tol:
                return GraphPoint(
                    u_plus=tuple(map(float, p)), value=tuple(map(float, value)), method='bvp',
                    iterations=len(differences) + 1, T=float(T), steps=tuple(differences), residual=residual,
                )
        previous = value
        # the low modes of u(-T) scale like e^{A_+ T}, keep the same q as the next initial guess

    raise NumericalError(
        f'T schedule exhausted before successive values agreed to tol={tol:g}',
        hints=(f'Last differences: {", ".join(f"{d:.3g}" for d in differences[-3:])}',),
    )


POINT_BUILDERS = {
    'lp': build_graph_lp,
    'bvp': build_graph_bvp,
}


### The graph

@dataclass(frozen=True)
class GridSpec:
    radius: float
    points: int

    def axes(self, N: int) -> Tuple[np.ndarray, ...]:
        if not (self.radius > 0 and self.points >= 2):
            raise ValidationError(f'Grid needs radius > 0 and at least 2 points, got {self}')
        return tuple(np.linspace(-self.radius, self.radius, self.points) for _ in range(N))


@dataclass(frozen=True, eq=False)
class ManifoldGraph:
    N: int
    M: int
    axes: Tuple[np.ndarray, ...]
    values: np.ndarray
    method: str
    interpolation: str = 'linear'
    lipschitz_est: float = 0.0
    declared_K: float = math.inf
    tol: float = MANIFOLD_TOL
    convergence: Tuple[Dict[str, Any], ...] = ()
    source: str = 'custom'
    model: Optional[NonlinearityModel] = field(default=None, repr=False)
    schema: str = 'ManifoldGraph'

    def __post_init__(self):
        object.__setattr__(self, 'axes', tuple(np.asarray(a, dtype=float) for a in self.axes))
        object.__setattr__(self, 'values', np.asarray(self.values, dtype=float))
        typechecked(self)
        interpolator = RegularGridInterpolator(
            self.axes, self.values, method=self.interpolation, bounds_error=False, fill_value=None,
        )
        object.__setattr__(self, '_interpolator', interpolator)

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        assert 1 <= self.N < self.M
        assert len(self.axes) == self.N, 'one axis per low mode'
        assert self.values.shape == tuple(a.size for a in self.axes) + (self.M - self.N,)
        assert self.method in POINT_BUILDERS, f'unknown method {self.method}'
        assert self.interpolation in ('linear', 'cubic')
        assert self.interpolation != 'cubic' or min(a.size for a in self.axes) >= 4, 'cubic needs 4 points per axis'

    def _asdict(self):
        return {
            'schema': self.schema,
            'N': self.N,
            'M': self.M,
            'axes': [a for a in self.axes],
            'values': self.values,
            'method': self.method,
            'interpolation': self.interpolation,
            'lipschitz_est': self.lipschitz_est,
            'declared_K': self.declared_K,
            'tol': self.tol,
            'convergence': list(self.convergence),
            'source': self.source,
        }

    def to_json(self, indent=4, sort_keys=True) -> str:
        from .reports.json import to_json

        return to_json(self, indent=indent, sort_keys=sort_keys)

    @classmethod
    def from_json(cls, json_info: Dict[str, Any], model: Optional[NonlinearityModel]=None) -> 'ManifoldGraph':
        declared = json_info.get('declared_K')
        return cls(
            N=int(json_info['N']),
            M=int(json_info['M']),
            axes=tuple(np.array(a, dtype=float) for a in json_info['axes']),
            values=np.array(json_info['values'], dtype=float),
            method=json_info['method'],
            interpolation=json_info.get('interpolation', 'linear'),
            lipschitz_est=float(json_info.get('lipschitz_est', 0.0)),
            declared_K=math.inf if declared is None else float(declared),
            tol=float(json_info.get('tol', MANIFOLD_TOL)),
            convergence=tuple(json_info.get('convergence', ())),
            source=json_info.get('source', 'custom'),
            model=model,
        )

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    @property
    def lower(self) -> np.ndarray:
        return np.array([a[0] for a in self.axes])

    @property
    def upper(self) -> np.ndarray:
        return np.array([a[-1] for a in self.axes])

    @property
    def grid_points(self) -> np.ndarray:
        return np.stack(np.meshgrid(*self.axes, indexing='ij'), axis=-1).reshape(-1, self.N)

    def contains(self, p: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(p)
        slack = 1e-12 * np.maximum(1.0, self.upper - self.lower)
        return np.all((p >= self.lower - slack) & (p <= self.upper + slack), axis=-1)

    def __call__(self, p: np.ndarray) -> np.ndarray:
        """interpolated Q_N values at low-mode points (..., N)"""
        p = np.asarray(p, dtype=float)
        flat = p.reshape(-1, self.N)
        if not np.all(self.contains(flat)):
            raise ValidationError(
                'Query outside the manifold grid hull, extrapolation is not allowed',
                hints=(f'Grid box: {self.lower.tolist()} .. {self.upper.tolist()}',),
            )
        clipped = np.clip(flat, self.lower, self.upper)
        return self._interpolator(clipped).reshape(p.shape[:-1] + (self.M - self.N,))

    def lift(self, p: np.ndarray) -> np.ndarray:
        """p + Phi(p) as full coefficient vectors"""
        p = np.asarray(p, dtype=float)
        return np.concatenate([p, self(p)], axis=-1)

    def checks(self) -> List[CheckResult]:
        return [CheckResult.compare('graph Lipschitz constant', self.lipschitz_est, '<=', self.declared_K * (1 + 1e-6))]


def declared_lipschitz(model: NonlinearityModel, N: int) -> float:
    """graphs are 1-Lipschitz under the cone condition lambda_{N+1} - lambda_N > 2L, no bound otherwise"""
    _, theta = split_constants(model.spectrum, N)
    return 1.0 if theta > model.lipschitz_L else math.inf


def lp_contraction_checks(graph: ManifoldGraph, model: NonlinearityModel, slack: float=0.05) -> List[CheckResult]:
    """per-step contraction ratios of the Lyapunov-Perron points against L/theta, and their iteration counts"""
    if graph.method != 'lp':
        raise ValidationError(f'Contraction checks need a Lyapunov-Perron graph, got method={graph.method}')
    _, theta = split_constants(model.spectrum, graph.N)
    q = model.lipschitz_L / theta
    cap = (math.ceil(math.log(graph.tol) / math.log(q)) if 0 < q < 1 else 0) + 5
    ratios = [point['max_ratio'] for point in graph.convergence]
    iterations = [point['iterations'] for point in graph.convergence]
    return [
        CheckResult.compare('largest contraction ratio', max(ratios, default=0.0), '<=', q + slack,
                            detail=f'L/theta={q:.4g}'),
        CheckResult.compare('most contraction iterations', max(iterations, default=0), '<=', cap,
                            detail=f'tol={graph.tol:g}'),
    ]


def _build_point(builder, mesh: np.ndarray, index: int):
    try:
        return index, builder(u_plus=mesh[index]), None
    except LabError as err:
        return index, None, str(err)


def build_manifold(model: NonlinearityModel, N: int, grid: GridSpec, method: str='lp',
                   tol: Optional[float]=None, dt: Optional[float]=None, interpolation: str='linear',
                   workers: Optional[int]=None) -> ManifoldGraph:
    """Phi on every node of the box grid, its interpolant and the measured Lipschitz constant"""
    tol = MANIFOLD_TOL if tol is None else tol
    if method not in POINT_BUILDERS:
        from difflib import get_close_matches
        close = get_close_matches(method, POINT_BUILDERS.keys(), n=1)
        raise ValidationError(
            f'Unknown manifold method: {method}',
            hints=(f'Did you mean {close[0]}?' if close else f'Available: {", ".join(POINT_BUILDERS)}',),
        )
    N = check_cut(model.spectrum, N)
    axes = grid.axes(N)
    mesh = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, N)
    builder = partial(POINT_BUILDERS[method], model, N, tol=tol, dt=dt)

    results = parallel_map(partial(_build_point, builder, mesh), range(len(mesh)), workers=workers)
    failures = [(index, message) for index, _, message in results if message is not None]
    if failures:
        raise NumericalError(
            f'{len(failures)} of {len(mesh)} grid points failed: indices {[i for i, _ in failures]}',
            hints=(f'First failure: {failures[0][1]}',),
        )

    points = [point for _, point, _ in sorted(results, key=lambda r: r[0])]
    flat_values = np.array([point.value for point in points])
    values = flat_values.reshape(tuple(a.size for a in axes) + (model.M - N,))
    lipschitz_est = 0.0
    if len(mesh) > 1:
        lipschitz_est = float(np.max(pdist(flat_values) / pdist(mesh)))
    convergence = tuple(
        {'index': i, 'iterations': point.iterations, 'T': point.T, 'max_ratio': point.max_ratio, 'residual': point.residual}
        for i, point in enumerate(points)
    )
    return ManifoldGraph(
        N=N, M=model.M, axes=axes, values=values, method=method, interpolation=interpolation,
        lipschitz_est=lipschitz_est, declared_K=declared_lipschitz(model, N), tol=tol,
        convergence=convergence, source=model.spectrum.source, model=model,
    )


### Reduced dynamics on the manifold

@dataclass(frozen=True, eq=False)
class ReducedForm:
    manifold: ManifoldGraph
    model: NonlinearityModel

    @property
    def N(self) -> int:
        return self.manifold.N

    @property
    def lam(self) -> np.ndarray:
        return self.model.spectrum.values[:self.N]

    def nonlinearity(self, p: np.ndarray) -> np.ndarray:
        """P_N F(p + Phi(p))"""
        return self.model(self.manifold.lift(p))[..., :self.N]

    def vector_field(self, p: np.ndarray) -> np.ndarray:
        return -self.lam * np.asarray(p, dtype=float) + self.nonlinearity(p)

    def __call__(self, p: np.ndarray) -> np.ndarray:
        return self.vector_field(p)

    def integrate(self, p0: np.ndarray, T: float, dt: Optional[float]=None, backward: bool=False) -> Tuple[np.ndarray, np.ndarray]:
        """times and low-mode states; backward runs p' = A_+ p - P_N F(lift(p)) and reports times 0, -dt, ..."""
        dt = TIME_STEP if dt is None else dt
        n_steps, dt = _step_count(T, dt)
        sign = -1.0 if backward else 1.0
        func = (lambda p: -self.nonlinearity(p)) if backward else self.nonlinearity
        try:
            states = _exp_midpoint(sign * self.lam, func, np.asarray(p0, dtype=float), n_steps, dt)
        except ValidationError as err:
            raise NumericalError(
                f'Reduced {"backward " if backward else ""}integration left the manifold grid: {err}',
                hints=('Choose a smaller T_fit or a larger grid radius.',),
            )
        return sign * dt * np.arange(n_steps + 1), states


def inertial_form(manifold: ManifoldGraph, model: Optional[NonlinearityModel]=None) -> ReducedForm:
    model = model or manifold.model
    if model is None:
        raise ValidationError('inertial_form needs the model the manifold was built for')
    if model.M != manifold.M:
        raise ValidationError(f'Model has {model.M} modes, manifold has {manifold.M}')
    return ReducedForm(manifold=manifold, model=model)


### Exponential tracking

@dataclass(frozen=True)
class TrackingReport:
    rate: float
    constant: float
    r2: float
    quad_coeff: float
    fit_points: int
    initial_distance: float
    max_distance: float
    settle: float = 0.0
    endpoint_mismatch: float = 0.0
    times: Tuple[float, ...] = ()
    distances: Tuple[float, ...] = ()
    schema: str = 'TrackingReport'

    def _asdict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def off_manifold_starts(model: NonlinearityModel, manifold: ManifoldGraph, count: int, radius: float,
                        offset: float, seed: Optional[int]=None, dt: Optional[float]=None) -> np.ndarray:
    """
    (count, M) states p + Phi(p) + s e_{N+1}: p uniform in the low-mode ball of the given radius and
    lifted with the point builder, |s| uniform in [offset/2, offset] with a random sign
    """
    if not (radius > 0 and offset > 0):
        raise ValidationError(f'radius and offset must be positive, got radius={radius}, offset={offset}')
    N = manifold.N
    rng = default_rng(seed)
    build = POINT_BUILDERS[manifold.method]
    starts = []
    for p in random_ball(N, count, radius, int(rng.integers(2 ** 31))):
        u0 = np.concatenate([p, build(model, N, p, tol=manifold.tol, dt=dt).Q])
        u0[N] += rng.choice([-1.0, 1.0]) * offset * rng.uniform(0.5, 1.0)
        starts.append(u0)
    return np.array(starts)


def tracking_verify(model: NonlinearityModel, manifold: ManifoldGraph, u0: np.ndarray, T_fit: float,
                    dt: Optional[float]=None, fit_drop: float=1e-3, settle: Optional[float]=None,
                    refine: int=2) -> TrackingReport:
    """
    integrate u from u0, put v(T_fit) on the manifold above P_N u(T_fit), run v back to 0 on the
    reduced form, lift v(0) with the point builder and compare the forward runs.

    The reduced form runs on the interpolated graph, so v(T_fit) misses P_N u(T_fit) a little:
    each refine sweep shifts v(0) by the difference of the backward images of the target and of
    the miss. The decay rate is fitted from settle on (1 / lambda_{N+1} unless given), while the
    distance stays above fit_drop times its initial value.
    """
    dt = TIME_STEP if dt is None else dt
    N = manifold.N
    u0 = np.asarray(getattr(u0, 'coeffs', u0), dtype=float)
    reduced = inertial_form(manifold, model)
    back = lambda p: reduced.integrate(p, T_fit, dt, backward=True)[1][-1]
    build = POINT_BUILDERS[manifold.method]

    _, u_path = integrate_batch(model, u0[None, :], T_fit, dt)
    u_path = u_path[:, 0]
    target = u_path[-1, :N]
    p_target = back(target)

    p0 = p_target
    for sweep in range(refine + 1):
        v0 = np.concatenate([p0, build(model, N, p0, tol=manifold.tol, dt=dt).Q])
        times, v_path = integrate_batch(model, v0[None, :], T_fit, dt)
        v_path = v_path[:, 0]
        if sweep < refine:
            p0 = p0 + p_target - back(v_path[-1, :N])
    distances = np.linalg.norm(u_path - v_path, axis=1)

    settle = 1 / float(model.spectrum.values[N]) if settle is None else settle
    d0 = float(distances[0])
    usable = (times >= settle - dt / 2) & (distances >= fit_drop * d0)
    if not d0 > 1e-12:
        usable[:] = False
    rate = constant = r2 = quad = math.nan
    if np.count_nonzero(usable) >= 3:
        fit = stats.linregress(times[usable], np.log(distances[usable]))
        rate, constant, r2 = -float(fit.slope), math.exp(fit.intercept) / d0, float(fit.rvalue ** 2)
        quad = decay_rate_fit(times[usable], distances[usable]).quad_coeff
    return TrackingReport(
        rate=rate, constant=constant, r2=r2, quad_coeff=quad, fit_points=int(np.count_nonzero(usable)),
        initial_distance=d0, max_distance=float(np.max(distances)), settle=settle,
        endpoint_mismatch=float(np.linalg.norm(v_path[-1, :N] - target)),
        times=tuple(map(float, times)), distances=tuple(map(float, distances)),
    )


### Cone and squeezing

@dataclass(frozen=True)
class ConeReport:
    N: int
    alpha: float
    mu: float
    pairs: int
    violations: int
    invariance_pairs: int
    invariance_violations: int
    worst_slack: float
    first_violation_time: Optional[float] = None
    schema: str = 'ConeReport'

    def _asdict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def checks(self) -> List[CheckResult]:
        return [
            CheckResult.compare('cone inequality violations', self.violations, '<=', 0,
                                detail=f'{self.pairs} pairs, mu={self.mu:.4g}'),
            CheckResult.compare('cone invariance violations', self.invariance_violations, '<=', 0,
                                detail=f'{self.invariance_pairs} pairs starting in K+'),
        ]


def _pair_paths(model: NonlinearityModel, U1: np.ndarray, U2: np.ndarray, T: float, dt: Optional[float]):
    U1, U2 = np.atleast_2d(np.asarray(U1, dtype=float)), np.atleast_2d(np.asarray(U2, dtype=float))
    if U1.shape != U2.shape:
        raise ValidationError(f'Pair arrays must match, got {U1.shape} and {U2.shape}')
    times, paths = integrate_batch(model, np.concatenate([U1, U2]), T, dt)
    B = U1.shape[0]
    return times, paths[:, :B], paths[:, B:]


def cone_check(model: NonlinearityModel, U1: np.ndarray, U2: np.ndarray, N: int, T: float=1.0,
               dt: Optional[float]=None, rtol: float=1e-9) -> ConeReport:
    """
    along each pair v = u1 - u2 check 1/2 V'(v) + alpha V(v) <= -mu |v|^2 with the exact
    derivative from the vector field, mu = max(theta - L, 0), and that pairs starting in
    K+ = {V <= 0} stay there
    """
    N = check_cut(model.spectrum, N)
    alpha, theta = split_constants(model.spectrum, N)
    mu = max(theta - model.lipschitz_L, 0.0)
    times, path1, path2 = _pair_paths(model, U1, U2, T, dt)

    v = path1 - path2
    dv = model.vector_field(path1) - model.vector_field(path2)
    V = ConeForm(N)(v)
    half_dV = np.sum(v[..., N:] * dv[..., N:], axis=-1) - np.sum(v[..., :N] * dv[..., :N], axis=-1)
    sq = np.sum(v ** 2, axis=-1)
    scale = rtol * (1 + model.spectrum.values[-1]) * sq

    slack = -mu * sq - (half_dV + alpha * V)
    bad = slack < -scale
    violations = int(np.count_nonzero(np.any(bad, axis=0)))

    starts_inside = V[0] <= 0
    leaves = np.any(V > rtol * sq, axis=0) & starts_inside
    first_time = None
    if bad.any():
        first_time = float(times[np.argmax(np.any(bad, axis=1))])
    elif leaves.any():
        first_time = float(times[np.argmax(np.any((V > rtol * sq)[:, leaves], axis=1))])

    return ConeReport(
        N=N, alpha=alpha, mu=mu, pairs=int(v.shape[1]), violations=violations,
        invariance_pairs=int(np.count_nonzero(starts_inside)), invariance_violations=int(np.count_nonzero(leaves)),
        worst_slack=float(np.min(slack / np.maximum(sq, 1e-300))), first_violation_time=first_time,
    )


@dataclass(frozen=True)
class SqueezingReport:
    N: int
    gamma: float
    gamma_shifted: float
    constant: float
    gamma_target: float
    pairs_used: int
    pairs_total: int
    schema: str = 'SqueezingReport'

    def _asdict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def checks(self) -> List[CheckResult]:
        return [CheckResult.compare('squeezing rate', self.gamma_shifted, '>=', self.gamma_target,
                                    detail=f'{self.pairs_used} of {self.pairs_total} pairs outside K+ at T')]


def squeezing_check(model: NonlinearityModel, U1: np.ndarray, U2: np.ndarray, N: int, gamma_target: float,
                    T: float=1.0, dt: Optional[float]=None) -> SqueezingReport:
    """
    for pairs with V(v(T)) > 0 fit |v(t)| <= C e^{-gamma t}|v(0)|; gamma is the slowest fitted
    decay rate, gamma_shifted = gamma - alpha is the rate of the shifted semigroup
    """
    N = check_cut(model.spectrum, N)
    alpha, _ = split_constants(model.spectrum, N)
    times, path1, path2 = _pair_paths(model, U1, U2, T, dt)
    v = path1 - path2
    outside = ConeForm(N)(v[-1]) > 0
    norms = np.linalg.norm(v[:, outside], axis=-1)
    if not outside.any():
        return SqueezingReport(N=N, gamma=math.nan, gamma_shifted=math.nan, constant=math.nan,
                               gamma_target=gamma_target, pairs_used=0, pairs_total=int(v.shape[1]))

    log_ratio = np.log(np.maximum(norms / norms[0], 1e-300))
    t_centered = times - times.mean()
    slopes = t_centered @ (log_ratio - log_ratio.mean(axis=0)) / np.sum(t_centered ** 2)
    gamma = -float(np.max(slopes))
    constant = float(np.max(np.exp(log_ratio + gamma * times[:, None])))
    return SqueezingReport(
        N=N, gamma=gamma, gamma_shifted=gamma - alpha, constant=constant, gamma_target=gamma_target,
        pairs_used=int(np.count_nonzero(outside)), pairs_total=int(v.shape[1]),
    )


### Manifold self-checks

def graph_invariance_check(model: NonlinearityModel, manifold: ManifoldGraph, samples: int=20, T: float=1.0,
                           dt: Optional[float]=None, seed: Optional[int]=None) -> Tuple[CheckResult, float]:
    """
    dist(S(t)(x + Phi(x)), graph) for t in [0, T] against 10 times the interpolation error,
    the latter measured against the point builder at a few interior points; returns the check and that error
    """
    dt = TIME_STEP if dt is None else dt
    rng = default_rng(seed)
    lower, upper = manifold.lower, manifold.upper
    inner = lower + 0.1 * (upper - lower) + 0.8 * (upper - lower) * rng.random((samples, manifold.N))

    checked = inner[:min(samples, 4)]
    builder = POINT_BUILDERS[manifold.method]
    exact = np.array([builder(model, manifold.N, p, tol=manifold.tol, dt=dt).value for p in checked])
    interp_error = float(np.max(np.linalg.norm(manifold(checked) - exact, axis=-1)))

    _, paths = integrate_batch(model, manifold.lift(inner), T, dt)
    low, high = paths[..., :manifold.N], paths[..., manifold.N:]
    inside = manifold.contains(low.reshape(-1, manifold.N)).reshape(low.shape[:-1])
    distances = np.linalg.norm(high[inside] - manifold(low[inside]), axis=-1)
    worst = float(np.max(distances)) if distances.size else 0.0
    bound = 10 * max(interp_error, manifold.tol)
    check = CheckResult.compare('graph invariance under the flow', worst, '<=', bound,
                                detail=f'interpolation error {interp_error:.3g}')
    return check, interp_error


def backward_decay_fit(manifold: ManifoldGraph, p0: Sequence[float], T: float, dt: Optional[float]=None,
                       model: Optional[NonlinearityModel]=None) -> Tuple[float, float, float]:
    """fit |u(t)| <= C e^{eps (t - tau)} |u(tau)| along a backward reduced trajectory from tau = 0; returns (eps, C, r2)"""
    reduced = inertial_form(manifold, model)
    times, states = reduced.integrate(np.asarray(p0, dtype=float), T, dt, backward=True)
    norms = np.linalg.norm(manifold.lift(states), axis=-1)
    keep = norms > 1e-14 * norms[0]
    if np.count_nonzero(keep) < 3:
        raise ValidationError('Backward trajectory hit the floor before three samples')
    fit = stats.linregress(times[keep], np.log(norms[keep] / norms[0]))
    eps = float(fit.slope)
    C = float(np.max(norms / norms[0] * np.exp(-eps * times)))
    return eps, C, float(fit.rvalue ** 2)
