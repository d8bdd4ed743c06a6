__package__ = 'inertialab.models'

import math

from dataclasses import dataclass, field
from typing import Callable, Dict, Any, Optional

import numpy as np

from ..spectral_core import Spectrum, State, sobolev_norms, shell_projector, check_cut
from ..reports.schema import ValidationError, typechecked
from ..util import default_rng
from ..config import LIPSCHITZ_SAFETY, CUTOFF_RADIUS
from .spectra import spectrum_interval
from .collocation import CollocationGrid


ArrayFunc = Callable[[np.ndarray], np.ndarray]
DerivativeFunc = Callable[[np.ndarray, np.ndarray], np.ndarray]
PointwiseFunc = Callable[[Any, np.ndarray], np.ndarray]


### Smooth cut-off profiles

def smooth_step(s: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for s <= 0, 1 for s >= 1, built from exp(-1/s)"""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return a / (a + b)


def smooth_step_prime(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    inside = (s > 0) & (s < 1)
    t = np.where(inside, s, 0.5)
    a, b = np.exp(-1.0 / t), np.exp(-1.0 / (1.0 - t))
    deriv = a * b * (1.0 / t ** 2 + 1.0 / (1.0 - t) ** 2) / (a + b) ** 2
    return np.where(inside, deriv, 0.0)


def radial_cutoff(r: np.ndarray) -> np.ndarray:
    """1 on |r| <= 1, 0 on |r| >= 2, monotone in between"""
    return 1.0 - smooth_step(np.abs(r) - 1.0)


def radial_cutoff_prime(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return -np.sign(r) * smooth_step_prime(np.abs(r) - 1.0)


### The nonlinearity record

@dataclass(frozen=True, eq=False)
class NonlinearityModel:
    spectrum: Spectrum
    func: ArrayFunc
    lipschitz_L: float
    bound_C: float
    smoothing_beta: float = 0.0
    derivative: Optional[DerivativeFunc] = None
    odd: bool = False
    name: str = 'custom'
    params: Dict[str, Any] = field(default_factory=dict)
    schema: str = 'NonlinearityModel'

    def __post_init__(self):
        typechecked(self)

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        assert isinstance(self.spectrum, Spectrum)
        assert callable(self.func)
        assert self.derivative is None or callable(self.derivative)
        assert self.lipschitz_L >= 0, f'Lipschitz constant must be nonnegative, got {self.lipschitz_L}'
        assert self.bound_C >= 0, f'bound must be nonnegative, got {self.bound_C}'
        assert -2 < self.smoothing_beta <= 0, f'smoothing index must lie in (-2, 0], got {self.smoothing_beta}'

    def _asdict(self):
        return {
            'schema': self.schema,
            'name': self.name,
            'source': self.spectrum.source,
            'M': self.spectrum.M,
            'lipschitz_L': self.lipschitz_L,
            'bound_C': self.bound_C,
            'smoothing_beta': self.smoothing_beta,
            'odd': self.odd,
            'params': self.params,
        }

    @property
    def M(self) -> int:
        return self.spectrum.M

    def __call__(self, coeffs: np.ndarray) -> np.ndarray:
        return self.func(np.asarray(coeffs, dtype=float))

    def evaluate(self, u: State) -> State:
        return u.with_coeffs(self.func(u.coeffs))

    def derivative_action(self, u: State, v: State) -> State:
        if self.derivative is None:
            raise ValidationError(f'Model {self.name} has no derivative')
        return u.with_coeffs(self.derivative(u.coeffs, v.coeffs))

    def vector_field(self, coeffs: np.ndarray) -> np.ndarray:
        """-Au + F(u)"""
        return -self.spectrum.values * coeffs + self.func(coeffs)

    def with_func(self, func: ArrayFunc, **changes) -> 'NonlinearityModel':
        return NonlinearityModel(**{**self.__dict__, 'func': func, **changes})


### Simple models

def zero_model(spectrum: Spectrum) -> NonlinearityModel:
    return NonlinearityModel(
        spectrum=spectrum,
        func=lambda u: np.zeros_like(u),
        derivative=lambda u, v: np.zeros_like(v),
        lipschitz_L=0.0,
        bound_C=0.0,
        odd=True,
        name='zero',
    )


def constant_forcing(spectrum: Spectrum, c: np.ndarray) -> NonlinearityModel:
    c = np.asarray(c, dtype=float)
    if c.shape != (spectrum.M,):
        raise ValidationError(f'Forcing needs {spectrum.M} coefficients, got {c.shape}')
    return NonlinearityModel(
        spectrum=spectrum,
        func=lambda u: np.broadcast_to(c, np.shape(u)).copy(),
        derivative=lambda u, v: np.zeros_like(v),
        lipschitz_L=0.0,
        bound_C=float(np.linalg.norm(c)),
        name='constant',
        params={'forcing_norm': float(np.linalg.norm(c))},
    )


def linear_model(spectrum: Spectrum, B: np.ndarray, name: str='linear') -> NonlinearityModel:
    """F(u) = Bu; globally Lipschitz with L = |B| but unbounded (bound_C = inf)"""
    B = np.asarray(B, dtype=float)
    if B.shape != (spectrum.M, spectrum.M):
        raise ValidationError(f'Linear part must be {spectrum.M}x{spectrum.M}, got {B.shape}')
    return NonlinearityModel(
        spectrum=spectrum,
        func=lambda u: u @ B.T,
        derivative=lambda u, v: v @ B.T,
        lipschitz_L=float(np.linalg.norm(B, 2)),
        bound_C=math.inf,
        odd=True,
        name=name,
        params={'B': B},
    )


def rotation_model(spectrum: Spectrum, N: int, L: float) -> NonlinearityModel:
    """block rotation of strength L on (e_N, e_{N+1}): F_N = -L u_{N+1}, F_{N+1} = L u_N"""
    N = check_cut(spectrum, N)
    B = np.zeros((spectrum.M, spectrum.M))
    B[N - 1, N] = -L
    B[N, N - 1] = L
    return linear_model(spectrum, B, name=f'rotation(N={N},L={L:g})')


### Reaction-diffusion nonlinearities on a collocation grid

def cut_off_pointwise(f: PointwiseFunc, f_u: PointwiseFunc, radius: float):
    """f~(x,u) = chi(u/R) f(x, u) and its u-derivative; both vanish for |u| >= 2R"""

    def f_cut(x, u):
        clipped = np.clip(u, -2 * radius, 2 * radius)
        return radial_cutoff(u / radius) * f(x, clipped)

    def f_cut_u(x, u):
        clipped = np.clip(u, -2 * radius, 2 * radius)
        return (radial_cutoff_prime(u / radius) / radius * f(x, clipped)
                + radial_cutoff(u / radius) * f_u(x, clipped))

    return f_cut, f_cut_u


def _pointwise_constants(f_cut: PointwiseFunc, f_cut_u: PointwiseFunc, grid: CollocationGrid, radius: float):
    """sup |d f~/du| and sup |f~| over the grid nodes and |u| <= 2R"""
    u_samples = np.linspace(-2 * radius, 2 * radius, 2001)
    lip, bound = 0.0, 0.0
    for u_val in u_samples:
        u_grid = np.full(grid.shape, u_val)
        lip = max(lip, float(np.max(np.abs(f_cut_u(grid.x if grid.d > 1 else grid.x[0], u_grid)))))
        bound = max(bound, float(np.max(np.abs(f_cut(grid.x if grid.d > 1 else grid.x[0], u_grid)))))
    return lip, bound


def rde_nonlinearity(f: PointwiseFunc,
                     f_u: PointwiseFunc,
                     grid: CollocationGrid,
                     cutoff_radius: float=CUTOFF_RADIUS,
                     name: str='rde',
                     odd: bool=False) -> NonlinearityModel:
    """
    F(u) = -P_M f~(x, u(x)) evaluated on the collocation grid, with f cut off pointwise
    beyond |u| = cutoff_radius so that the declared global L and C hold.
    f and f_u take (x, u) where x is the grid coordinate (a tuple of arrays for d > 1).
    """
    if cutoff_radius <= 0:
        raise ValidationError(f'cutoff_radius must be positive, got {cutoff_radius}')

    f_cut, f_cut_u = cut_off_pointwise(f, f_u, cutoff_radius)
    x = grid.x if grid.d > 1 else grid.x[0]

    def func(coeffs: np.ndarray) -> np.ndarray:
        return -grid.from_grid(f_cut(x, grid.to_grid(coeffs)))

    def derivative(coeffs: np.ndarray, v: np.ndarray) -> np.ndarray:
        return -grid.from_grid(f_cut_u(x, grid.to_grid(coeffs)) * grid.to_grid(v))

    lip, bound = _pointwise_constants(f_cut, f_cut_u, grid, cutoff_radius)
    return NonlinearityModel(
        spectrum=grid.spectrum,
        func=func,
        derivative=derivative,
        lipschitz_L=LIPSCHITZ_SAFETY * lip,
        bound_C=math.sqrt(grid.volume) * bound,
        odd=odd,
        name=name,
        params={'cutoff_radius': cutoff_radius, 'grid_points': grid.P, 'kind': grid.kind},
    )


def chafee_infante_model(M: int=32, R: float=CUTOFF_RADIUS) -> NonlinearityModel:
    """reference cubic 1D model: lambda_n = n^2 + 1, f(u) = u^3 - u cut off beyond |u| = R"""
    spectrum = spectrum_interval(M, a_const=1.0, alpha=1.0)
    grid = CollocationGrid.for_spectrum(spectrum)
    model = rde_nonlinearity(
        f=lambda x, u: u ** 3 - u,
        f_u=lambda x, u: 3 * u ** 2 - 1,
        grid=grid,
        cutoff_radius=R,
        name='chafee-infante',
        odd=True,
    )
    return model


def limit_cycle_model(M: int=8, mu: float=1.0, omega: float=1.0, kappa: float=0.5, radius: float=2.0) -> NonlinearityModel:
    """
    Stuart-Landau oscillator z = u_1 + i u_2 on the first two modes (lambda = 1, 1):
    z' = (mu + i omega) z - |z|^2 z inside |z| <= radius, a slaved third mode driven
    by kappa Re(z^2), and free decay above. The attractor is the circle |z| = sqrt(mu)
    lifted to a closed curve through the third mode.
    """
    if M < 3:
        raise ValidationError(f'limit_cycle_model needs M >= 3, got M={M}')
    values = np.concatenate([[1.0, 1.0], (np.arange(3, M + 1, dtype=float)) ** 2])
    spectrum = Spectrum(values=values, source='limit-cycle')

    def planar(x, y):
        r = np.hypot(x, y)
        chi = radial_cutoff(r / radius)
        r2 = x ** 2 + y ** 2
        # F = lambda z + (mu + i omega) z - |z|^2 z, then cut off
        fx = (1.0 + mu - r2) * x - omega * y
        fy = (1.0 + mu - r2) * y + omega * x
        return chi * fx, chi * fy, chi * kappa * (x ** 2 - y ** 2)

    def func(coeffs: np.ndarray) -> np.ndarray:
        out = np.zeros_like(coeffs)
        fx, fy, f3 = planar(coeffs[..., 0], coeffs[..., 1])
        out[..., 0], out[..., 1], out[..., 2] = fx, fy, f3
        return out

    # declared constants from a dense polar scan (the field only depends on the first two modes)
    r = np.linspace(0.0, 2 * radius, 801)
    phi = np.linspace(0.0, 2 * np.pi, 97)
    R_, PHI = np.meshgrid(r, phi, indexing='ij')
    x, y = R_ * np.cos(PHI), R_ * np.sin(PHI)
    h = 1e-6
    jac = np.empty(x.shape + (3, 2))
    for col, (dx, dy) in enumerate(((h, 0.0), (0.0, h))):
        plus = np.stack(planar(x + dx, y + dy), axis=-1)
        minus = np.stack(planar(x - dx, y - dy), axis=-1)
        jac[..., col] = (plus - minus) / (2 * h)
    lip = float(np.max(np.linalg.norm(jac, ord=2, axis=(-2, -1))))
    bound = float(np.max(np.linalg.norm(np.stack(planar(x, y), axis=-1), axis=-1)))

    return NonlinearityModel(
        spectrum=spectrum,
        func=func,
        lipschitz_L=LIPSCHITZ_SAFETY * lip,
        bound_C=bound,
        odd=False,
        name='limit-cycle',
        params={'mu': mu, 'omega': omega, 'kappa': kappa, 'radius': radius},
    )


### Probes and the spatial averaging multiplier

def estimate_lipschitz(model: NonlinearityModel, samples: int=200, scale: float=1.0, seed: Optional[int]=None) -> float:
    """max of |F(u) - F(v)|_{H^beta} / |u - v|_H over random near and far pairs"""
    rng = default_rng(seed)
    M = model.M
    u = scale * rng.standard_normal((samples, M)) / math.sqrt(M)
    near = u + 1e-4 * scale * rng.standard_normal((samples, M)) / math.sqrt(M)
    far = scale * rng.standard_normal((samples, M)) / math.sqrt(M)
    ratios = []
    for v in (near, far):
        num = sobolev_norms(model(u) - model(v), model.spectrum, model.smoothing_beta)
        den = np.linalg.norm(u - v, axis=-1)
        ratios.append(num / np.maximum(den, 1e-300))
    return float(np.max(np.concatenate(ratios)))


def _average_of(f_prime: PointwiseFunc, f_vals: np.ndarray, grid: CollocationGrid) -> float:
    if grid.kind == 'interval':
        # u vanishes at both Dirichlet ends
        ends = np.asarray(f_prime(np.array([0.0, np.pi]), np.zeros(2)), dtype=float) * np.ones(2)
        return float(grid.mean(f_vals, ends=(ends[0], ends[1])))
    return float(grid.mean(f_vals))


def spatial_average_multiplier(u: State, f_prime: PointwiseFunc, grid: CollocationGrid) -> float:
    """a(u) = spatial mean of f'_u(x, u(x)), the zeroth Fourier coefficient"""
    x = grid.x if grid.d > 1 else grid.x[0]
    return _average_of(f_prime, f_prime(x, grid.to_grid(u.coeffs)), grid)


def spatial_averaging_defect(u: State, v: State, N: int, k: float, f_prime: PointwiseFunc, grid: CollocationGrid) -> float:
    """|P_{N,k}(f'(u) P_{N,k} v) - a(u) P_{N,k} v|_H over the shell P_{N,k}"""
    split = shell_projector(u.spectrum, N, k)
    if not split.shell:
        raise ValidationError(f'The shell around N={N} with k={k} is empty')
    shell = np.array(split.shell) - 1
    x = grid.x if grid.d > 1 else grid.x[0]

    v_shell = np.zeros(u.spectrum.M)
    v_shell[shell] = v.coeffs[shell]
    f_vals = f_prime(x, grid.to_grid(u.coeffs))
    product = grid.from_grid(f_vals * grid.to_grid(v_shell))
    a_u = _average_of(f_prime, f_vals, grid)
    defect = product[shell] - a_u * v_shell[shell]
    return float(np.linalg.norm(defect))


MODELS = {
    'chafee-infante': 'cubic 1D reaction-diffusion, lambda_n = n^2 + 1, f = u^3 - u with cut-off',
    'limit-cycle': 'Stuart-Landau oscillator with a slaved third mode (stable limit cycle)',
    'zero': 'F = 0 on the Chafee-Infante spectrum',
}


def build_model(name: str, modes: int=32, **params) -> NonlinearityModel:
    """look up a model by its cli name"""
    if name == 'chafee-infante':
        return chafee_infante_model(M=modes, R=params.get('cutoff_radius', CUTOFF_RADIUS))
    if name == 'limit-cycle':
        return limit_cycle_model(M=modes, **{k: v for k, v in params.items() if k in ('mu', 'omega', 'kappa', 'radius')})
    if name == 'zero':
        return zero_model(spectrum_interval(modes, 1.0, 1.0))

    from difflib import get_close_matches
    close = get_close_matches(name, MODELS.keys(), n=1)
    raise ValidationError(
        f'Unknown model: {name}',
        hints=(f'Did you mean {close[0]}?' if close else f'Available: {", ".join(MODELS)}',),
    )
