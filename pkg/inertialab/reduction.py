__package__ = 'inertialab'

import math

from dataclasses import dataclass, fields
from typing import List, Optional, Sequence, Tuple, Union, Dict

import numpy as np
from scipy import stats
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .spectral_core import Spectrum
from .reports.schema import ValidationError, typechecked
from .reports.csv import columns_to_csv
from .util import default_rng, geometric_ints
from .config import SATURATION_RATIO, DIMENSION_FIT_DECADES


@dataclass(frozen=True, eq=False)
class PointCloud:
    """finite sample of a set in H^s; points are eigen-coefficient vectors"""
    points: np.ndarray
    s: float = 0.0
    spectrum: Optional[Spectrum] = None
    schema: str = 'PointCloud'

    def __post_init__(self):
        object.__setattr__(self, 'points', np.atleast_2d(np.asarray(self.points, dtype=float)))
        typechecked(self)

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        assert self.points.ndim == 2 and self.points.shape[0] >= 1, 'cloud must be nonempty'
        assert np.all(np.isfinite(self.points)), 'cloud points must be finite'
        assert self.s == 0 or self.spectrum is not None, 'an H^s norm with s != 0 needs the spectrum'
        assert self.spectrum is None or self.spectrum.M == self.points.shape[1]

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def embedded(self) -> np.ndarray:
        """coordinates in which the euclidean norm is the H^s norm"""
        if self.s == 0:
            return self.points
        return self.points * self.spectrum.values ** (self.s / 2)


Cloud = Union[PointCloud, np.ndarray]


def _coords(cloud: Cloud) -> np.ndarray:
    if isinstance(cloud, PointCloud):
        return cloud.embedded()
    return PointCloud(points=cloud).points


### Fractal (box-counting) dimension

@dataclass(frozen=True)
class DimensionEstimate:
    dim: float
    r2: float
    method: str
    eps: Tuple[float, ...]
    counts: Tuple[int, ...]
    fit_mask: Tuple[bool, ...]
    schema: str = 'DimensionEstimate'

    def _asdict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_csv(self) -> str:
        return columns_to_csv({'eps': self.eps, 'count': self.counts, 'fit': self.fit_mask})


def grid_counts(points: np.ndarray, eps: float) -> int:
    """occupied cubes of side eps, anchored at the coordinatewise minimum"""
    lo = points.min(axis=0)
    extent = points.max(axis=0) - lo
    cells = np.floor((points - lo) / eps).astype(np.int64)
    # points on the far face belong to the last cube
    cells = np.minimum(cells, np.maximum(np.ceil(extent / eps - 1e-9).astype(np.int64) - 1, 0))
    return int(np.unique(cells, axis=0).shape[0])


def net_counts(points: np.ndarray, eps: float, tree: Optional[cKDTree]=None) -> int:
    """size of the greedy (first-fit) eps-net"""
    return len(greedy_net(points, eps, tree))


def greedy_net(points: np.ndarray, eps: float, tree: Optional[cKDTree]=None) -> List[int]:
    """indices of centers covering every point within eps, visited in cloud order"""
    tree = tree or cKDTree(points)
    covered = np.zeros(len(points), dtype=bool)
    centers = []
    for i in range(len(points)):
        if covered[i]:
            continue
        centers.append(i)
        covered[tree.query_ball_point(points[i], eps * (1 + 1e-12))] = True
    return centers


def box_counting_dim(cloud: Cloud, eps_range: Optional[Sequence[float]]=None, method: str='grid',
                     n_eps: int=40) -> DimensionEstimate:
    """
    slope of log N_eps against log(1/eps). Counts above n/SATURATION_RATIO are dropped
    (the cloud is resolved point by point there) and the fit uses the smallest remaining
    scales over DIMENSION_FIT_DECADES decades.
    """
    points = _coords(cloud)
    n = len(points)
    extent = float(np.max(points.max(axis=0) - points.min(axis=0)))
    if extent == 0:
        return DimensionEstimate(dim=0.0, r2=1.0, method=method, eps=(0.0,), counts=(1,), fit_mask=(True,))

    if eps_range is None:
        eps = extent / geometric_ints(1, max(n, 2), n_eps)
    else:
        eps = np.sort(np.asarray(eps_range, dtype=float))[::-1]
        if eps.size < 3 or np.any(eps <= 0) or math.log10(eps[0] / eps[-1]) < DIMENSION_FIT_DECADES:
            raise ValidationError(
                f'Degenerate eps range, need at least 3 positive values spanning {DIMENSION_FIT_DECADES} decades',
                hints=(f'Got {eps.size} values from {eps.min():.3g} to {eps.max():.3g}.',),
            )

    if method == 'grid':
        counts = np.array([grid_counts(points, e) for e in eps])
    elif method == 'net':
        tree = cKDTree(points)
        counts = np.array([net_counts(points, e, tree) for e in eps])
    else:
        raise ValidationError(f'Unknown box counting method: {method}', hints=('Use grid or net.',))

    valid = (counts <= n / SATURATION_RATIO) & (counts >= 1)
    if not valid.any():
        raise ValidationError(f'Every scale is saturated for a cloud of {n} points', hints=('Sample more points.',))
    eps_floor = float(np.min(eps[valid]))
    fit = valid & (eps <= eps_floor * 10 ** DIMENSION_FIT_DECADES)
    if np.count_nonzero(fit) < 3 or len(np.unique(eps[fit])) < 3:
        raise ValidationError(
            f'Only {np.count_nonzero(fit)} usable scales for the dimension fit',
            hints=('Sample more points or pass a wider eps range.',),
        )
    result = stats.linregress(np.log(1 / eps[fit]), np.log(counts[fit]))
    return DimensionEstimate(
        dim=float(result.slope), r2=float(result.rvalue ** 2), method=method,
        eps=tuple(map(float, eps)), counts=tuple(map(int, counts)), fit_mask=tuple(map(bool, fit)),
    )


### Doubling factors

def doubling_factor(cloud: Cloud, eps: float, centers: Optional[Sequence[int]]=None) -> int:
    """D_eps = max over centers x of the greedy eps/2-net size of cloud within eps of x"""
    if not eps > 0:
        raise ValidationError(f'eps must be positive, got {eps}')
    points = _coords(cloud)
    tree = cKDTree(points)
    best = 0
    for i in (range(len(points)) if centers is None else centers):
        ball = np.array(tree.query_ball_point(points[i], eps * (1 + 1e-12)), dtype=int)
        if len(ball) <= best:
            continue
        best = max(best, len(greedy_net(points[np.sort(ball)], eps / 2)))
    return best


def log_doubling_factor(cloud: Cloud, eps_range: Sequence[float]) -> float:
    """max of log D_eps / log log(1/eps) over the scales with eps <= e^{-e}"""
    eps = np.asarray(eps_range, dtype=float)
    eps = eps[(eps > 0) & (eps <= math.exp(-math.e))]
    if not eps.size:
        raise ValidationError('log doubling needs scales eps <= e^{-e}')
    return max(math.log(max(doubling_factor(cloud, e), 1)) / math.log(math.log(1 / e)) for e in eps)


def separated_count(cloud: Cloud, center: int, radius: float, sep: float) -> int:
    """greedy count of points within radius of cloud[center] that are pairwise at least sep apart"""
    points = _coords(cloud)
    tree = cKDTree(points)
    ball = points[np.sort(tree.query_ball_point(points[center], radius * (1 + 1e-12)))]
    chosen: List[np.ndarray] = []
    for x in ball:
        if all(np.linalg.norm(x - y) >= sep * (1 - 1e-9) for y in chosen):
            chosen.append(x)
    return len(chosen)


### Synthetic sets

EPS_RULES = {
    'power2': 'eps_n = n^-2',
    'loglog': 'eps_n = exp(-(log n)^2)',
    'gauss': 'eps_n = exp(-beta n^2)',
}


def eps_sequence(rule: str, n_max: int, beta: float=1.0) -> np.ndarray:
    n = np.arange(1, n_max + 1, dtype=float)
    if rule == 'power2':
        return n ** -2.0
    if rule == 'loglog':
        return np.exp(-np.log(n) ** 2)
    if rule == 'gauss':
        return np.exp(-beta * n ** 2)
    raise ValidationError(f'Unknown eps rule: {rule}', hints=(f'Available: {", ".join(EPS_RULES)}',))


def _check_eps(eps: np.ndarray) -> np.ndarray:
    eps = np.asarray(eps, dtype=float)
    if np.any(eps <= 0) or np.any(np.diff(eps) > 0):
        raise ValidationError('eps sequence must be positive and nonincreasing')
    return eps


def orthogonal_segments_set(eps: Sequence[float], pts_per_seg: int=20) -> np.ndarray:
    """
    union over n of the segments {s e_n : 0 <= s <= eps_n} in R^{n_max}; every segment also
    carries the points s = eps_m for m >= n, so the balls around 0 see the exact endpoints
    """
    eps = _check_eps(eps)
    n_max = eps.size
    rows = [np.zeros(n_max)]
    for k in range(n_max):
        params = np.union1d(np.linspace(0.0, eps[k], pts_per_seg)[1:], eps[k:])
        seg = np.zeros((params.size, n_max))
        seg[:, k] = params
        rows.extend(seg)
    return np.unique(np.array(rows), axis=0)


def cube_vertices_set(eps: Sequence[float], n_list: Sequence[int]) -> np.ndarray:
    """vertices of eps_n {0,1}^n for each n in n_list, each cube in its own block of coordinates, all sharing 0"""
    eps = _check_eps(eps)
    dims = sum(n_list)
    rows = [np.zeros(dims)]
    offset = 0
    for n in n_list:
        if n > eps.size:
            raise ValidationError(f'No eps value for cube dimension {n}')
        corners = np.array(np.meshgrid(*([[0.0, 1.0]] * n), indexing='ij')).reshape(n, -1).T
        block = np.zeros((corners.shape[0], dims))
        block[:, offset:offset + n] = eps[n - 1] * corners
        rows.extend(block[1:])
        offset += n
    return np.array(rows)


def log_doubling_lower_bound(rule: str, n_values: Sequence[int], beta: float=1.0) -> np.ndarray:
    """log n / log log(1/eps_n), the growth of D_{eps_n} >= n on the log-doubling scale"""
    n_values = np.asarray(n_values, dtype=int)
    eps = eps_sequence(rule, int(n_values.max()), beta)[n_values - 1]
    out = np.full(n_values.shape, np.nan)
    usable = eps <= math.exp(-math.e)
    out[usable] = np.log(n_values[usable]) / np.log(np.log(1 / eps[usable]))
    return out


def cube_growth_ratio(n: Sequence[int], beta: float=1.0) -> np.ndarray:
    """n / (log n * log log(1/eps_n)) for eps_n = e^{-beta n^2}"""
    n = np.asarray(n, dtype=float)
    return n / (np.log(n) * (2 * np.log(n) + math.log(beta)))


### Random projections

def random_projector(M: int, N: int, seed: Optional[int]=None) -> np.ndarray:
    """(N, M) matrix with orthonormal rows from the QR of a gaussian matrix"""
    if not 1 <= N <= M:
        raise ValidationError(f'Projector target dimension must satisfy 1 <= N <= M, got N={N}, M={M}')
    rng = default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((M, N)))
    # fix the column signs so the factorization is unique
    q = q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))
    return q.T


@dataclass(frozen=True, eq=False)
class ProjectionExperiment:
    N: int
    projector: np.ndarray
    seed: int
    margin: float
    holder_exponent: float
    holder_constant: float
    holder_r2: float
    schema: str = 'ProjectionExperiment'

    def __post_init__(self):
        typechecked(self)

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        gram = self.projector @ self.projector.T
        assert np.allclose(gram, np.eye(self.N), atol=1e-12), 'projector rows must be orthonormal'

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    @property
    def injective(self) -> bool:
        return self.margin > 0

    def _asdict(self):
        return {
            'schema': self.schema,
            'N': self.N,
            'seed': self.seed,
            'margin': self.margin,
            'injective': self.injective,
            'holder_exponent': self.holder_exponent,
            'holder_constant': self.holder_constant,
            'holder_r2': self.holder_r2,
        }


def _pair_distances(points: np.ndarray, projector: np.ndarray, max_points: int=2000, seed: Optional[int]=None):
    if len(points) > max_points:
        points = points[default_rng(seed).choice(len(points), max_points, replace=False)]
    full = pdist(points)
    projected = pdist(points @ projector.T)
    distinct = full > 0
    return full[distinct], projected[distinct]


def holder_fit(full: np.ndarray, projected: np.ndarray, bins: int=20) -> Tuple[float, float, float]:
    """
    fit |x - y| <= C |P(x - y)|^theta on the upper envelope of the pairs closer than the
    median distance: log |x - y| is maxed per log-bin of |P(x - y)| and regressed
    """
    close = full <= np.median(full)
    full, projected = full[close], projected[close]
    positive = projected > 0
    return _envelope_fit(np.log(projected[positive]), np.log(full[positive]), bins)


def _envelope_fit(x: np.ndarray, y: np.ndarray, bins: int=20) -> Tuple[float, float, float]:
    """slope, exp(intercept) and r^2 of the regression through the per-bin maxima of y"""
    if x.size < 3:
        return math.nan, math.inf, math.nan
    edges = np.linspace(x.min(), x.max(), bins + 1)
    which = np.clip(np.digitize(x, edges) - 1, 0, bins - 1)
    env_x, env_y = [], []
    for b in range(bins):
        members = which == b
        if members.any():
            top = np.argmax(np.where(members, y, -np.inf))
            env_x.append(x[top])
            env_y.append(y[top])
    if len(env_x) < 3 or np.ptp(env_x) == 0:
        return math.nan, math.inf, math.nan
    result = stats.linregress(env_x, env_y)
    return float(result.slope), float(math.exp(result.intercept)), float(result.rvalue ** 2)


def mane_experiment(cloud: Cloud, N: int, n_seeds: int=10, seed: Optional[int]=None,
                    projector: Optional[np.ndarray]=None) -> List[ProjectionExperiment]:
    """
    per seed: a random rank-N projector, its injectivity margin min |P(x-y)|/|x-y| over the
    cloud and a fitted Hölder exponent of the inverse; a fixed projector runs once
    """
    points = _coords(cloud)
    base = default_rng(seed).integers(0, 2 ** 63 - 1) if seed is None else seed
    experiments = []
    seeds = [int(base)] if projector is not None else [int(base) + i for i in range(n_seeds)]
    for s in seeds:
        P = projector if projector is not None else random_projector(points.shape[1], N, s)
        full, projected = _pair_distances(points, P, seed=s)
        margin = float(np.min(projected / full)) if full.size else 1.0
        exponent, constant, r2 = holder_fit(full, projected)
        experiments.append(ProjectionExperiment(
            N=int(P.shape[0]), projector=P, seed=s, margin=margin,
            holder_exponent=exponent, holder_constant=constant, holder_r2=r2,
        ))
    return experiments


def injective_fraction(experiments: Sequence[ProjectionExperiment]) -> float:
    return sum(e.injective for e in experiments) / len(experiments) if experiments else 0.0


def log_lipschitz_fit(cloud: Cloud, projector: np.ndarray) -> Tuple[float, float, float]:
    """
    fitted exponent a in |x - y| <= C |P(x-y)| log^a(1/|P(x-y)|), from the upper envelope of
    log(|x-y|/|P(x-y)|) against log log(1/|P(x-y)|) over pairs with |P(x-y)| < 1/e
    """
    full, projected = _pair_distances(_coords(cloud), projector)
    small = (projected > 0) & (projected < math.exp(-1))
    if np.count_nonzero(small) < 3:
        return math.nan, math.inf, math.nan
    loglog = np.log(np.log(1 / projected[small]))
    return _envelope_fit(loglog, np.log(full[small] / projected[small]))


### Romanov bi-Lipschitz evidence

@dataclass(frozen=True)
class RomanovReport:
    ratio_min: float
    ratio_max: float
    pairs: int
    qualifying_N: Dict[float, Optional[int]]
    schema: str = 'RomanovReport'

    def _asdict(self):
        return {
            'schema': self.schema,
            'ratio_min': self.ratio_min,
            'ratio_max': self.ratio_max,
            'pairs': self.pairs,
            'qualifying_N': {str(L): N for L, N in self.qualifying_N.items()},
        }


def romanov_check(cloud: Cloud, spectrum: Spectrum, L_candidates: Sequence[float],
                  N_range: Optional[Sequence[int]]=None, max_pairs: int=200000,
                  seed: Optional[int]=None) -> RomanovReport:
    """
    band of |x-y|_{H^2} / |x-y|_H over pairs and, per L, the smallest N with
    |Q_N(x-y)| <= L |P_N(x-y)| for every pair (None when no tested N works)
    """
    points = np.atleast_2d(np.asarray(getattr(cloud, 'points', cloud), dtype=float))
    if points.shape[1] != spectrum.M:
        raise ValidationError(f'Cloud has {points.shape[1]} coordinates, spectrum has {spectrum.M} modes')
    n = len(points)
    i, j = np.triu_indices(n, k=1)
    if i.size > max_pairs:
        pick = default_rng(seed).choice(i.size, max_pairs, replace=False)
        i, j = i[pick], j[pick]
    diff = points[i] - points[j]
    norm_h = np.linalg.norm(diff, axis=1)
    diff, norm_h = diff[norm_h > 0], norm_h[norm_h > 0]
    if not norm_h.size:
        raise ValidationError('Need at least two distinct points')
    ratio = np.sqrt(np.sum(spectrum.values ** 2 * diff ** 2, axis=1)) / norm_h

    N_range = list(range(1, spectrum.M)) if N_range is None else list(N_range)
    low_sq = np.cumsum(diff ** 2, axis=1)
    total_sq = low_sq[:, -1]
    qualifying: Dict[float, Optional[int]] = {}
    for L in L_candidates:
        qualifying[float(L)] = None
        for N in N_range:
            low, high = low_sq[:, N - 1], total_sq - low_sq[:, N - 1]
            if np.all(np.sqrt(np.maximum(high, 0)) <= L * np.sqrt(low) * (1 + 1e-12) + 1e-300):
                qualifying[float(L)] = int(N)
                break
    return RomanovReport(ratio_min=float(ratio.min()), ratio_max=float(ratio.max()),
                         pairs=int(norm_h.size), qualifying_N=qualifying)
