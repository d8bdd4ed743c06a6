__package__ = 'inertialab'

import math

from dataclasses import dataclass, asdict, fields
from typing import List, Optional, Tuple, Callable

import numpy as np
from scipy.spatial.distance import pdist

from .spectral_core import Spectrum, check_cut, split_constants
from .reports.schema import ValidationError, CheckResult, typechecked
from .models.spectra import lattice_points
from .models.nonlinearity import smooth_step, smooth_step_prime
from .util import default_rng


@dataclass(frozen=True)
class GapReport:
    N: int
    lambda_N: float
    lambda_N1: float
    gap: float
    theta: float
    alpha: float
    L: float
    beta: float
    ratio: float
    threshold: float
    holds: bool
    boundary: bool
    condition: str = 'gap'
    k: Optional[int] = None
    schema: str = 'GapReport'

    def __post_init__(self):
        typechecked(self)

    def _asdict(self):
        return asdict(self)

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        assert isinstance(self.N, int) and self.N >= 1
        assert self.lambda_N1 >= self.lambda_N
        assert self.gap <= 0 or self.theta > 0, 'theta must be positive whenever the gap is'
        assert self.condition in ('gap', 'beta', 'ck')
        assert isinstance(self.holds, bool) and isinstance(self.boundary, bool)

    def to_csv(self, cols: Optional[List[str]]=None, separator: str=',', ljust: int=0) -> str:
        from .reports.csv import to_csv

        return to_csv(self, cols=cols or self.field_names(), separator=separator, ljust=ljust)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


GAP_CSV_COLS = ['N', 'lambda_N', 'lambda_N1', 'gap', 'theta', 'alpha', 'ratio', 'threshold', 'holds', 'boundary']


def _check_beta(beta: float) -> float:
    if not -2 < beta <= 0:
        raise ValidationError(
            f'Smoothing index beta={beta} is out of range, expected -2 < beta <= 0',
            hints=('beta = 0 means F maps H to H, beta = -1 loses one derivative.',),
        )
    return float(beta)


def _pair(spectrum: Spectrum, N: int) -> Tuple[int, float, float]:
    N = check_cut(spectrum, N)
    return N, float(spectrum.values[N - 1]), float(spectrum.values[N])


def gap_condition(spectrum: Spectrum, N: int, L: float) -> Tuple[bool, GapReport]:
    """lambda_{N+1} - lambda_N > 2L"""
    N, lam_N, lam_N1 = _pair(spectrum, N)
    alpha, theta = split_constants(spectrum, N)
    gap = lam_N1 - lam_N
    holds = bool(gap > 2 * L)
    report = GapReport(
        N=N, lambda_N=lam_N, lambda_N1=lam_N1, gap=gap, theta=theta, alpha=alpha,
        L=float(L), beta=0.0, ratio=gap, threshold=2 * L, holds=holds,
        boundary=bool(gap == 2 * L), condition='gap',
    )
    return holds, report


def shifted_alpha(lam_N: float, lam_N1: float, beta: float) -> float:
    """the exponent in (lambda_N, lambda_{N+1}) balancing the two weights lambda^{-beta}/(lambda - alpha)^2"""
    if beta == 0:
        return (lam_N + lam_N1) / 2
    a_N, a_N1 = lam_N ** (-beta / 2), lam_N1 ** (-beta / 2)
    return lam_N1 * a_N / (a_N + a_N1) + lam_N * a_N1 / (a_N + a_N1)


def gap_condition_beta(spectrum: Spectrum, N: int, L: float, beta: float) -> Tuple[bool, GapReport]:
    """(lambda_{N+1} - lambda_N) / (lambda_{N+1}^{-beta/2} + lambda_N^{-beta/2}) > L"""
    beta = _check_beta(beta)
    N, lam_N, lam_N1 = _pair(spectrum, N)
    gap = lam_N1 - lam_N
    ratio = gap / (lam_N1 ** (-beta / 2) + lam_N ** (-beta / 2))
    holds = bool(ratio > L)
    report = GapReport(
        N=N, lambda_N=lam_N, lambda_N1=lam_N1, gap=gap, theta=gap / 2,
        alpha=shifted_alpha(lam_N, lam_N1, beta), L=float(L), beta=beta,
        ratio=ratio, threshold=float(L), holds=holds, boundary=bool(ratio == L), condition='beta',
    )
    return holds, report


def gap_condition_ck(spectrum: Spectrum, N: int, k: int, L: float, beta: float=0.0) -> bool:
    """C^k smoothness: lambda_{N+1} - k lambda_N > sqrt(2) L (lambda_{N+1}^{-beta/2} + k lambda_N^{-beta/2})"""
    if k < 1 or int(k) != k:
        raise ValidationError(f'Smoothness order k must be a positive integer, got k={k}')
    beta = _check_beta(beta)
    N, lam_N, lam_N1 = _pair(spectrum, N)
    lhs = lam_N1 - k * lam_N
    rhs = math.sqrt(2) * L * (lam_N1 ** (-beta / 2) + k * lam_N ** (-beta / 2))
    return bool(lhs > rhs)


def level_cuts(spectrum: Spectrum) -> np.ndarray:
    """cut indices N that fall between distinct eigenvalues (last index of each level but the top one)"""
    _, counts = spectrum.levels()
    return np.cumsum(counts)[:-1]


def find_gaps(spectrum: Spectrum, L: float, beta: float=0.0, count: Optional[int]=None) -> List[GapReport]:
    """every distinct-level cut satisfying the (beta-)gap condition, in increasing N, at most count of them"""
    _check_beta(beta)
    found = []
    for N in level_cuts(spectrum):
        holds, report = gap_condition_beta(spectrum, int(N), L, beta) if beta else gap_condition(spectrum, int(N), L)
        if holds:
            found.append(report)
            if count is not None and len(found) >= count:
                break
    return found


def find_gaps_ck(spectrum: Spectrum, k: int, L: float, beta: float=0.0, count: Optional[int]=None) -> List[int]:
    found = []
    for N in level_cuts(spectrum):
        if gap_condition_ck(spectrum, int(N), k, L, beta):
            found.append(int(N))
            if count is not None and len(found) >= count:
                break
    return found


def level_gaps(spectrum: Spectrum) -> Tuple[np.ndarray, np.ndarray]:
    """distinct levels and the gap from each level to the next one"""
    levels, _ = spectrum.levels()
    return levels[:-1], np.diff(levels)


def max_gap_table(spectrum: Spectrum, bounds: Optional[List[float]]=None) -> List[Tuple[float, float, float]]:
    """rows (bound, largest gap between levels <= bound, level where it opens)"""
    levels, gaps = level_gaps(spectrum)
    if bounds is None:
        top = float(levels[-1]) if levels.size else 1.0
        bounds = [b for b in np.geomspace(10, max(top, 10), num=max(int(np.log10(max(top, 10))), 1) + 1)]
    rows = []
    for bound in bounds:
        inside = (levels + gaps) <= bound
        if not inside.any():
            rows.append((float(bound), 0.0, float('nan')))
            continue
        idx = int(np.argmax(np.where(inside, gaps, -np.inf)))
        rows.append((float(bound), float(gaps[idx]), float(levels[idx])))
    return rows


def weight_profile(x: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """x^{-beta} / (x - alpha)^2"""
    x = np.asarray(x, dtype=float)
    return x ** (-beta) / (x - alpha) ** 2


def weight_balance(spectrum: Spectrum, N: int, beta: float) -> Tuple[float, float]:
    """the weight profile at lambda_N and lambda_{N+1}, equal for the balanced alpha"""
    beta = _check_beta(beta)
    N, lam_N, lam_N1 = _pair(spectrum, N)
    alpha = shifted_alpha(lam_N, lam_N1, beta)
    return float(weight_profile(lam_N, alpha, beta)), float(weight_profile(lam_N1, alpha, beta))


### Lattice shells for the 3D torus

def _lattice_keys(points: np.ndarray, base: int) -> np.ndarray:
    points = points.astype(np.int64)
    return (points[:, 0] * base + points[:, 1]) * base + points[:, 2]


def _ball_vectors(rho: float) -> np.ndarray:
    """nonzero lattice vectors with |d| <= rho, one of each +-d pair"""
    r2 = int(math.floor(rho * rho + 1e-9))
    vectors = lattice_points(r2, 3)[1:]
    first_nonzero = np.argmax(vectors != 0, axis=1)
    positive = vectors[np.arange(len(vectors)), first_nonzero] > 0
    return vectors[positive]


def shell_search(k: float, rho: float, N_max: int) -> List[int]:
    """
    all N <= N_max whose shell C = {p in Z^3 : N + 1/2 - k <= |p|^2 <= N + 1/2 + k}
    is nonempty and has no two distinct points at distance <= rho.
    Every close pair (p, q) rules out the whole range of N whose shell holds both,
    so one sweep over the lattice ball decides all N at once.
    """
    if not (k > 0 and rho > 0):
        raise ValidationError(f'shell_search needs k > 0 and rho > 0, got k={k}, rho={rho}')
    top = int(math.floor(N_max + 0.5 + k))
    points = lattice_points(top, 3)
    norms = np.sum(points ** 2, axis=1)
    base = 2 * (math.isqrt(top) + int(math.ceil(rho)) + 1) + 1
    keys = _lattice_keys(points, base)
    order = np.argsort(keys)
    sorted_keys = keys[order]

    killed = np.zeros(N_max + 2, dtype=np.int64)
    for d in _ball_vectors(rho):
        shifted = keys + _lattice_keys(d[None, :], base)[0]
        pos = np.clip(np.searchsorted(sorted_keys, shifted), 0, len(sorted_keys) - 1)
        present = sorted_keys[pos] == shifted
        n1 = norms[present]
        n2 = norms[order[pos[present]]]
        lo = np.ceil(np.maximum(n1, n2) - k - 0.5).astype(np.int64)
        hi = np.floor(np.minimum(n1, n2) + k - 0.5).astype(np.int64)
        lo, hi = np.clip(lo, 1, N_max + 1), np.clip(hi, 0, N_max)
        valid = lo <= hi
        np.add.at(killed, lo[valid], 1)
        np.add.at(killed, hi[valid] + 1, -1)
    killed = np.cumsum(killed)

    # the shell must contain a lattice point at all
    occupied = np.zeros(top + 1, dtype=bool)
    occupied[norms] = True
    occupied_prefix = np.concatenate([[0], np.cumsum(occupied)])

    qualifying = []
    for N in range(1, N_max + 1):
        m_lo = max(int(math.ceil(N + 0.5 - k)), 0)
        m_hi = min(int(math.floor(N + 0.5 + k)), top)
        nonempty = m_hi >= m_lo and occupied_prefix[m_hi + 1] - occupied_prefix[m_lo] > 0
        if nonempty and killed[N] == 0:
            qualifying.append(N)
    return qualifying


def shell_points(k: float, N: int) -> np.ndarray:
    top = int(math.floor(N + 0.5 + k))
    points = lattice_points(top, 3)
    norms = np.sum(points ** 2, axis=1)
    return points[(norms >= N + 0.5 - k) & (norms <= N + 0.5 + k)]


def verify_shell_pairwise(k: float, rho: float, N: int) -> bool:
    """independent check of one N: all pairwise distances in the shell exceed rho"""
    points = shell_points(k, N)
    if len(points) == 0:
        return False
    if len(points) == 1:
        return True
    return bool(np.min(pdist(points.astype(float), 'sqeuclidean')) > rho * rho)


### Spatial averaging

def spatial_averaging_constants(theta: float, L: float, k: float, delta: float, alpha: float) -> bool:
    """2L^2/(k - 4L) + delta < theta/2 and alpha - 2L > 0"""
    if k <= 4 * L:
        raise ValidationError(
            f'Shell half-width k={k} must exceed 4L={4 * L}',
            hints=('Widen the shell or reduce the Lipschitz constant.',),
        )
    return bool(2 * L ** 2 / (k - 4 * L) + delta < theta / 2 and alpha - 2 * L > 0)


def averaging_cutoff(R_star: float, R1: Optional[float]=None) -> Tuple[Callable, Callable]:
    """
    phi(eta) and phi'(eta) with phi = 1 for eta <= (2 R_star)^{1/2}, phi = 1/2 for
    eta >= R1^{1/2}, phi' <= 0 and phi/2 + eta phi' > 0 everywhere
    """
    R1 = 1024 * R_star if R1 is None else R1
    if not (R_star > 0 and R1 > 512 * R_star):
        raise ValidationError(
            f'averaging_cutoff needs R_star > 0 and R1 > 512 R_star, got R_star={R_star}, R1={R1}',
            hints=('The log-scale transition must span a factor 16 for phi/2 + eta phi\' > 0.',),
        )
    a, b = math.sqrt(2 * R_star), math.sqrt(R1)
    log_span = math.log(b / a)

    def phi(eta):
        eta = np.asarray(eta, dtype=float)
        s = np.log(np.maximum(eta, 1e-300) / a) / log_span
        return np.exp(-math.log(2) * smooth_step(s))

    def phi_prime(eta):
        eta = np.asarray(eta, dtype=float)
        s = np.log(np.maximum(eta, 1e-300) / a) / log_span
        return phi(eta) * (-math.log(2)) * smooth_step_prime(s) / (np.maximum(eta, 1e-300) * log_span)

    return phi, phi_prime


def check_averaging_cutoff(R_star: float, R1: Optional[float]=None, samples: int=4001) -> List[CheckResult]:
    R1 = 1024 * R_star if R1 is None else R1
    phi, phi_prime = averaging_cutoff(R_star, R1)
    a, b = math.sqrt(2 * R_star), math.sqrt(R1)
    eta = np.geomspace(a / 10, b * 10, samples)
    values, slopes = phi(eta), phi_prime(eta)
    return [
        CheckResult.compare('cutoff equals 1 below (2R*)^1/2', float(np.max(np.abs(values[eta <= a] - 1))), '<=', 1e-15),
        CheckResult.compare('cutoff equals 1/2 above R1^1/2', float(np.max(np.abs(values[eta >= b] - 0.5))), '<=', 1e-15),
        CheckResult.compare('cutoff is nonincreasing', float(np.max(slopes)), '<=', 0.0),
        CheckResult.compare('phi/2 + eta phi\' stays positive', float(np.min(values / 2 + eta * slopes)), '>', 0.0),
    ]


def cauchy_schwarz_check(dim: int=16, samples: int=1000, seed: Optional[int]=None) -> CheckResult:
    """2(v,y)(w,y) >= |y|^2 ((v,w) - |v||w|) on random triples"""
    rng = default_rng(seed)
    v, w, y = (rng.standard_normal((samples, dim)) for _ in range(3))
    lhs = 2 * np.sum(v * y, axis=1) * np.sum(w * y, axis=1)
    rhs = np.sum(y * y, axis=1) * (np.sum(v * w, axis=1) - np.linalg.norm(v, axis=1) * np.linalg.norm(w, axis=1))
    scale = np.sum(y * y, axis=1) * np.linalg.norm(v, axis=1) * np.linalg.norm(w, axis=1)
    return CheckResult.compare('polarised Cauchy-Schwarz', float(np.min((lhs - rhs) / scale)), '>=', -1e-12)


def cutoff_monotonicity_check(spectrum: Spectrum, N: int, R_star: float, R1: Optional[float]=None,
                              samples: int=500, seed: Optional[int]=None) -> CheckResult:
    """
    for T(u) = phi(|A P_N u|^2) A P_N u check
    (T'(u)v, v) <= 1/2 lambda_N |P_N v|^2 + 1/2 (A P_N v, P_N v) on random u, v
    """
    N = check_cut(spectrum, N)
    phi, phi_prime = averaging_cutoff(R_star, R1)
    R1 = 1024 * R_star if R1 is None else R1
    rng = default_rng(seed)
    lam = spectrum.values[:N]

    directions = rng.standard_normal((samples, N))
    directions /= np.linalg.norm(lam * directions, axis=1, keepdims=True)
    # spread eta = |A u+|^2 across the whole transition
    eta_target = np.geomspace(math.sqrt(2 * R_star) / 4, math.sqrt(R1) * 4, samples)
    u = directions * np.sqrt(eta_target)[:, None]
    v = rng.standard_normal((samples, N))

    Au, Av = lam * u, lam * v
    eta = np.sum(Au * Au, axis=1)
    lhs = (2 * phi_prime(eta) * np.sum(Au * Av, axis=1) * np.sum(Au * v, axis=1)
           + phi(eta) * np.sum(Av * v, axis=1))
    rhs = 0.5 * lam[-1] * np.sum(v * v, axis=1) + 0.5 * np.sum(Av * v, axis=1)
    worst = float(np.max((lhs - rhs) / rhs))
    return CheckResult.compare('cut-off monotonicity bound', worst, '<=', 1e-12,
                               detail=f'worst relative excess over {samples} samples')
