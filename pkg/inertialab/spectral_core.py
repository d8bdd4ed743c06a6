"""
Eigenbasis arithmetic for u' + Au = F(u) with A self-adjoint, positive and diagonal.

Every state is stored by its coefficients in the eigenbasis of A, truncated to the
first M modes, so all operators here are diagonal and exact to machine precision.
Indices in the public api are 1-based (mode n has eigenvalue lambda_n); arrays are
0-based internally.
"""

__package__ = 'inertialab'

from dataclasses import dataclass, fields
from typing import Optional, Tuple, Union, NamedTuple

import numpy as np

from .reports.schema import ValidationError, typechecked


ArrayLike = Union[np.ndarray, list, tuple]


def _frozen_array(values: ArrayLike, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Spectrum:
    values: np.ndarray
    labels: Optional[np.ndarray] = None
    source: str = 'custom'
    schema: str = 'Spectrum'

    def __post_init__(self):
        object.__setattr__(self, 'values', _frozen_array(self.values))
        if self.labels is not None:
            object.__setattr__(self, 'labels', _frozen_array(self.labels, dtype=int))
        typechecked(self)

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        assert self.values.ndim == 1, 'eigenvalues must be a flat sequence'
        assert self.values.size >= 2, f'need at least 2 modes, got {self.values.size}'
        assert np.all(np.isfinite(self.values)), 'eigenvalues must be finite'
        assert self.values[0] > 0, f'lambda_1 must be positive, got {self.values[0]}'
        assert np.all(np.diff(self.values) >= 0), 'eigenvalues must be nondecreasing'
        assert self.labels is None or len(self.labels) == self.values.size, 'one label per eigenvalue'
        assert isinstance(self.source, str) and self.source

    def _asdict(self):
        return {
            'schema': self.schema,
            'source': self.source,
            'values': self.values,
            'labels': self.labels,
        }

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    @property
    def M(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.M

    def eigenvalue(self, n: int) -> float:
        """lambda_n with 1-based n"""
        check_index(self, n, upper=self.M)
        return float(self.values[n - 1])

    def levels(self) -> Tuple[np.ndarray, np.ndarray]:
        """distinct eigenvalues and their multiplicities"""
        return np.unique(self.values, return_counts=True)

    def truncated(self, M: int) -> 'Spectrum':
        if not 2 <= M <= self.M:
            raise ValidationError(f'Cannot truncate a spectrum of {self.M} modes to M={M}')
        labels = None if self.labels is None else self.labels[:M]
        return Spectrum(values=self.values[:M], labels=labels, source=self.source)

    def shifted(self, alpha: float) -> 'Spectrum':
        return Spectrum(values=self.values + alpha, labels=self.labels, source=f'{self.source}+{alpha:g}')


@dataclass(frozen=True, eq=False)
class State:
    coeffs: np.ndarray
    spectrum: Spectrum
    schema: str = 'State'

    def __post_init__(self):
        object.__setattr__(self, 'coeffs', _frozen_array(self.coeffs))
        typechecked(self)

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        assert isinstance(self.spectrum, Spectrum)
        assert self.coeffs.shape == (self.spectrum.M,), \
            f'state has {self.coeffs.shape} coefficients, spectrum has {self.spectrum.M} modes'

    def _asdict(self):
        return {'schema': self.schema, 'coeffs': self.coeffs}

    @classmethod
    def zeros(cls, spectrum: Spectrum) -> 'State':
        return cls(np.zeros(spectrum.M), spectrum)

    @classmethod
    def basis(cls, spectrum: Spectrum, n: int) -> 'State':
        """the eigenvector e_n (1-based)"""
        check_index(spectrum, n, upper=spectrum.M)
        coeffs = np.zeros(spectrum.M)
        coeffs[n - 1] = 1.0
        return cls(coeffs, spectrum)

    def with_coeffs(self, coeffs: ArrayLike) -> 'State':
        return State(np.asarray(coeffs, dtype=float), self.spectrum)

    def __add__(self, other: 'State') -> 'State':
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: 'State') -> 'State':
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __neg__(self) -> 'State':
        return self.with_coeffs(-self.coeffs)

    def __mul__(self, scalar: float) -> 'State':
        return self.with_coeffs(scalar * self.coeffs)

    __rmul__ = __mul__

    def norm(self, s: float=0.0) -> float:
        return sobolev_norm(self, s)


@dataclass(frozen=True)
class ConeForm:
    """V(xi) = |Q_N xi|^2 - |P_N xi|^2; the cone K+ is {V <= 0}"""
    N: int

    def __call__(self, coeffs: np.ndarray) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        return np.sum(coeffs[..., self.N:] ** 2, axis=-1) - np.sum(coeffs[..., :self.N] ** 2, axis=-1)


class ShellSplit(NamedTuple):
    low: Tuple[int, ...]
    shell: Tuple[int, ...]
    high: Tuple[int, ...]


def check_index(spectrum: Spectrum, N: int, upper: Optional[int]=None) -> int:
    upper = spectrum.M if upper is None else upper
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or not 1 <= N <= upper:
        raise ValidationError(
            f'Mode index N={N} is out of range, expected 1 <= N <= {upper}',
            hints=(f'The spectrum ({spectrum.source}) has M={spectrum.M} modes.',),
        )
    return int(N)


def check_cut(spectrum: Spectrum, N: int) -> int:
    """a spectral cut needs both lambda_N and lambda_{N+1}"""
    return check_index(spectrum, N, upper=spectrum.M - 1)


def sobolev_norm(u: State, s: float) -> float:
    """|u|_{H^s} = (sum lambda_n^s u_n^2)^{1/2}"""
    weights = u.spectrum.values ** s
    return float(np.sqrt(np.sum(weights * u.coeffs ** 2)))


def sobolev_norms(coeffs: np.ndarray, spectrum: Spectrum, s: float=0.0) -> np.ndarray:
    """batched H^s norms over the last axis of a coefficient array"""
    weights = spectrum.values ** s
    return np.sqrt(np.sum(weights * np.asarray(coeffs) ** 2, axis=-1))


def project_low(u: State, N: int) -> State:
    N = check_index(u.spectrum, N)
    coeffs = np.array(u.coeffs)
    coeffs[N:] = 0.0
    return u.with_coeffs(coeffs)


def project_high(u: State, N: int) -> State:
    N = check_index(u.spectrum, N)
    coeffs = np.array(u.coeffs)
    coeffs[:N] = 0.0
    return u.with_coeffs(coeffs)


def shell_projector(spectrum: Spectrum, N: int, k: float) -> ShellSplit:
    """1-based index sets of the low part, the shell [lambda_N - k, lambda_{N+1} + k] and the high part"""
    N = check_cut(spectrum, N)
    lam_N, lam_N1 = spectrum.values[N - 1], spectrum.values[N]
    if not k > 0:
        raise ValidationError(f'Shell half-width k must be positive, got k={k}')
    if k >= lam_N:
        raise ValidationError(
            f'Shell half-width k={k} must be smaller than lambda_N={lam_N}',
            hints=('Pick a larger N or a thinner shell.',),
        )
    idx = np.arange(1, spectrum.M + 1)
    lam = spectrum.values
    low = idx[lam < lam_N - k]
    high = idx[lam > lam_N1 + k]
    shell = idx[(lam >= lam_N - k) & (lam <= lam_N1 + k)]
    return ShellSplit(tuple(int(i) for i in low), tuple(int(i) for i in shell), tuple(int(i) for i in high))


def cone_value(u: State, N: int) -> float:
    N = check_index(u.spectrum, N)
    return float(ConeForm(N)(u.coeffs))


def semigroup_factors(spectrum: Spectrum, t: float, shift: float=0.0) -> np.ndarray:
    """diagonal of exp(-(A - shift) t)"""
    return np.exp(-(spectrum.values - shift) * t)


def semigroup_apply(u: State, t: float) -> State:
    if t < 0:
        raise ValidationError(
            f'The semigroup exp(-At) is only defined for t >= 0, got t={t}',
            hints=('Backward in time is only available on the low modes, see dynamics.solve_saddle.',),
        )
    return u.with_coeffs(semigroup_factors(u.spectrum, t) * u.coeffs)


def split_constants(spectrum: Spectrum, N: int) -> Tuple[float, float]:
    """shift alpha = (lambda_N + lambda_{N+1})/2 and half gap theta = (lambda_{N+1} - lambda_N)/2"""
    N = check_cut(spectrum, N)
    lam_N, lam_N1 = float(spectrum.values[N - 1]), float(spectrum.values[N])
    return (lam_N + lam_N1) / 2, (lam_N1 - lam_N) / 2


def dichotomy_norms(spectrum: Spectrum, N: int, t: float) -> Tuple[float, float]:
    """
    operator norms of the shifted semigroup on each side of the cut:
    |exp(-(A-alpha)t) Q_N| for t >= 0 and |exp(-(A-alpha)t) P_N| for t <= 0
    """
    N = check_cut(spectrum, N)
    alpha, _ = split_constants(spectrum, N)
    factors = semigroup_factors(spectrum, t, shift=alpha)
    high = float(np.max(factors[N:])) if t >= 0 else float('nan')
    low = float(np.max(factors[:N])) if t <= 0 else float('nan')
    return high, low
