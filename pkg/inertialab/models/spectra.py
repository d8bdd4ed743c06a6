__package__ = 'inertialab.models'

import math

from typing import Optional

import numpy as np

from ..spectral_core import Spectrum
from ..reports.schema import ValidationError
from ..reports.csv import columns_to_csv
from ..config import TORUS_LABEL_LIMIT


### Number theory oracles

def primes_up_to(n: int) -> np.ndarray:
    """sieve of eratosthenes"""
    if n < 2:
        return np.array([], dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


def is_sum_of_two_squares_mask(n_max: int) -> np.ndarray:
    """
    mask[n] is True iff n = a^2 + b^2, by the prime criterion:
    every prime p = 3 mod 4 divides n to an even power
    """
    mask = np.ones(n_max + 1, dtype=bool)
    for p in primes_up_to(n_max):
        if p % 4 != 3:
            continue
        if p * p > n_max:
            # valuation is 0 or 1
            mask[p::p] = False
            continue
        valuation = np.zeros(n_max + 1, dtype=np.int8)
        pk = int(p)
        while pk <= n_max:
            valuation[::pk] += 1
            pk *= int(p)
        mask &= (valuation % 2 == 0)
    mask[0] = True
    return mask


def is_sum_of_three_squares_mask(n_max: int) -> np.ndarray:
    """mask[n] is True iff n is not of the form 4^a (8b + 7)"""
    m = np.arange(n_max + 1, dtype=np.int64)
    m[0] = 1
    while True:
        divisible = (m % 4 == 0)
        if not divisible.any():
            break
        m[divisible] //= 4
    mask = (m % 8 != 7)
    mask[0] = True
    return mask


def lattice_counts(n_max: int, d: int) -> np.ndarray:
    """r_d(n): number of integer points p in Z^d with |p|^2 = n, for n <= n_max"""
    if d < 1:
        raise ValidationError(f'Lattice dimension must be positive, got d={d}')
    squares = np.arange(math.isqrt(n_max) + 1) ** 2
    counts = np.zeros(n_max + 1, dtype=np.int64)
    counts[0] = 1
    for _ in range(d):
        nxt = np.zeros_like(counts)
        for j, sq in enumerate(squares):
            weight = 1 if j == 0 else 2
            nxt[sq:] += weight * counts[:n_max + 1 - sq]
        counts = nxt
    return counts


def lattice_points(n_max: int, d: int) -> np.ndarray:
    """all p in Z^d with |p|^2 <= n_max, sorted by |p|^2 then lexicographically"""
    r = math.isqrt(n_max)
    axis = np.arange(-r, r + 1)
    grids = np.meshgrid(*([axis] * d), indexing='ij')
    points = np.stack([g.ravel() for g in grids], axis=-1)
    norms = np.sum(points ** 2, axis=1)
    points, norms = points[norms <= n_max], norms[norms <= n_max]
    order = np.lexsort(tuple(points[:, i] for i in reversed(range(d))) + (norms,))
    return points[order]


### Spectrum generators

def spectrum_interval(M: int, a_const: float=1.0, alpha: float=0.0) -> Spectrum:
    """Dirichlet eigenvalues of -a d^2/dx^2 + alpha on [0, pi]: a n^2 + alpha"""
    if M < 2:
        raise ValidationError(f'Need at least M=2 modes, got M={M}')
    n = np.arange(1, M + 1)
    return Spectrum(
        values=np.sort(a_const * n.astype(float) ** 2 + alpha),
        source=f'interval(a={a_const:g},alpha={alpha:g})',
    )


def _torus_spectrum(lambda_max: int, d: int, alpha: float, source: str) -> Spectrum:
    counts = lattice_counts(int(lambda_max), d)
    if alpha <= 0:
        counts[0] = 0
    levels = np.flatnonzero(counts)
    values = np.repeat(levels.astype(float), counts[levels]) + alpha
    labels: Optional[np.ndarray] = None
    if values.size <= TORUS_LABEL_LIMIT:
        labels = lattice_points(int(lambda_max), d)
        if alpha <= 0:
            labels = labels[1:]
    return Spectrum(values=values, labels=labels, source=source)


def spectrum_torus2d(lambda_max: int, alpha: float=0.0) -> Spectrum:
    """
    eigenvalues n^2 + k^2 of -Laplace on the 2D torus, with lattice multiplicity.
    alpha > 0 keeps the constant mode and shifts everything by alpha.
    """
    if lambda_max < 2:
        raise ValidationError(f'lambda_max must be at least 2, got {lambda_max}')
    return _torus_spectrum(lambda_max, 2, alpha, source=f'torus2d(lmax={lambda_max},alpha={alpha:g})')


def spectrum_torus3d(lambda_max: int, alpha: float=0.0) -> Spectrum:
    """eigenvalues n^2 + k^2 + m^2 of -Laplace on the 3D torus, with lattice multiplicity"""
    if lambda_max < 2:
        raise ValidationError(f'lambda_max must be at least 2, got {lambda_max}')
    return _torus_spectrum(lambda_max, 3, alpha, source=f'torus3d(lmax={lambda_max},alpha={alpha:g})')


def spectrum_sphere2(n_max: int) -> Spectrum:
    """n(n+1) with multiplicity 2n+1, labelled by (n, m) with |m| <= n"""
    if n_max < 1:
        raise ValidationError(f'n_max must be at least 1, got {n_max}')
    n = np.arange(1, n_max + 1)
    degrees = np.repeat(n, 2 * n + 1)
    orders = np.concatenate([np.arange(-k, k + 1) for k in n])
    return Spectrum(
        values=(degrees * (degrees + 1)).astype(float),
        labels=np.stack([degrees, orders], axis=-1),
        source=f'sphere2(nmax={n_max})',
    )


def spectrum_ks(M: int, a: float=0.0) -> Spectrum:
    """Kuramoto-Sivashinsky type (N^2 + a)^2 + 1"""
    if M < 2:
        raise ValidationError(f'Need at least M=2 modes, got M={M}')
    n = np.arange(1, M + 1, dtype=float)
    return Spectrum(values=np.sort((n ** 2 + a) ** 2 + 1), source=f'ks(a={a:g})')


def spectrum_sh(M: int, c: float=1.0) -> Spectrum:
    """synthetic Swift-Hohenberg growth c N^{4/3} (fourth order operator in 3D)"""
    if M < 2:
        raise ValidationError(f'Need at least M=2 modes, got M={M}')
    n = np.arange(1, M + 1, dtype=float)
    return Spectrum(values=c * n ** (4 / 3), source=f'sh(c={c:g})')


def spectrum_ch(base: Spectrum) -> Spectrum:
    """Cahn-Hilliard type: squares of a Laplacian spectrum"""
    return Spectrum(values=base.values ** 2, labels=base.labels, source=f'ch({base.source})')


SPECTRA = {
    'interval': 'a n^2 + alpha, Dirichlet on [0, pi]',
    'torus2d': 'n^2 + k^2 on the 2D torus (sums of two squares)',
    'torus3d': 'n^2 + k^2 + m^2 on the 3D torus (sums of three squares)',
    'sphere2': 'n(n+1) with multiplicity 2n+1 on the 2-sphere',
    'ks': '(n^2 + a)^2 + 1, Kuramoto-Sivashinsky',
    'sh': 'c n^{4/3}, Swift-Hohenberg growth',
    'ch-torus2d': 'squares of the 2D torus spectrum, Cahn-Hilliard',
}


def build_spectrum(name: str, modes: int=32, lmax: int=1000, a: float=0.0, alpha: float=0.0) -> Spectrum:
    """look up a spectrum family by its cli name"""
    if name == 'interval':
        return spectrum_interval(modes, a_const=a or 1.0, alpha=alpha)
    if name == 'torus2d':
        return spectrum_torus2d(lmax, alpha=alpha)
    if name == 'torus3d':
        return spectrum_torus3d(lmax, alpha=alpha)
    if name == 'sphere2':
        return spectrum_sphere2(modes)
    if name == 'ks':
        return spectrum_ks(modes, a=a)
    if name == 'sh':
        return spectrum_sh(modes, c=a or 1.0)
    if name == 'ch-torus2d':
        return spectrum_ch(spectrum_torus2d(lmax, alpha=alpha))

    from difflib import get_close_matches
    close = get_close_matches(name, SPECTRA.keys(), n=1)
    raise ValidationError(
        f'Unknown spectrum family: {name}',
        hints=(f'Did you mean {close[0]}?' if close else f'Available: {", ".join(SPECTRA)}',),
    )


def spectrum_to_csv(spectrum: Spectrum) -> str:
    """index, eigenvalue, label table (label is a json list or null)"""
    labels = [None] * spectrum.M if spectrum.labels is None else [list(map(int, label)) for label in spectrum.labels]
    return columns_to_csv({
        'index': list(range(1, spectrum.M + 1)),
        'eigenvalue': spectrum.values,
        'label': labels,
    })
