"""
Pseudospectral transforms between eigen-coefficients and physical grid values.

interval: Dirichlet sine basis sqrt(2/pi) sin(n x) on [0, pi], interior nodes
          x_j = pi j / (P + 1), transformed with the orthonormal DST-I.
torus:    real Fourier basis on [0, 2 pi]^d built from the lattice labels of the
          spectrum, cos(p.x) for the lexicographically positive member of each
          +-p pair and sin(p.x) for the other, transformed with fftn.

Grids are oversampled by `oversample` (default 2) relative to the largest
resolved frequency, which makes cubic products alias free on the kept modes.
"""

__package__ = 'inertialab.models'

import math

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import fft

from ..spectral_core import Spectrum
from ..reports.schema import ValidationError


def _lex_positive(labels: np.ndarray) -> np.ndarray:
    """True where the first nonzero entry of the label is positive"""
    first_nonzero = np.argmax(labels != 0, axis=1)
    return labels[np.arange(len(labels)), first_nonzero] > 0


@dataclass(frozen=True, eq=False)
class CollocationGrid:
    spectrum: Spectrum
    kind: str
    d: int
    P: int
    x: Tuple[np.ndarray, ...]
    volume: float
    oversample: int = 2
    # torus tables, unused on the interval
    own_index: Optional[np.ndarray] = None
    neg_index: Optional[np.ndarray] = None
    is_cos: Optional[np.ndarray] = None
    is_const: Optional[np.ndarray] = None

    @classmethod
    def for_spectrum(cls, spectrum: Spectrum, oversample: int=2) -> 'CollocationGrid':
        if spectrum.labels is None:
            return cls._interval(spectrum, oversample)
        if spectrum.labels.shape[1] in (1, 2, 3) and spectrum.source.startswith(('torus', 'periodic')):
            return cls._torus(spectrum, oversample)
        raise ValidationError(
            f'No collocation grid for spectrum {spectrum.source}',
            hints=('Grids exist for Dirichlet interval spectra and 1-3D torus spectra.',),
        )

    @classmethod
    def _interval(cls, spectrum: Spectrum, oversample: int) -> 'CollocationGrid':
        P = oversample * spectrum.M
        x = np.pi * np.arange(1, P + 1) / (P + 1)
        return cls(spectrum=spectrum, kind='interval', d=1, P=P, x=(x,), volume=np.pi, oversample=oversample)

    @classmethod
    def _torus(cls, spectrum: Spectrum, oversample: int) -> 'CollocationGrid':
        labels = np.asarray(spectrum.labels, dtype=int)
        d = labels.shape[1]
        kmax = int(np.max(np.abs(labels))) if labels.size else 0
        P = oversample * (2 * kmax + 1)
        P += P % 2
        is_const = np.all(labels == 0, axis=1)
        is_cos = _lex_positive(labels) | is_const
        shape = (P,) * d
        own_index = np.ravel_multi_index(tuple((labels % P).T), shape)
        neg_index = np.ravel_multi_index(tuple((-labels % P).T), shape)
        axis = 2 * np.pi * np.arange(P) / P
        x = tuple(np.meshgrid(*([axis] * d), indexing='ij'))
        return cls(
            spectrum=spectrum, kind='torus', d=d, P=P, x=x, volume=(2 * np.pi) ** d, oversample=oversample,
            own_index=own_index, neg_index=neg_index, is_cos=is_cos, is_const=is_const,
        )

    @property
    def M(self) -> int:
        return self.spectrum.M

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.P,) * self.d

    @property
    def cell_volume(self) -> float:
        if self.kind == 'interval':
            return np.pi / (self.P + 1)
        return self.volume / self.P ** self.d

    def to_grid(self, coeffs: np.ndarray) -> np.ndarray:
        """coefficients (..., M) -> grid values (..., *shape)"""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1] != self.M:
            raise ValidationError(f'Expected {self.M} coefficients, got {coeffs.shape[-1]}')
        if self.kind == 'interval':
            padded = np.zeros(coeffs.shape[:-1] + (self.P,))
            padded[..., :self.M] = coeffs
            return math.sqrt((self.P + 1) / np.pi) * fft.dst(padded, type=1, norm='ortho', axis=-1)

        scale = math.sqrt(self.volume)
        lead = coeffs.shape[:-1]
        spectrum_flat = np.zeros(lead + (self.P ** self.d,), dtype=complex)
        amp = coeffs / (math.sqrt(2) * scale)
        own = np.where(self.is_cos, amp, 1j * amp)
        neg = np.where(self.is_cos, amp, -1j * amp)
        own = np.where(self.is_const, coeffs / scale, own)
        neg = np.where(self.is_const, 0.0, neg)
        spectrum_flat[..., self.own_index] += own
        spectrum_flat[..., self.neg_index] += neg
        values = fft.ifftn(spectrum_flat.reshape(lead + self.shape), axes=self._axes(len(lead)))
        return np.real(values) * self.P ** self.d

    def from_grid(self, values: np.ndarray) -> np.ndarray:
        """grid values (..., *shape) -> coefficients (..., M) of the projection onto the kept modes"""
        values = np.asarray(values, dtype=float)
        if self.kind == 'interval':
            return math.sqrt(np.pi / (self.P + 1)) * fft.dst(values, type=1, norm='ortho', axis=-1)[..., :self.M]

        lead = values.shape[:-self.d]
        scale = math.sqrt(self.volume)
        hat = fft.fftn(values, axes=self._axes(len(lead))) / self.P ** self.d
        hat = hat.reshape(lead + (self.P ** self.d,))[..., self.own_index]
        coeffs = np.where(self.is_cos, math.sqrt(2) * scale * hat.real, math.sqrt(2) * scale * hat.imag)
        return np.where(self.is_const, scale * hat.real, coeffs)

    def mean(self, values: np.ndarray, ends: Tuple[float, float]=(0.0, 0.0)) -> np.ndarray:
        """
        spatial average over the domain. On the interval this is the trapezoid rule, which needs
        the values at x = 0 and x = pi: the grid only holds interior nodes, so pass them as ends.
        """
        values = np.asarray(values, dtype=float)
        axes = tuple(range(values.ndim - self.d, values.ndim))
        if self.kind == 'interval':
            return (np.sum(values, axis=axes) + (ends[0] + ends[1]) / 2) / (self.P + 1)
        return np.mean(values, axis=axes)

    def _axes(self, n_lead: int) -> Tuple[int, ...]:
        return tuple(range(n_lead, n_lead + self.d))

    def refined(self, factor: int=2) -> 'CollocationGrid':
        """same modes on a finer grid, the dense-grid oracle for tests and checks"""
        return CollocationGrid.for_spectrum(self.spectrum, oversample=self.oversample * factor)
