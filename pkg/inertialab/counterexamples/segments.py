"""
Orthogonal segments in the w-projection of an attractor.

The planar part x' = -x(R^2 - 1), y' = -y(R^2 - 1) keeps every angle fixed and
makes the unit circle a ring of equilibria. The angle window I_n (width E_n)
drives mode e_n with strength B_n, so the point on the circle at the window
center is joined to the equilibrium (cos phi_n, sin phi_n, B_n/lambda_n e_n) by
a heteroclinic orbit whose w-part sweeps the segment [0, B_n/lambda_n] e_n.
"""

__package__ = 'inertialab.counterexamples'

import math

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from ..spectral_core import Spectrum
from ..models.nonlinearity import smooth_step, radial_cutoff
from ..reports.schema import CheckResult, ValidationError, NumericalError


ODE_RTOL, ODE_ATOL = 1e-10, 1e-14


def kick_sequences(n: Sequence[float], kappa: float=1.0) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """B_n = n^{-log n}, E_n = n^{-2}, lambda_n = n^kappa"""
    n = np.asarray(n, dtype=float)
    return np.exp(-np.log(n) ** 2), n ** -2.0, n ** kappa


@dataclass(frozen=True)
class SmoothnessBudget:
    sup: float
    argmax: int
    tail_slope: float
    finite: bool
    schema: str = 'SmoothnessBudget'

    def _asdict(self):
        return {'schema': self.schema, 'sup': self.sup, 'argmax': self.argmax,
                'tail_slope': self.tail_slope, 'finite': self.finite}


def smoothness_budget(B: Sequence[float], E: Sequence[float], lam: Sequence[float], s: float, k: float) -> SmoothnessBudget:
    """
    sup_n B_n lambda_n^s E_n^{-k}, the size of the kick field in C^k(R^2, H^s).
    Judged finite when the sup sits away from the end of the sampled range and
    the log-terms fall off against log n over its second half.
    """
    B, E, lam = (np.asarray(v, dtype=float) for v in (B, E, lam))
    if not B.shape == E.shape == lam.shape or B.size < 4:
        raise ValidationError('B, E and lambda need the same length (at least 4)')
    if np.any(B <= 0) or np.any(E <= 0) or np.any(lam <= 0):
        raise ValidationError('B, E and lambda must be positive')
    log_terms = np.log(B) + s * np.log(lam) - k * np.log(E)
    n = np.arange(1, B.size + 1, dtype=float)
    half = B.size // 2
    slope = float(np.polyfit(np.log(n[half:]), log_terms[half:], 1)[0])
    argmax = int(np.argmax(log_terms))
    return SmoothnessBudget(
        sup=float(np.exp(log_terms[argmax])),
        argmax=argmax + 1,
        tail_slope=slope,
        finite=bool(argmax < 0.9 * B.size and slope < 0),
    )


### Kick layout on the circle

def _wrap(phi: np.ndarray) -> np.ndarray:
    return (np.asarray(phi, dtype=float) + math.pi) % (2 * math.pi) - math.pi


@dataclass(frozen=True, eq=False)
class KickLayout:
    spectrum: Spectrum
    B: np.ndarray
    E: np.ndarray
    centers: np.ndarray
    schema: str = 'KickLayout'

    @property
    def count(self) -> int:
        return self.B.size

    @property
    def lengths(self) -> np.ndarray:
        """B_n / lambda_n, the segment lengths"""
        return self.B / self.spectrum.values[:self.count]

    def psi(self, n: int, phi) -> np.ndarray:
        """bump of window n (0-based): 1 at its center, 0 outside the window"""
        return smooth_step(1.0 - 2.0 * np.abs(_wrap(np.asarray(phi) - self.centers[n])) / self.E[n])

    @staticmethod
    def theta(R) -> np.ndarray:
        """0 for R <= 1/4, 1 on [1/2, 1], 0 again for R >= 2"""
        R = np.asarray(R, dtype=float)
        return smooth_step(4 * R - 1) * radial_cutoff(R)

    def forcing(self, x: float, y: float) -> np.ndarray:
        out = np.zeros(self.spectrum.M)
        R = math.hypot(x, y)
        if R == 0:
            return out
        phi, th = math.atan2(y, x), float(self.theta(R))
        for n in range(self.count):
            out[n] = self.B[n] * th * float(self.psi(n, phi))
        return out

    def gap_angles(self) -> np.ndarray:
        """one angle in each gap between windows, where no mode is driven"""
        half = self.E / 2
        ends = self.centers + half
        starts = np.append(self.centers[1:] - half[1:], self.centers[0] - half[0] + 2 * math.pi)
        return _wrap((ends + starts) / 2)

    def _asdict(self):
        return {'schema': self.schema, 'B': self.B, 'E': self.E, 'centers': self.centers,
                'lengths': self.lengths, 'source': self.spectrum.source}


def kick_layout(spectrum: Spectrum, B: Sequence[float], E: Sequence[float]) -> KickLayout:
    """windows of widths E_n laid out on [0, 2 pi) with equal gaps between them"""
    B, E = np.asarray(B, dtype=float), np.asarray(E, dtype=float)
    if B.shape != E.shape or B.ndim != 1 or not B.size:
        raise ValidationError(f'B and E must be matching nonempty sequences, got {B.shape} and {E.shape}')
    if B.size > spectrum.M:
        raise ValidationError(f'{B.size} kicks need at least as many modes, got M={spectrum.M}')
    if np.any(B <= 0) or np.any(np.diff(B) > 0):
        raise ValidationError('B_n must be positive and nonincreasing')
    if np.any(E <= 0) or E.sum() >= 2 * math.pi:
        raise ValidationError(f'Window widths must be positive with sum < 2 pi, got sum {E.sum():g}')
    gap = (2 * math.pi - E.sum()) / B.size
    starts = gap * np.arange(B.size) + np.concatenate([[0.0], np.cumsum(E)[:-1]])
    return KickLayout(spectrum=spectrum, B=B, E=E, centers=starts + E / 2)


### Simulation

def simulate_segments(layout: KickLayout, start: Sequence[float], horizon: float,
                      t_eval: Optional[Sequence[float]]=None) -> Tuple[np.ndarray, np.ndarray]:
    """integrate (x, y, w) from start = (x0, y0, w0...) with a stiff solver, returning (times, states)"""
    lam = layout.spectrum.values
    start = np.asarray(start, dtype=float)
    if start.shape != (2 + layout.spectrum.M,):
        raise ValidationError(f'start needs {2 + layout.spectrum.M} entries (x, y, w), got {start.shape}')

    def rhs(t, z):
        x, y, w = z[0], z[1], z[2:]
        radial = x * x + y * y - 1.0
        return np.concatenate([[-x * radial, -y * radial], -lam * w + layout.forcing(x, y)])

    sol = solve_ivp(rhs, (0.0, horizon), start, method='Radau', rtol=ODE_RTOL, atol=ODE_ATOL,
                    t_eval=None if t_eval is None else np.asarray(t_eval, dtype=float))
    if not sol.success or not np.all(np.isfinite(sol.y)):
        raise NumericalError(f'Segment simulation failed: {sol.message}')
    return sol.t, sol.y.T


@dataclass(frozen=True, eq=False)
class SegmentsAttractor:
    layout: KickLayout
    horizon: float
    equilibria: np.ndarray
    segments: List[np.ndarray]
    checks: List[CheckResult] = field(default_factory=list)
    schema: str = 'SegmentsAttractor'

    def cloud(self) -> np.ndarray:
        return segments_cloud(self)

    def _asdict(self):
        return {
            'schema': self.schema,
            'layout': self.layout._asdict(),
            'horizon': self.horizon,
            'equilibria': self.equilibria,
            'segment_sizes': [len(seg) for seg in self.segments],
        }


def segments_attractor(spectrum: Spectrum, B: Sequence[float], E: Sequence[float],
                       horizon: Optional[float]=None, pts_per_segment: int=40) -> SegmentsAttractor:
    """
    Follow the heteroclinic orbit out of each window center on the unit circle.
    Sample times are picked so the w-part lands on an even grid of the segment
    and on the lengths of all shorter segments.
    """
    layout = kick_layout(spectrum, B, E)
    lam = spectrum.values
    horizon = 40.0 / lam[0] if horizon is None else float(horizon)
    lengths = layout.lengths

    equilibria, segments = [], []
    for n in range(layout.count):
        phi = layout.centers[n]
        levels = np.union1d(np.arange(pts_per_segment) / pts_per_segment, lengths[n + 1:] / lengths[n])
        levels = levels[levels < 1.0]
        times = np.append(-np.log1p(-levels) / lam[n], horizon)
        times = np.unique(times[times <= horizon])
        start = np.zeros(2 + spectrum.M)
        start[0], start[1] = math.cos(phi), math.sin(phi)
        _, states = simulate_segments(layout, start, horizon, t_eval=times)
        equilibria.append(states[-1])
        segments.append(states[:, 2:])

    equilibria = np.array(equilibria)
    predicted = np.zeros_like(equilibria)
    predicted[:, 0], predicted[:, 1] = np.cos(layout.centers), np.sin(layout.centers)
    predicted[np.arange(layout.count), 2 + np.arange(layout.count)] = lengths
    off_mode = max(float(np.max(np.abs(np.delete(seg, n, axis=1)))) for n, seg in enumerate(segments))
    checks = [
        CheckResult.compare('equilibrium_error', np.max(np.abs(equilibria - predicted)), '<=', 1e-6),
        CheckResult.compare('off_mode_mass', off_mode, '<=', 1e-12),
    ]
    return SegmentsAttractor(layout=layout, horizon=horizon, equilibria=equilibria,
                             segments=segments, checks=checks)


def segments_cloud(attractor: SegmentsAttractor) -> np.ndarray:
    """Q_2 projection of the collected segments, origin included"""
    M = attractor.layout.spectrum.M
    return np.vstack([np.zeros((1, M))] + list(attractor.segments))
