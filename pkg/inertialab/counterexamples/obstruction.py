__package__ = 'inertialab.counterexamples'

import math

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ..spectral_core import Spectrum
from ..models.nonlinearity import NonlinearityModel
from ..reports.schema import CheckResult, ValidationError


# linear pieces of F near the equilibria u_minus = -amp e_1 and u_plus = amp e_1:
#   minus: rotations of strength L on the pairs (1,2), (3,4), ...
#   plus:  e_1 pushed out with slope L, rotations on (2,3), (4,5), ...


def minus_pairs(M: int) -> List[Tuple[int, int]]:
    return [(n, n + 1) for n in range(0, M - 1, 2)]


def plus_pairs(M: int) -> List[Tuple[int, int]]:
    return [(n, n + 1) for n in range(1, M - 1, 2)]


def rotation_block_roots(lam_a: float, lam_b: float, L: float) -> Tuple[float, float]:
    """(alpha, omega) for u_a' = -lam_a u_a + L u_b, u_b' = -lam_b u_b - L u_a"""
    disc = 4 * L ** 2 - (lam_b - lam_a) ** 2
    if disc <= 0:
        return -(lam_a + lam_b) / 2, 0.0
    return -(lam_a + lam_b) / 2, 0.5 * math.sqrt(disc)


def _linear_parts(spectrum: Spectrum, L: float) -> Tuple[np.ndarray, np.ndarray]:
    M = spectrum.M
    B_minus, B_plus = np.zeros((M, M)), np.zeros((M, M))
    for a, b in minus_pairs(M):
        B_minus[a, b], B_minus[b, a] = L, -L
    B_plus[0, 0] = L
    for a, b in plus_pairs(M):
        B_plus[a, b], B_plus[b, a] = -L, L
    return B_minus, B_plus


def obstruction_fields(spectrum: Spectrum, L: float, amp: float=10.0) -> Tuple[NonlinearityModel, NonlinearityModel]:
    """the affine fields that F agrees with near u_minus and near u_plus"""
    lam1 = spectrum.values[0]
    B_minus, B_plus = _linear_parts(spectrum, L)
    c_minus = np.zeros(spectrum.M)
    c_minus[0], c_minus[1] = -lam1 * amp, -L * amp
    c_plus = np.zeros(spectrum.M)
    c_plus[0] = lam1 * amp - L * amp

    def field_at(B, c, name):
        return NonlinearityModel(
            spectrum=spectrum,
            func=lambda u: u @ B.T + c,
            derivative=lambda u, v: v @ B.T,
            lipschitz_L=float(np.linalg.norm(B, 2)),
            bound_C=math.inf,
            name=name,
            params={'L': L, 'amp': amp},
        )

    return field_at(B_minus, c_minus, 'obstruction-minus'), field_at(B_plus, c_plus, 'obstruction-plus')


@dataclass(frozen=True)
class ObstructionReport:
    L: float
    L0: float
    M: int
    minus_blocks: List[Tuple[float, float]]
    plus_real: float
    plus_blocks: List[Tuple[float, float]]
    minus_eigs: np.ndarray
    plus_eigs: np.ndarray
    minus_real_count: int
    plus_real_count: int
    tail_modes: List[int]
    checks: List[CheckResult] = field(default_factory=list)
    schema: str = 'ObstructionReport'

    @property
    def parity_conflict(self) -> bool:
        """an invariant C^1 manifold would need even dimension at u_minus and odd at u_plus"""
        return self.minus_real_count == 0 and self.plus_real_count == 1 and self.plus_real > 0

    def _asdict(self):
        return {
            'schema': self.schema,
            'L': self.L,
            'L0': self.L0,
            'M': self.M,
            'minus_blocks': [list(b) for b in self.minus_blocks],
            'plus_real': self.plus_real,
            'plus_blocks': [list(b) for b in self.plus_blocks],
            'minus_eigs': {'re': self.minus_eigs.real, 'im': self.minus_eigs.imag},
            'plus_eigs': {'re': self.plus_eigs.real, 'im': self.plus_eigs.imag},
            'minus_real_count': self.minus_real_count,
            'plus_real_count': self.plus_real_count,
            'tail_modes': self.tail_modes,
            'parity_conflict': self.parity_conflict,
        }


def _count_real(eigs: np.ndarray, scale: float) -> int:
    return int(np.count_nonzero(np.abs(eigs.imag) <= 1e-9 * max(scale, 1.0)))


def c1_obstruction_spectra(spectrum: Spectrum, L: float, amp: float=10.0) -> ObstructionReport:
    """
    Closed-form spectra of the linearizations at u_minus and u_plus, cross-checked
    against numpy eigenvalues of the assembled Jacobians.

    A Galerkin truncation leaves one mode without a partner at one of the two
    equilibria (the last mode at u_minus when M is odd, at u_plus when M is even);
    that mode is real by construction, so it is listed in tail_modes and left out
    of the real-eigenvalue counts.
    """
    lam = spectrum.values
    M = spectrum.M
    L0 = float(np.max(np.diff(lam)))
    for a, b in minus_pairs(M) + plus_pairs(M):
        if 2 * L <= lam[b] - lam[a]:
            raise ValidationError(
                f'Rotation condition 2L > gap fails on block ({a + 1},{b + 1}): 2L={2 * L:g}, gap={lam[b] - lam[a]:g}',
                hints=(f'Use L > {(lam[b] - lam[a]) / 2:g}, the largest half gap here is {L0 / 2:g}.',),
            )

    minus_blocks = [rotation_block_roots(lam[a], lam[b], L) for a, b in minus_pairs(M)]
    plus_blocks = [rotation_block_roots(lam[a], lam[b], L) for a, b in plus_pairs(M)]
    plus_real = float(L - lam[0])
    tail_minus = [M] if M % 2 else []
    tail_plus = [] if M % 2 else [M]

    field_minus, field_plus = obstruction_fields(spectrum, L, amp)
    u_minus, u_plus = np.zeros(M), np.zeros(M)
    u_minus[0], u_plus[0] = -amp, amp
    B_minus, B_plus = _linear_parts(spectrum, L)
    J_minus, J_plus = B_minus - np.diag(lam), B_plus - np.diag(lam)

    # numerical spectra restricted to the modes that form complete blocks
    keep_minus = M - len(tail_minus)
    keep_plus = M - len(tail_plus)
    minus_eigs = np.linalg.eigvals(J_minus[:keep_minus, :keep_minus])
    plus_eigs = np.linalg.eigvals(J_plus[:keep_plus, :keep_plus])
    scale = float(lam[-1])
    minus_real = _count_real(minus_eigs, scale)
    plus_real_count = _count_real(plus_eigs, scale)

    predicted_minus = np.array([complex(a, s * w) for a, w in minus_blocks for s in (1, -1)])
    predicted_plus = np.array([plus_real] + [complex(a, s * w) for a, w in plus_blocks for s in (1, -1)])

    def spectrum_distance(measured, predicted):
        measured, predicted = np.sort_complex(measured), np.sort_complex(predicted)
        return float(np.max(np.abs(measured - predicted))) if measured.size else 0.0

    checks = [
        CheckResult.compare('equilibrium_residual_minus',
                            np.linalg.norm(field_minus.vector_field(u_minus)), '<=', 1e-9 * amp * scale),
        CheckResult.compare('equilibrium_residual_plus',
                            np.linalg.norm(field_plus.vector_field(u_plus)), '<=', 1e-9 * amp * scale),
        CheckResult.compare('lipschitz_minus', field_minus.lipschitz_L, '<=', L * (1 + 1e-12)),
        CheckResult.compare('lipschitz_plus', field_plus.lipschitz_L, '<=', L * (1 + 1e-12)),
        CheckResult.compare('closed_form_minus', spectrum_distance(minus_eigs, predicted_minus), '<=', 1e-8 * scale),
        CheckResult.compare('closed_form_plus', spectrum_distance(plus_eigs, predicted_plus), '<=', 1e-8 * scale),
        CheckResult.flag('no_real_eigenvalue_minus', minus_real == 0, measured=minus_real),
        CheckResult.flag('one_real_eigenvalue_plus', plus_real_count == 1, measured=plus_real_count),
        CheckResult.flag('unstable_plus', plus_real > 0, measured=plus_real,
                         detail='' if plus_real > 0 else f'L={L:g} <= lambda_1={lam[0]:g}'),
    ]
    return ObstructionReport(
        L=float(L),
        L0=L0,
        M=M,
        minus_blocks=minus_blocks,
        plus_real=plus_real,
        plus_blocks=plus_blocks,
        minus_eigs=minus_eigs,
        plus_eigs=plus_eigs,
        minus_real_count=minus_real,
        plus_real_count=plus_real_count,
        tail_modes=tail_minus + tail_plus,
        checks=checks,
    )
