__package__ = 'inertialab.models'

from .spectra import (
    primes_up_to,
    is_sum_of_two_squares_mask,
    is_sum_of_three_squares_mask,
    lattice_counts,
    lattice_points,
    spectrum_interval,
    spectrum_torus2d,
    spectrum_torus3d,
    spectrum_sphere2,
    spectrum_ks,
    spectrum_sh,
    spectrum_ch,
    build_spectrum,
    spectrum_to_csv,
    SPECTRA,
)
from .collocation import CollocationGrid
from .nonlinearity import (
    NonlinearityModel,
    smooth_step,
    smooth_step_prime,
    radial_cutoff,
    zero_model,
    constant_forcing,
    linear_model,
    rotation_model,
    rde_nonlinearity,
    chafee_infante_model,
    limit_cycle_model,
    estimate_lipschitz,
    spatial_average_multiplier,
    spatial_averaging_defect,
    build_model,
    MODELS,
)
