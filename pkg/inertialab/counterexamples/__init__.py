__package__ = 'inertialab.counterexamples'

from .obstruction import (
    ObstructionReport,
    c1_obstruction_spectra,
    obstruction_fields,
    rotation_block_roots,
)
from .floquet import (
    PeriodicOperator,
    PoincareReport,
    DecayTable,
    NonuniformTable,
    build_periodic_operator,
    poincare_map,
    superexp_decay,
    nonuniform_ratios,
    predicted_multipliers,
    floquet_orbit_cloud,
)
from .segments import (
    KickLayout,
    SegmentsAttractor,
    SmoothnessBudget,
    kick_layout,
    kick_sequences,
    simulate_segments,
    segments_attractor,
    segments_cloud,
    smoothness_budget,
)


COUNTEREXAMPLES = {
    'c1': 'equilibria whose linearizations force even and odd manifold dimension at once',
    'floquet': 'periodic equation whose period map is a weighted shift, decay like exp(-beta t^2)',
    'segments': 'attractor whose w-projection holds orthogonal segments of every length',
}
