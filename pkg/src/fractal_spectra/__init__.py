"""Spectral self-affine measures: Hadamard triples, Fourier transforms of
infinite convolutions, extreme cycles, spectrum candidates and
almost-Parseval frame towers."""

from .dynamics import (
    Simplicity,
    TransitionSystem,
    attractor_box,
    attractor_points,
    dynamical_simplicity,
    dynamically_simple_spectrum,
    enumerate_extreme_cycles,
    periodic_zero_scan,
)
from .fourier import MuHatEvaluator, frame_bounds, mask_eval, mu_hat, qmf_residual, zero_certificate
from .latmath import Lattice, expansivity, is_expansive, smallest_invariant_lattice
from .spectrum import (
    CompletionConfig,
    CompletionFailure,
    canonical_levels,
    complete_spectrum,
    cycle_levels,
    delta_estimate,
    orthogonal_set_search,
    orthogonality_check,
    parseval_defect,
)
from .tower import (
    SelectionProblem,
    build_tower_th01,
    exhaustive_select,
    heuristic_select,
    self_similar_tower,
    tower_frame_spectrum,
    tower_mu_hat,
)
from .triple import (
    AffinePair,
    HadamardTriple,
    TripleError,
    product_triple,
    search_quasi_product,
    verify_quasi_product,
    verify_triple,
)

__version__ = "0.1.0"
