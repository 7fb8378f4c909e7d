"""Attractors, chaos games and stationary measures of interval IFSs."""

from .chaos import ChaosReport, Orbit, chaos_probe, orbit, tail_cover
from .dynamics import (
    ConleyVerdict,
    StarResult,
    TargetResult,
    bh_apply,
    common_fixed_points,
    conley_probe,
    fibre_approx,
    invariance_check,
    stability_probe,
    star_set,
    target_approx,
    weakly_hyperbolic_witness,
    word_image,
)
from .intervals import IntervalSet
from .maps import (
    Ifs,
    PiecewiseMonotoneMap,
    lipschitz_exact,
    linear_map,
    piecewise_linear,
    quadratic_map,
)
from .measures import (
    GridMeasure,
    HatMeasure,
    coding_pushforward,
    generalized_markov_step,
    markov_step,
    pushforward,
    stability_probe_measures,
    support_estimate,
    w1_distance,
)
from .presets import PRESETS, get_preset
from .stochastic import (
    TransitionMatrix,
    inverse_matrix,
    is_irreducible,
    is_primitive,
    rigidity_check,
    separability_check,
    split_check,
    stationary_vector,
)
from .symbolic import (
    SymbolStream,
    Word,
    cylinder_measure,
    disjunctive_stream,
    enumerate_words,
)

__version__ = "0.1.0"

__all__ = [
    "ChaosReport",
    "ConleyVerdict",
    "GridMeasure",
    "HatMeasure",
    "Ifs",
    "IntervalSet",
    "Orbit",
    "PRESETS",
    "PiecewiseMonotoneMap",
    "StarResult",
    "SymbolStream",
    "TargetResult",
    "TransitionMatrix",
    "Word",
    "bh_apply",
    "chaos_probe",
    "coding_pushforward",
    "common_fixed_points",
    "conley_probe",
    "cylinder_measure",
    "disjunctive_stream",
    "enumerate_words",
    "fibre_approx",
    "generalized_markov_step",
    "get_preset",
    "invariance_check",
    "inverse_matrix",
    "is_irreducible",
    "is_primitive",
    "linear_map",
    "lipschitz_exact",
    "markov_step",
    "orbit",
    "piecewise_linear",
    "pushforward",
    "quadratic_map",
    "rigidity_check",
    "separability_check",
    "split_check",
    "stability_probe",
    "stability_probe_measures",
    "star_set",
    "stationary_vector",
    "support_estimate",
    "tail_cover",
    "target_approx",
    "w1_distance",
    "weakly_hyperbolic_witness",
    "word_image",
]
