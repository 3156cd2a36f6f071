"""Secrecy rate evaluation and power optimization for cooperative MIMO
against an eavesdropper confined to a finite set of candidate locations.

The closed-form Haar-averaged eavesdropper rate (avg_rate), its gradients,
and the successive convex approximation power optimizer (optimizer) are the
core; scenario/channel provide geometry and fading models, and cli runs
reproducible experiment campaigns.
"""

from .avg_rate import (
    PowerAllocation,
    RatePair,
    f_b,
    f_e_exact_mc,
    f_tilde_e,
    f_tilde_e_mc,
    grad_f_b,
    grad_f_tilde_e,
    rate_eve_diff,
    secrecy_objective,
    zero_threshold,
)
from .channel import (
    FadingDraw,
    MainChannel,
    load_channel_file,
    main_channel_from_matrix,
    sample_fading,
    sample_haar_unitary,
    sample_main_channel,
)
from .optimizer import (
    OptimizationTrace,
    SubproblemError,
    SurrogateModel,
    build_surrogate,
    exhaustive_search,
    optimize,
    solve_subproblem,
    water_filling,
)
from .scenario import (
    BetaProfile,
    EveGainProfile,
    NodeLayout,
    Scenario,
    gains_from_layout,
    load_scenario,
    path_gain,
    sample_layout,
)

__version__ = "0.1.0"

__all__ = [
    "BetaProfile",
    "EveGainProfile",
    "FadingDraw",
    "MainChannel",
    "NodeLayout",
    "OptimizationTrace",
    "PowerAllocation",
    "RatePair",
    "Scenario",
    "SubproblemError",
    "SurrogateModel",
    "build_surrogate",
    "exhaustive_search",
    "f_b",
    "f_e_exact_mc",
    "f_tilde_e",
    "f_tilde_e_mc",
    "gains_from_layout",
    "grad_f_b",
    "grad_f_tilde_e",
    "load_channel_file",
    "load_scenario",
    "main_channel_from_matrix",
    "optimize",
    "path_gain",
    "rate_eve_diff",
    "sample_fading",
    "sample_haar_unitary",
    "sample_layout",
    "sample_main_channel",
    "secrecy_objective",
    "solve_subproblem",
    "water_filling",
    "zero_threshold",
    "__version__",
]
