"""Numerical workbench for finite-alphabet wiretap and Gelfand-Pinsker channels.

Layers: probability primitives (``pmf``, ``divergence``), channel models
and transforms (``channels``), single-letter rate regions and capacities
(``regions``), finite-blocklength codes and exact identities (``codes``),
and the ``wtgp`` command line (``cli``).
"""

from .channels import (
    ClassFlags,
    GpModel,
    WiretapModel,
    analogous_gpbc,
    classify,
    default_state_dist,
    informed_lift,
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
)
from .codes import (
    BlockCode,
    CodeRates,
    ConverseGapReport,
    InducedJoint,
    SecrecyReport,
    SimParams,
    SuperpositionCodebook,
    effective_secrecy,
    encoder_kernel,
    error_probability,
    gp_collapse_residual,
    induce_gp_code,
    induced_joint,
    message_state_tv,
    multiletter_converse_gap,
    random_gp_code,
    reliability_identity_residual,
    sample_codebook,
    secrecy_identity_residual,
    simulate_trend,
    superposition_code,
    tv_to_target,
    typicality_decode,
    wiretap_code_from_tables,
    wiretap_encode,
)
from .divergence import (
    conditional_entropy,
    conditional_mutual_information,
    empirical_pmf,
    entropy,
    is_typical,
    mi_continuity_bound,
    mutual_information,
    relative_entropy,
    total_variation,
)
from .errors import (
    AlphabetMismatchError,
    ChannelFormatError,
    ClassificationError,
    ResourceError,
    RowSumError,
    ShapeError,
    WtgpError,
)
from .pmf import Axis, FinitePmf, JointPmf, StochasticKernel, iid_extension
from .regions import (
    AuxiliaryDist,
    CapacityResult,
    RateBounds,
    RateRegion,
    ReducedAuxiliary,
    SearchParams,
    aux_from_array,
    aux_from_dict,
    aux_to_dict,
    blahut_arimoto,
    brute_force_oracle,
    eval_rate_bounds,
    export_region,
    gp_capacity,
    hausdorff_distance,
    rate_bounds_from_joint,
    reduce_auxiliary,
    region_frontier,
    region_to_dict,
    single_letter_joint,
    support_maximum,
    sweep_directions,
    two_auxiliary_bounds,
    wt_capacity,
)

__version__ = "0.1.0"

__all__ = [
    "AlphabetMismatchError",
    "AuxiliaryDist",
    "Axis",
    "BlockCode",
    "CapacityResult",
    "ChannelFormatError",
    "ClassFlags",
    "ClassificationError",
    "CodeRates",
    "ConverseGapReport",
    "FinitePmf",
    "GpModel",
    "InducedJoint",
    "JointPmf",
    "RateBounds",
    "RateRegion",
    "ReducedAuxiliary",
    "ResourceError",
    "RowSumError",
    "SearchParams",
    "SecrecyReport",
    "ShapeError",
    "SimParams",
    "StochasticKernel",
    "SuperpositionCodebook",
    "WiretapModel",
    "WtgpError",
    "analogous_gpbc",
    "aux_from_array",
    "aux_from_dict",
    "aux_to_dict",
    "blahut_arimoto",
    "brute_force_oracle",
    "classify",
    "conditional_entropy",
    "conditional_mutual_information",
    "default_state_dist",
    "effective_secrecy",
    "empirical_pmf",
    "encoder_kernel",
    "entropy",
    "error_probability",
    "eval_rate_bounds",
    "export_region",
    "gp_capacity",
    "gp_collapse_residual",
    "hausdorff_distance",
    "iid_extension",
    "induce_gp_code",
    "induced_joint",
    "informed_lift",
    "is_typical",
    "load_model",
    "message_state_tv",
    "mi_continuity_bound",
    "model_from_dict",
    "model_to_dict",
    "multiletter_converse_gap",
    "mutual_information",
    "random_gp_code",
    "rate_bounds_from_joint",
    "reduce_auxiliary",
    "region_frontier",
    "region_to_dict",
    "relative_entropy",
    "reliability_identity_residual",
    "sample_codebook",
    "save_model",
    "secrecy_identity_residual",
    "simulate_trend",
    "single_letter_joint",
    "superposition_code",
    "support_maximum",
    "sweep_directions",
    "total_variation",
    "tv_to_target",
    "two_auxiliary_bounds",
    "typicality_decode",
    "wiretap_code_from_tables",
    "wiretap_encode",
    "wt_capacity",
]
