"""Volume of separable and PPT states among random density matrices."""

from .bounds import (
    BoundReport,
    corner_bound,
    epsilon_ball,
    participation_density_n4,
    tau_lower_bound,
    upper_bound_mc_2x2,
    upper_bound_quadrature_2x2,
)
from .estimators import EntanglementFeatures, PPTClassifier, PPTVolumeEstimator
from .experiments import (
    BinnedConditional,
    ExponentialFit,
    VolumeEstimate,
    conditional_by_entropy,
    conditional_by_participation,
    distribution_of_participation,
    estimate_ppt_volume,
    fit_exponential,
    mean_t,
    scan_dimensions,
)
from .quantum import (
    DensityMatrix,
    PptVerdict,
    eigenvector_witness_scan,
    inverse_overlap_witness,
    mix_with_identity,
    overlap_witness,
    participation_ratio,
    partial_transpose,
    ppt_check,
    renyi_entropy,
    schmidt_decompose,
    t_statistic,
)
from .randgen import SeededStream

__all__ = [
    "BinnedConditional",
    "BoundReport",
    "DensityMatrix",
    "EntanglementFeatures",
    "ExponentialFit",
    "PPTClassifier",
    "PPTVolumeEstimator",
    "PptVerdict",
    "SeededStream",
    "VolumeEstimate",
    "conditional_by_entropy",
    "conditional_by_participation",
    "corner_bound",
    "distribution_of_participation",
    "eigenvector_witness_scan",
    "epsilon_ball",
    "estimate_ppt_volume",
    "fit_exponential",
    "inverse_overlap_witness",
    "mean_t",
    "mix_with_identity",
    "overlap_witness",
    "participation_density_n4",
    "participation_ratio",
    "partial_transpose",
    "ppt_check",
    "renyi_entropy",
    "scan_dimensions",
    "schmidt_decompose",
    "t_statistic",
    "tau_lower_bound",
    "upper_bound_mc_2x2",
    "upper_bound_quadrature_2x2",
]
