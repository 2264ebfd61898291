"""Boost-induced depurification of spin states of localized wave packets.

A moving observer sees the spin of a localized massive particle mixed
with its momentum: the reduced spin state picks up momentum-dependent
Wigner rotations and its purity drops. This package computes the boosted
reduced state, the purity deficit, its quadratic (small-spread)
prediction, and the localization bound relating the deficit to
position-space variances.
"""

from .boostmap import (
    BoostedStateResult,
    PurityEstimate,
    boosted_purity_double_integral,
    gamma,
    transform_spin_state,
)
from .errors import AccuracyError, ConsistencyError
from .expansion import (
    HessianBlocks,
    SpectralExpansion,
    hessian_blocks,
    localization_bound,
    mode_variances,
    predict_depurification,
    spectral_decompose,
)
from .integrate import IntegratorSpec
from .kinematics import (
    FourVector,
    LorentzTransform,
    RotationResult,
    apply,
    axis_angle_from_matrix,
    boost_from_rapidity,
    rotation_matrix,
    rotation_transform,
    standard_boost,
    wigner_rotation,
)
from .spin import (
    ParticleSet,
    SpinState,
    bell_pair,
    bloch_vector,
    joint_rep,
    partial_trace,
    pure_state,
    purity,
    rotation_rep,
    spin_operators,
    spin_up_z,
)
from .wavepackets import (
    PacketMoments,
    WavePacket,
    WeightedSampleBatch,
    draw_weighted_samples,
    make_entangled_gaussian,
    make_single_gaussian,
    moments,
    position_covariance,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "BoostedStateResult",
    "ConsistencyError",
    "FourVector",
    "HessianBlocks",
    "IntegratorSpec",
    "LorentzTransform",
    "PacketMoments",
    "ParticleSet",
    "PurityEstimate",
    "RotationResult",
    "SpectralExpansion",
    "SpinState",
    "WavePacket",
    "WeightedSampleBatch",
    "apply",
    "axis_angle_from_matrix",
    "bell_pair",
    "bloch_vector",
    "boost_from_rapidity",
    "boosted_purity_double_integral",
    "draw_weighted_samples",
    "gamma",
    "hessian_blocks",
    "joint_rep",
    "localization_bound",
    "make_entangled_gaussian",
    "make_single_gaussian",
    "mode_variances",
    "moments",
    "partial_trace",
    "position_covariance",
    "predict_depurification",
    "pure_state",
    "purity",
    "rotation_matrix",
    "rotation_rep",
    "rotation_transform",
    "spectral_decompose",
    "spin_operators",
    "spin_up_z",
    "standard_boost",
    "transform_spin_state",
    "wigner_rotation",
]
