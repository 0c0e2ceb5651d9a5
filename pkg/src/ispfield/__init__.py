"""Image space potential fields for vision-based navigation."""

from .control import (
    CameraIntrinsics,
    ControlCommand,
    ControlSetMap,
    GuidanceParams,
    bias_field_from_control_set,
    bias_field_from_guidance,
    column_to_steering,
    control_set,
    erode_along_horizon,
    sd_control,
    steering_to_column,
)
from .extended_real import NEG_INF, POS_INF, ExtendedReal, Polarity, ext_add, ext_scale, finite
from .field import (
    AsymptoticRegion,
    IspField,
    PotentialPoint,
    RegionOfInterest,
    ScalarField,
    asymptotic_region,
    field_add,
    field_hadamard,
    field_scale,
    min_reduce_band,
)
from .transforms import (
    ConstraintParams,
    apply_hard,
    apply_soft,
    hard_transform,
    hard_transform_dot,
    soft_transform,
    soft_transform_dot,
)
from .ttc import (
    ScaleObservation,
    TtcEstimate,
    estimate_s_dot,
    estimate_tau,
    estimate_tau_dot,
    scale_from_mask,
    tau_dot_decision,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticRegion",
    "CameraIntrinsics",
    "ConstraintParams",
    "ControlCommand",
    "ControlSetMap",
    "ExtendedReal",
    "GuidanceParams",
    "IspField",
    "NEG_INF",
    "POS_INF",
    "Polarity",
    "PotentialPoint",
    "RegionOfInterest",
    "ScalarField",
    "ScaleObservation",
    "TtcEstimate",
    "apply_hard",
    "apply_soft",
    "asymptotic_region",
    "bias_field_from_control_set",
    "bias_field_from_guidance",
    "column_to_steering",
    "control_set",
    "erode_along_horizon",
    "estimate_s_dot",
    "estimate_tau",
    "estimate_tau_dot",
    "ext_add",
    "ext_scale",
    "field_add",
    "field_hadamard",
    "field_scale",
    "finite",
    "hard_transform",
    "hard_transform_dot",
    "min_reduce_band",
    "scale_from_mask",
    "sd_control",
    "soft_transform",
    "soft_transform_dot",
    "steering_to_column",
    "tau_dot_decision",
]
