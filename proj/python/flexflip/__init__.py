"""Elastica contact solver and flex-and-flip grasp simulator."""

from ._core import (
    ConfigError,
    DegenerateFit,
    InvalidArgument,
    NoSuccesses,
    UnreachableEndpoint,
    __version__,
    classify,
    energy_field,
    finger_path,
    fit_affine,
    fit_sweep_csv,
    resolved_config,
    solve,
    sweep,
)

__all__ = [
    "ConfigError",
    "DegenerateFit",
    "InvalidArgument",
    "NoSuccesses",
    "UnreachableEndpoint",
    "__version__",
    "classify",
    "energy_field",
    "finger_path",
    "fit_affine",
    "fit_sweep_csv",
    "resolved_config",
    "solve",
    "sweep",
]
