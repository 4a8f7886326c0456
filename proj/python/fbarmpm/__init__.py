"""B-spline material point method with F-bar projection."""

from ._core import (
    ConfigError,
    NumericError,
    OutOfDomainError,
    Simulation,
    constraint_ratio,
    eval_basis_1d,
    eval_basis_3d,
    normalize_config,
    projection_degree,
    radial_return,
    read_snapshot,
    run,
    scene_names,
    scene_yaml,
)

__all__ = [
    "ConfigError",
    "NumericError",
    "OutOfDomainError",
    "Simulation",
    "constraint_ratio",
    "eval_basis_1d",
    "eval_basis_3d",
    "normalize_config",
    "projection_degree",
    "radial_return",
    "read_snapshot",
    "run",
    "scene_names",
    "scene_yaml",
]
