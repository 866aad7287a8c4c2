"""Truncated Bott-Dirac operators, Gaussian ground-state measures and gauge holonomies."""

from ._core import (
    ConditionVeto,
    ConvergenceError,
    b_squared_spectrum,
    car_violation,
    config_keys,
    convergence,
    dilation_spectrum,
    gaussian_expectation,
    holonomy,
    kernel_residual,
    modes,
    render,
    run,
    subcommands,
    translate_overlap,
    wilson_loop,
)

__all__ = [
    "ConditionVeto",
    "ConvergenceError",
    "b_squared_spectrum",
    "car_violation",
    "config_keys",
    "convergence",
    "dilation_spectrum",
    "gaussian_expectation",
    "holonomy",
    "kernel_residual",
    "modes",
    "render",
    "run",
    "subcommands",
    "translate_overlap",
    "wilson_loop",
]
