"""Metropolis-within-Gibbs samplers, optimal-scaling theory and experiment drivers."""

from ._core import (
    ConfigError,
    InvalidParameter,
    command,
    exact_sample,
    grad_log_density,
    log_density,
    run_chain,
    selftest,
    sweep,
    theory,
    tune,
)

__all__ = [
    "ConfigError",
    "InvalidParameter",
    "command",
    "exact_sample",
    "grad_log_density",
    "log_density",
    "run_chain",
    "selftest",
    "sweep",
    "theory",
    "tune",
]
