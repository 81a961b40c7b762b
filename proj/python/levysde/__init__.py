"""Levy-driven SDE simulation, Gaussian quasi-likelihood fitting and
Levy-measure moment inference."""

from ._core import (
    __version__,
    estimate,
    infer,
    nig_cumulant,
    residuals,
    run_study,
    simulate,
)

__all__ = [
    "__version__",
    "estimate",
    "infer",
    "nig_cumulant",
    "residuals",
    "run_study",
    "simulate",
]
