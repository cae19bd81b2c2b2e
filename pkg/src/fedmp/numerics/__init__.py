"""Dense float64 kernels, splittable RNG streams, reverse-mode tape, Adam."""

from .optim import AdamHyper, AdamState, TapedAdamState, adam_step, taped_adam_step
from .rng import RngStream, mix64, sample_gaussian
from .tape import (
    Var,
    backward,
    grad_vars,
    leaf,
    lift,
    value_and_grad,
)

__all__ = [
    "AdamHyper",
    "AdamState",
    "TapedAdamState",
    "adam_step",
    "taped_adam_step",
    "RngStream",
    "mix64",
    "sample_gaussian",
    "Var",
    "backward",
    "grad_vars",
    "leaf",
    "lift",
    "value_and_grad",
]
