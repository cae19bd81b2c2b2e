"""First-order optimizers as pure functions: (params, grads, state) -> (params, state)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from . import tape
from .tape import Var

Array = np.ndarray


@dataclass(frozen=True)
class AdamHyper:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass(frozen=True)
class AdamState:
    m: Array
    v: Array
    t: int

    @classmethod
    def fresh(cls, dim: int) -> "AdamState":
        return cls(np.zeros(dim), np.zeros(dim), 0)


def adam_step(
    params: Array, grads: Array, state: AdamState, hyper: AdamHyper
) -> tuple[Array, AdamState]:
    """One Adam update with bias correction; epsilon sits outside the sqrt."""
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise ShapeError(
            f"adam_step shape mismatch: params {params.shape}, grads {grads.shape}, "
            f"state {state.m.shape}"
        )
    t = state.t + 1
    m = hyper.beta1 * state.m + (1.0 - hyper.beta1) * grads
    v = hyper.beta2 * state.v + (1.0 - hyper.beta2) * grads * grads
    m_hat = m / (1.0 - hyper.beta1**t)
    v_hat = v / (1.0 - hyper.beta2**t)
    new_params = params - hyper.lr * m_hat / (np.sqrt(v_hat) + hyper.eps)
    return new_params, AdamState(m, v, t)


@dataclass(frozen=True)
class TapedAdamState:
    """Adam state carried as tape nodes so updates stay differentiable."""

    m: Var
    v: Var
    t: int

    @classmethod
    def fresh(cls, dim: int) -> "TapedAdamState":
        return cls(tape.lift(np.zeros(dim)), tape.lift(np.zeros(dim)), 0)


def taped_adam_step(
    params: Var, grads: Var, state: TapedAdamState, hyper: AdamHyper
) -> tuple[Var, TapedAdamState]:
    """Same arithmetic as :func:`adam_step`, recorded on the tape.

    Used by unrolled inner solves where gradients must flow through the
    whole optimizer trajectory into whatever produced the training data.
    """
    t = state.t + 1
    m = tape.add(tape.mul(tape.lift(hyper.beta1), state.m),
                 tape.mul(tape.lift(1.0 - hyper.beta1), grads))
    v = tape.add(tape.mul(tape.lift(hyper.beta2), state.v),
                 tape.mul(tape.lift(1.0 - hyper.beta2), tape.square(grads)))
    m_hat = tape.div(m, tape.lift(1.0 - hyper.beta1**t))
    v_hat = tape.div(v, tape.lift(1.0 - hyper.beta2**t))
    step = tape.div(tape.mul(tape.lift(hyper.lr), m_hat),
                    tape.add(tape.sqrt(v_hat), tape.lift(hyper.eps)))
    return tape.sub(params, step), TapedAdamState(m, v, t)
