"""Bias-corrected Adam, applied elementwise across the model tensors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import ModelParams


@dataclass
class AdamState:
    m: ModelParams
    v: ModelParams
    t: int = 0

    @classmethod
    def zeros(cls, params: ModelParams) -> "AdamState":
        return cls(m=params.zeros_like(), v=params.zeros_like(), t=0)


def adam_step(params: ModelParams, grads: ModelParams, state: AdamState,
              cfg) -> tuple[ModelParams, AdamState]:
    """One update: m, v moment tracking with bias correction, then the step."""
    t = state.t + 1
    new_params, new_m, new_v = {}, {}, {}
    for name in ModelParams.TENSOR_NAMES:
        g = getattr(grads, name)
        m = cfg.beta1 * getattr(state.m, name) + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * getattr(state.v, name) + (1.0 - cfg.beta2) * g * g
        m_hat = m / (1.0 - cfg.beta1 ** t)
        v_hat = v / (1.0 - cfg.beta2 ** t)
        new_params[name] = getattr(params, name) - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
        new_m[name] = m
        new_v[name] = v
    return ModelParams(**new_params), AdamState(ModelParams(**new_m), ModelParams(**new_v), t)
