from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple

import torch

from ..errors import NonFiniteGradientError, ShapeMismatchError
from ..models import TrainConfig


@dataclass
class OptimizerState:
    """Adam moment buffers keyed by parameter name, plus the global step."""

    m: Dict[str, torch.Tensor] = field(default_factory=dict)
    v: Dict[str, torch.Tensor] = field(default_factory=dict)
    t: int = 0

    @classmethod
    def fresh(cls, params: Mapping[str, torch.Tensor]) -> "OptimizerState":
        return cls(
            m={name: torch.zeros_like(value) for name, value in params.items()},
            v={name: torch.zeros_like(value) for name, value in params.items()},
            t=0,
        )


def adam_step(params: Mapping[str, torch.Tensor],
              grads: Mapping[str, torch.Tensor],
              state: OptimizerState,
              config: TrainConfig) -> Tuple[Dict[str, torch.Tensor], OptimizerState]:
    """One bias-corrected Adam update; inputs are left untouched.

    Raises NonFiniteGradientError before anything is computed if any
    gradient holds NaN or infinity.
    """
    for name, value in params.items():
        if name not in grads:
            raise ShapeMismatchError(f"no gradient for parameter '{name}'")
        if grads[name].shape != value.shape:
            raise ShapeMismatchError(
                f"gradient for '{name}' has shape {tuple(grads[name].shape)}, parameter {tuple(value.shape)}"
            )
        if not torch.isfinite(grads[name]).all():
            raise NonFiniteGradientError(name)

    t = state.t + 1
    beta1, beta2 = config.beta1, config.beta2
    correction1 = 1.0 - beta1 ** t
    correction2 = 1.0 - beta2 ** t

    updated: Dict[str, torch.Tensor] = {}
    next_state = OptimizerState(t=t)
    for name, value in params.items():
        g = grads[name]
        m = state.m.get(name, torch.zeros_like(value))
        v = state.v.get(name, torch.zeros_like(value))
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        updated[name] = value - config.learning_rate * m_hat / (torch.sqrt(v_hat) + config.epsilon)
        next_state.m[name] = m
        next_state.v[name] = v
    return updated, next_state
