from __future__ import annotations

from dataclasses import dataclass
from typing import Dict

import numpy as np

from hyperkgc.domain.models.params import Gradients, ModelParams

DEFAULT_EPSILON = 1e-10


@dataclass
class OptimizerState:
    """Adagrad 累积平方梯度，形状与参数一致"""

    accumulators: Dict[str, np.ndarray]
    epsilon: float = DEFAULT_EPSILON

    @classmethod
    def for_params(
        cls, params: ModelParams, epsilon: float = DEFAULT_EPSILON
    ) -> "OptimizerState":
        return cls({name: np.zeros_like(arr) for name, arr in params.items()}, epsilon)


def adagrad_step(
    theta: np.ndarray,
    rows: np.ndarray,
    grad: np.ndarray,
    acc: np.ndarray,
    *,
    lr: float,
    epsilon: float,
) -> None:
    """对 theta[rows] 原地做一步 Adagrad；rows 必须互不相同"""
    acc_rows = acc[rows] + grad * grad
    acc[rows] = acc_rows
    theta[rows] -= lr * grad / (np.sqrt(acc_rows) + epsilon)


def adagrad_update(
    params: ModelParams, grads: Gradients, state: OptimizerState, lr: float
) -> None:
    """
    稀疏 Adagrad：acc += g²；θ −= lr·g / (√acc + ε)。
    只更新梯度中出现的行；g = 0 的坐标保持不变。
    """
    for name, grad in grads.items():
        if grad.index.size == 0:
            continue
        adagrad_step(
            params.arrays[name],
            grad.index,
            grad.values,
            state.accumulators[name],
            lr=lr,
            epsilon=state.epsilon,
        )
