"""
r-SimplE 测试阶段的辅助实体拟合

具体化后的事实形如 r_i(aux, e_i)，aux 只出现在头位置。二元 SimplE 对头实体是线性的：
    φ(r(aux, t)) = Σ aux^(1) ⊙ r^(1) ⊙ t^(2) + Σ aux^(2) ⊙ r^(2) ⊙ t^(1)
因此拟合只需要每个 (r, t) 的系数矩阵，其余参数保持冻结。
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from hyperkgc.application.training.errors import AuxFitError, CannotCorruptError
from hyperkgc.application.training.negatives import draw_excluding
from hyperkgc.application.training.optimizer import DEFAULT_EPSILON, adagrad_step
from hyperkgc.domain.models.fact import Fact
from hyperkgc.domain.models.model_config import ModelKind
from hyperkgc.domain.models.params import ModelParams

logger = logging.getLogger(__name__)


def head_coefficients(
    params: ModelParams, relations: np.ndarray, tails: np.ndarray
) -> np.ndarray:
    """(M,) 关系与 (M,) 尾实体 → (M, 2, d) 系数，使 φ = Σ aux ⊙ coef"""
    R = params["R"][relations]
    T = params["E"][tails]
    return np.stack([R[:, 0] * T[:, 1], R[:, 1] * T[:, 0]], axis=1)


def fit_aux_embedding(
    params: ModelParams,
    observed: Sequence[Fact],
    *,
    steps: int,
    lr: float,
    ratio: int,
    rng: np.random.Generator,
    epsilon: float = DEFAULT_EPSILON,
) -> np.ndarray:
    """
    为一个辅助实体拟合 (2, d) 嵌入。

    Args:
        params: 训练好的 r-simple 参数（只读）
        observed: 以该辅助实体为头的具体化事实；头实体 id 可以不在参数表中
        steps: 梯度步数，0 时直接返回初始化
        lr: Adagrad 学习率
        ratio: 每条观测事实的尾实体负样本数
    """
    if params.config.kind is not ModelKind.RSIMPLE:
        raise AuxFitError(f"辅助实体拟合只适用于 r-simple，当前为 {params.config.kind}")
    if not observed:
        raise AuxFitError("没有观测事实，无法拟合辅助实体嵌入")
    heads = {fact.entities[0] for fact in observed}
    if len(heads) != 1 or any(fact.arity != 2 for fact in observed):
        raise AuxFitError("观测事实必须是同一辅助实体作为头的二元事实")

    num_entities = params.config.num_entities
    if steps > 0 and num_entities < 2:
        raise CannotCorruptError(f"实体数为 {num_entities}，无法替换出不同的实体")

    dim = params.config.dim
    aux = rng.normal(0.0, params.config.init_std, size=(2, dim))
    acc = np.zeros_like(aux)
    rows = np.arange(2)

    relations = np.array([fact.relation for fact in observed], dtype=np.int64)
    tails = np.array([fact.entities[1] for fact in observed], dtype=np.int64)
    positive_coef = head_coefficients(params, relations, tails)  # (F, 2, d)

    for _ in range(steps):
        corrupt = draw_excluding(
            rng, num_entities, np.broadcast_to(tails[:, None], (tails.size, ratio))
        )
        negative_coef = head_coefficients(
            params, np.repeat(relations, ratio), corrupt.reshape(-1)
        ).reshape(tails.size, ratio, 2, dim)
        coef = np.concatenate([positive_coef[:, None], negative_coef], axis=1)
        logits = np.einsum("fkcd,cd->fk", coef, aux)
        probs = np.exp(logits - logsumexp(logits, axis=1, keepdims=True))
        probs[:, 0] -= 1.0
        grad = np.einsum("fk,fkcd->cd", probs, coef)
        adagrad_step(aux, rows, grad, acc, lr=lr, epsilon=epsilon)

    return aux
