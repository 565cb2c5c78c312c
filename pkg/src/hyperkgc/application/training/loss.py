"""
softmax + 负对数似然损失

对每个正样本 x′ 及其负样本集合 T_neg(x′)：
    loss(x′) = −φ(x′) + log( exp(φ(x′)) + Σ_{x∈T_neg} exp(φ(x)) )
批量内求和（不取平均）。log-sum-exp 由 scipy.special.logsumexp 计算（内部做最大值平移）。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from hyperkgc.application.training.errors import DegenerateLossError
from hyperkgc.application.training.negatives import corrupt_batch
from hyperkgc.domain.models.fact import Fact
from hyperkgc.domain.models.params import Gradients, ModelParams, merge_gradients
from hyperkgc.domain.services.scoring import FactBatch, ScoreModel, build_model


@dataclass(frozen=True)
class TrainingBatch:
    """
    正样本与其负样本。negatives 按正样本分组连续排列，owner[m] 为所属正样本下标。
    """

    positives: FactBatch
    negatives: FactBatch
    owner: np.ndarray

    @classmethod
    def sample(
        cls,
        facts: Sequence[Fact],
        *,
        ratio: int,
        num_entities: int,
        max_arity: int,
        rng: np.random.Generator,
    ) -> "TrainingBatch":
        positives = FactBatch.from_facts(facts, max_arity)
        corrupted = corrupt_batch(positives, ratio, num_entities, rng)
        return cls(positives, corrupted.negatives, corrupted.owner)

    @classmethod
    def from_groups(
        cls,
        positives: Sequence[Fact],
        negatives: Sequence[Sequence[Fact]],
        max_arity: int,
    ) -> "TrainingBatch":
        """用显式给出的负样本构造批量（测试与辅助实体拟合用）"""
        if len(positives) != len(negatives):
            raise ValueError("正样本数与负样本组数不一致")
        flat: List[Fact] = [neg for group in negatives for neg in group]
        owner = np.repeat(
            np.arange(len(positives)), [len(group) for group in negatives]
        ).astype(np.int64)
        return cls(
            FactBatch.from_facts(positives, max_arity),
            FactBatch.from_facts(flat, max_arity),
            owner,
        )

    def group_layout(self) -> Tuple[np.ndarray, int]:
        """返回每个负样本在所属组内的序号，以及最大组宽"""
        size = len(self.positives)
        counts = np.bincount(self.owner, minlength=size)
        if size and counts.min() == 0:
            empty = int(np.argmin(counts))
            raise DegenerateLossError(f"第 {empty} 个正样本没有负样本")
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        slots = np.arange(len(self.owner)) - starts[self.owner]
        width = int(counts.max()) if size else 0
        return slots, width


def _logits(
    pos_scores: np.ndarray,
    neg_scores: np.ndarray,
    batch: TrainingBatch,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """拼成 (B, 1 + W) 的打分矩阵与有效位掩码；第 0 列为正样本"""
    slots, width = batch.group_layout()
    size = pos_scores.shape[0]
    logits = np.zeros((size, 1 + width), dtype=np.float64)
    mask = np.zeros_like(logits)
    logits[:, 0] = pos_scores
    mask[:, 0] = 1.0
    logits[batch.owner, 1 + slots] = neg_scores
    mask[batch.owner, 1 + slots] = 1.0
    return logits, mask, slots


def _loss_from_logits(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return logsumexp(logits, b=mask, axis=1) - logits[:, 0]


def loss_and_gradients(
    model: ScoreModel,
    params: ModelParams,
    batch: TrainingBatch,
    *,
    rng: Optional[np.random.Generator] = None,
    dropout: float = 0.0,
) -> Tuple[float, Gradients]:
    """
    一次前向 + 反向：返回 (批量损失, ∂loss/∂θ)。

    ∂loss/∂φ_k = softmax_k − [k 为正样本]
    """
    if len(batch.positives) == 0:
        return 0.0, {}
    pos = model.forward(params, batch.positives, rng=rng, dropout=dropout)
    neg = model.forward(params, batch.negatives, rng=rng, dropout=dropout)

    logits, mask, slots = _logits(pos.scores, neg.scores, batch)
    lse = logsumexp(logits, b=mask, axis=1, keepdims=True)
    probs = np.exp(logits - lse) * mask
    loss = float(np.sum(lse[:, 0] - logits[:, 0]))

    up_pos = probs[:, 0] - 1.0
    up_neg = probs[batch.owner, 1 + slots]
    grads = merge_gradients(
        [
            model.backward(params, pos, up_pos),
            model.backward(params, neg, up_neg),
        ]
    )
    return loss, grads


def batch_loss(params: ModelParams, batch: TrainingBatch) -> float:
    """不带 dropout 的批量损失"""
    if len(batch.positives) == 0:
        return 0.0
    model = build_model(params.config)
    pos = model.scores(params, batch.positives)
    neg = model.scores(params, batch.negatives)
    logits, mask, _ = _logits(pos, neg, batch)
    return float(np.sum(_loss_from_logits(logits, mask)))


def loss_gradients(params: ModelParams, batch: TrainingBatch) -> Gradients:
    """不带 dropout 的批量损失梯度（行稀疏）"""
    _, grads = loss_and_gradients(build_model(params.config), params, batch)
    return grads
