"""
小批量训练循环

每个 epoch：按种子打乱训练集 → 每个批量重新采样负样本 → 前向/反向（带 dropout）→ Adagrad。
每 eval_every 个 epoch（以及最后一个 epoch）记录一次验证集 MRR，返回验证 MRR 最好的那一次的参数。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
from tqdm import tqdm

from hyperkgc.application.training.errors import (
    TrainingConfigError,
    TrainingDivergedError,
)
from hyperkgc.application.training.loss import TrainingBatch, loss_and_gradients
from hyperkgc.application.training.optimizer import (
    DEFAULT_EPSILON,
    OptimizerState,
    adagrad_update,
)
from hyperkgc.domain.models.fact import Dataset
from hyperkgc.domain.models.model_config import ModelConfig
from hyperkgc.domain.models.params import ModelParams, init_params
from hyperkgc.domain.services.scoring import build_model

logger = logging.getLogger(__name__)

Validator = Callable[[ModelParams], Optional[float]]


@dataclass(frozen=True)
class TrainingConfig:
    negative_ratio: int = 10
    lr: float = 0.05
    dropout: float = 0.0
    epochs: int = 500
    batch_size: int = 128
    eval_every: int = 50
    seed: int = 0
    adagrad_epsilon: float = DEFAULT_EPSILON
    aux_fit_steps: int = 100
    show_progress: bool = False

    def __post_init__(self) -> None:
        if self.negative_ratio < 1:
            raise TrainingConfigError(f"负样本比例 N 必须 ≥ 1：{self.negative_ratio}")
        if self.batch_size < 1:
            raise TrainingConfigError(f"batch_size 必须 ≥ 1：{self.batch_size}")
        if self.epochs < 1:
            raise TrainingConfigError(f"epochs 必须 ≥ 1：{self.epochs}")
        if self.eval_every < 1:
            raise TrainingConfigError(f"eval_every 必须 ≥ 1：{self.eval_every}")
        if not 0.0 <= self.dropout < 1.0:
            raise TrainingConfigError(f"dropout 必须在 [0, 1) 之间：{self.dropout}")
        if self.lr < 0:
            raise TrainingConfigError(f"学习率不能为负：{self.lr}")
        if self.adagrad_epsilon <= 0:
            raise TrainingConfigError(f"adagrad_epsilon 必须 > 0：{self.adagrad_epsilon}")
        if self.aux_fit_steps < 0:
            raise TrainingConfigError(f"aux_fit_steps 不能为负：{self.aux_fit_steps}")


@dataclass(frozen=True)
class TrainingLogEntry:
    epoch: int
    loss: float
    valid_mrr: Optional[float]

    def to_line(self) -> str:
        mrr = "-" if self.valid_mrr is None else f"{self.valid_mrr:.6f}"
        return f"{self.epoch}\t{self.loss:.6f}\t{mrr}"


@dataclass
class TrainingResult:
    params: ModelParams
    best_epoch: int
    best_valid_mrr: Optional[float]
    log: List[TrainingLogEntry] = field(default_factory=list)

    def log_lines(self) -> List[str]:
        return [entry.to_line() for entry in self.log]


def _check_compatible(dataset: Dataset, model_config: ModelConfig) -> None:
    vocab = dataset.vocab
    if model_config.num_entities != vocab.num_entities:
        raise TrainingConfigError(
            f"模型实体数 {model_config.num_entities} 与数据集 {vocab.num_entities} 不一致"
        )
    if model_config.num_relations != vocab.num_relations:
        raise TrainingConfigError(
            f"模型关系数 {model_config.num_relations} 与数据集 {vocab.num_relations} 不一致"
        )
    too_long = [f for f in dataset.train if f.arity > model_config.max_arity]
    if too_long:
        raise TrainingConfigError(
            f"训练集中有 {len(too_long)} 条事实的元数超过 δ={model_config.max_arity}"
        )


def train(
    dataset: Dataset,
    model_config: ModelConfig,
    training_config: TrainingConfig,
    *,
    validator: Optional[Validator] = None,
) -> TrainingResult:
    """
    Args:
        dataset: 训练数据；只使用 dataset.train
        validator: 给定参数快照返回验证 MRR；None 或返回 None 时不做模型选择，保留最后一个 epoch

    Raises:
        TrainingConfigError: 训练集为空或与模型配置不一致
        TrainingDivergedError: 损失变为 NaN/Inf
    """
    if not dataset.train:
        raise TrainingConfigError("训练集为空")
    _check_compatible(dataset, model_config)

    cfg = training_config
    rng = np.random.default_rng(cfg.seed)
    params = init_params(model_config, rng)
    state = OptimizerState.for_params(params, cfg.adagrad_epsilon)
    model = build_model(model_config)
    train_facts = list(dataset.train)
    num_entities = model_config.num_entities

    result = TrainingResult(params=params.copy(), best_epoch=0, best_valid_mrr=None)
    if validator is None:
        logger.warning("未提供验证集，训练结束后保留最后一个 epoch 的参数")

    epochs = tqdm(
        range(1, cfg.epochs + 1),
        desc="train",
        unit="epoch",
        disable=not cfg.show_progress,
    )
    for epoch in epochs:
        order = rng.permutation(len(train_facts))
        epoch_loss = 0.0
        for start in range(0, len(order), cfg.batch_size):
            facts = [train_facts[i] for i in order[start : start + cfg.batch_size]]
            batch = TrainingBatch.sample(
                facts,
                ratio=cfg.negative_ratio,
                num_entities=num_entities,
                max_arity=model_config.max_arity,
                rng=rng,
            )
            loss, grads = loss_and_gradients(
                model, params, batch, rng=rng, dropout=cfg.dropout
            )
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    f"第 {epoch} 个 epoch、第 {start // cfg.batch_size} 个批量的损失为 {loss}"
                    f"（lr={cfg.lr}，dropout={cfg.dropout}）"
                )
            logger.debug("epoch %d batch %d loss %.6f", epoch, start // cfg.batch_size, loss)
            adagrad_update(params, grads, state, cfg.lr)
            epoch_loss += loss

        if not params.all_finite():
            raise TrainingDivergedError(f"第 {epoch} 个 epoch 后参数出现 NaN/Inf")

        if epoch % cfg.eval_every != 0 and epoch != cfg.epochs:
            continue

        valid_mrr = validator(params.copy()) if validator is not None else None
        entry = TrainingLogEntry(epoch=epoch, loss=epoch_loss, valid_mrr=valid_mrr)
        result.log.append(entry)
        logger.info("训练日志：%s", entry.to_line())

        if valid_mrr is None:
            if result.best_valid_mrr is None:
                result.params = params.copy()
                result.best_epoch = epoch
        elif result.best_valid_mrr is None or valid_mrr > result.best_valid_mrr:
            result.params = params.copy()
            result.best_epoch = epoch
            result.best_valid_mrr = valid_mrr

    return result
