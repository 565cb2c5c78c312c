"""
训练命令：读取数据集 → 训练 → 写检查点与训练日志（可选：嵌入维度扫描）
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, TypedDict, TypeVar

import pandas as pd

from hyperkgc.application.evaluation.candidates import FilterIndex
from hyperkgc.application.evaluation.ranking import ReifiedRanker, evaluate
from hyperkgc.application.training.trainer import TrainingConfig, TrainingResult, train
from hyperkgc.domain.models.fact import Dataset, DatasetError, Fact
from hyperkgc.domain.models.model_config import ModelConfig, ModelKind
from hyperkgc.domain.models.params import ModelParams
from hyperkgc.domain.services.conversions import reify, reify_relations
from hyperkgc.infrastructure.checkpoints.checkpoint import (
    Checkpoint,
    save_checkpoint,
    vocab_hash,
)
from hyperkgc.infrastructure.config.training_defaults import get_training_defaults
from hyperkgc.infrastructure.datasets.fact_files import load_dataset
from hyperkgc.shared.constants import (
    CHECKPOINT_FILENAME,
    DIMENSION_SWEEP_FILENAME,
    OUTPUT_DIR,
    TRAINING_LOG_FILENAME,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainOptions:
    """命令行参数；None 表示取 training_defaults.yaml 中的默认值"""

    model: str
    data: Path
    out: Optional[Path] = None
    dim: Optional[int] = None
    dims: Optional[Tuple[int, ...]] = None
    lr: Optional[float] = None
    negative_ratio: Optional[int] = None
    dropout: Optional[float] = None
    epochs: Optional[int] = None
    batch_size: Optional[int] = None
    eval_every: Optional[int] = None
    filters: Optional[int] = None
    filter_length: Optional[int] = None
    stride: Optional[int] = None
    seed: Optional[int] = None
    aux_fit_steps: Optional[int] = None
    float64: bool = False
    show_progress: bool = False


TrainCommandResult = TypedDict(
    "TrainCommandResult",
    {
        "checkpoint_path": str,
        "log_path": str,
        "best_epoch": int,
        "best_valid_mrr": Optional[float],
        "sweep_path": Optional[str],
    },
)


T = TypeVar("T")


def _pick(value: Optional[T], default: T) -> T:
    return default if value is None else value


def resolve_training_config(options: TrainOptions) -> TrainingConfig:
    d = get_training_defaults().training
    return TrainingConfig(
        negative_ratio=_pick(options.negative_ratio, d.negative_ratio),
        lr=_pick(options.lr, d.lr),
        dropout=_pick(options.dropout, d.dropout),
        epochs=_pick(options.epochs, d.epochs),
        batch_size=_pick(options.batch_size, d.batch_size),
        eval_every=_pick(options.eval_every, d.eval_every),
        seed=_pick(options.seed, d.seed),
        adagrad_epsilon=d.adagrad_epsilon,
        aux_fit_steps=_pick(options.aux_fit_steps, d.aux_fit_steps),
        show_progress=options.show_progress,
    )


@dataclass
class PreparedData:
    """模型训练所用的数据（r-simple 为具体化后的数据），以及验证回调"""

    dataset: Dataset
    source: Dataset
    max_arity: int


def prepare_data(kind: ModelKind, source: Dataset) -> PreparedData:
    if kind is not ModelKind.RSIMPLE:
        return PreparedData(source, source, source.vocab.max_arity)

    unary = [f for f in source.all_facts() if f.arity == 1]
    if unary:
        raise DatasetError(f"r-simple 不支持一元关系：数据集中有 {len(unary)} 条一元事实")
    vocab = source.vocab.copy()
    reify_relations(vocab)
    train_facts = reify(list(source.train), vocab)
    logger.info(
        "r-simple：训练集具体化 %d → %d 条二元事实，新增辅助实体 %d 个",
        len(source.train),
        len(train_facts),
        vocab.num_entities - source.vocab.num_entities,
    )
    return PreparedData(Dataset(vocab, train_facts), source, 2)


def build_model_config(
    kind: ModelKind, prepared: PreparedData, options: TrainOptions, dim: int
) -> ModelConfig:
    d = get_training_defaults().model
    vocab = prepared.dataset.vocab
    return ModelConfig(
        kind=kind,
        num_entities=vocab.num_entities,
        num_relations=vocab.num_relations,
        dim=dim,
        max_arity=prepared.max_arity,
        filters=_pick(options.filters, d.filters),
        filter_length=_pick(options.filter_length, d.filter_length),
        stride=_pick(options.stride, d.stride),
        init_std=d.init_std,
    )


def make_evaluator(
    kind: ModelKind,
    prepared: PreparedData,
    training_config: TrainingConfig,
    facts: Sequence[Fact],
    index: FilterIndex,
) -> Callable[[ModelParams], Optional[float]]:
    """返回"参数 → 给定事实上的过滤 MRR"；facts 为空时返回 None"""
    hits_at = get_training_defaults().evaluation.hits_at

    def run(params: ModelParams) -> Optional[float]:
        if not facts:
            return None
        ranker = None
        if kind is ModelKind.RSIMPLE:
            ranker = ReifiedRanker(
                params,
                prepared.dataset.vocab,
                prepared.source.vocab,
                steps=training_config.aux_fit_steps,
                lr=training_config.lr,
                ratio=training_config.negative_ratio,
                seed=training_config.seed,
            )
        return evaluate(params, facts, index, hits_at=hits_at, ranker=ranker).mrr

    return run


def _write_log(path: Path, result: TrainingResult) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        "".join(f"{line}\n" for line in result.log_lines()), encoding="utf-8"
    )


def _train_one(
    kind: ModelKind,
    prepared: PreparedData,
    options: TrainOptions,
    training_config: TrainingConfig,
    dim: int,
    out_dir: Path,
    index: FilterIndex,
) -> Tuple[TrainingResult, Path, Path]:
    model_config = build_model_config(kind, prepared, options, dim)
    validator = None
    if prepared.source.valid:
        validator = make_evaluator(
            kind, prepared, training_config, prepared.source.valid, index
        )

    logger.info("开始训练：model=%s，d=%d，δ=%d", kind, dim, model_config.max_arity)
    result = train(prepared.dataset, model_config, training_config, validator=validator)

    checkpoint = Checkpoint(
        params=result.params,
        vocab=prepared.dataset.vocab,
        dataset_vocab_hash=vocab_hash(prepared.source.vocab),
        seed=training_config.seed,
        training={
            "best_epoch": result.best_epoch,
            "best_valid_mrr": result.best_valid_mrr,
            "epochs": training_config.epochs,
            "lr": training_config.lr,
            "negative_ratio": training_config.negative_ratio,
            "dropout": training_config.dropout,
            "batch_size": training_config.batch_size,
            "aux_fit_steps": training_config.aux_fit_steps,
        },
    )
    checkpoint_path = out_dir / CHECKPOINT_FILENAME
    log_path = out_dir / TRAINING_LOG_FILENAME
    save_checkpoint(
        checkpoint_path, checkpoint, dtype="<f8" if options.float64 else "<f4"
    )
    _write_log(log_path, result)
    logger.info("训练日志：%s", log_path)
    return result, checkpoint_path, log_path


def run_train(options: TrainOptions) -> TrainCommandResult:
    """
    Raises:
        DatasetError / ModelConfigError / TrainingError: 数据或配置非法、训练发散
    """
    kind = ModelKind.from_str(options.model)
    training_config = resolve_training_config(options)
    out_dir = options.out or OUTPUT_DIR
    source = load_dataset(options.data)
    prepared = prepare_data(kind, source)
    index = FilterIndex.build(source.all_facts())

    default_dim = get_training_defaults().model.dim
    if not options.dims:
        result, ckpt, log = _train_one(
            kind,
            prepared,
            options,
            training_config,
            _pick(options.dim, default_dim),
            out_dir,
            index,
        )
        return {
            "checkpoint_path": str(ckpt),
            "log_path": str(log),
            "best_epoch": result.best_epoch,
            "best_valid_mrr": result.best_valid_mrr,
            "sweep_path": None,
        }

    rows: List[dict[str, object]] = []
    last: Optional[Tuple[TrainingResult, Path, Path]] = None
    for dim in options.dims:
        last = _train_one(
            kind,
            prepared,
            options,
            training_config,
            dim,
            out_dir / f"dim_{dim}",
            index,
        )
        test_mrr = make_evaluator(
            kind, prepared, training_config, source.test, index
        )(last[0].params)
        rows.append(
            {"dim": dim, "valid_mrr": last[0].best_valid_mrr, "test_mrr": test_mrr}
        )

    sweep_path = out_dir / DIMENSION_SWEEP_FILENAME
    sweep_path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows, columns=["dim", "valid_mrr", "test_mrr"]).to_csv(
        sweep_path, sep="\t", index=False, float_format="%.6f", na_rep="-"
    )
    logger.info("维度扫描结果：%s", sweep_path)
    assert last is not None
    result, ckpt, log = last
    return {
        "checkpoint_path": str(ckpt),
        "log_path": str(log),
        "best_epoch": result.best_epoch,
        "best_valid_mrr": result.best_valid_mrr,
        "sweep_path": str(sweep_path),
    }
