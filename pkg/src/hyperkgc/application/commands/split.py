from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple, TypedDict

import numpy as np

from hyperkgc.domain.models.fact import Dataset, DatasetError, Vocab, dataset_statistics
from hyperkgc.domain.services.splits import missing_positions_subset, random_split
from hyperkgc.infrastructure.datasets.fact_files import (
    load_dataset,
    read_facts,
    write_dataset,
    write_facts,
)
from hyperkgc.shared.constants import MISSING_POSITIONS_FILENAME, OUTPUT_DIR

logger = logging.getLogger(__name__)

DEFAULT_FRACTIONS: Tuple[float, float, float] = (0.8, 0.1, 0.1)


@dataclass(frozen=True)
class SplitOptions:
    """
    - data 为单个事实文件：按 fractions（train, valid, test）随机划分
    - data 为数据集目录且给出 holdout_valid：从 train 中随机留出该比例作为 valid，test 保持不变
    """

    data: Path
    out: Optional[Path] = None
    fractions: Tuple[float, float, float] = DEFAULT_FRACTIONS
    holdout_valid: Optional[float] = None
    missing_positions: bool = False
    seed: int = 0


SplitCommandResult = TypedDict(
    "SplitCommandResult",
    {
        "out_dir": str,
        "statistics": Dict[str, int],
        "missing_positions": Optional[int],
    },
)


def _split_dataset(options: SplitOptions, rng: np.random.Generator) -> Dataset:
    if options.holdout_valid is not None:
        if not options.data.is_dir():
            raise DatasetError("--holdout-valid 需要数据集目录作为输入")
        if not 0.0 < options.holdout_valid < 1.0:
            raise DatasetError(f"holdout 比例必须在 (0, 1) 之间：{options.holdout_valid}")
        source = load_dataset(options.data)
        train, held = random_split(
            source.train, [1.0 - options.holdout_valid, options.holdout_valid], rng
        )
        if source.valid:
            logger.warning("输入已有 valid（%d 条），与留出部分合并", len(source.valid))
        return Dataset(source.vocab, train, [*source.valid, *held], list(source.test))

    if options.data.is_dir():
        raise DatasetError("按比例划分需要单个事实文件作为输入")
    vocab = Vocab()
    facts = read_facts(options.data, vocab)
    unique = list(dict.fromkeys(facts))
    if len(unique) != len(facts):
        logger.warning("输入中有 %d 条重复事实，已去重", len(facts) - len(unique))
    facts = unique
    train, valid, test = random_split(facts, list(options.fractions), rng)
    return Dataset(vocab, train, valid, test)


def run_split(options: SplitOptions) -> SplitCommandResult:
    rng = np.random.default_rng(options.seed)
    dataset = _split_dataset(options, rng)
    dataset.validate()

    out_dir = options.out or OUTPUT_DIR / "split"
    write_dataset(out_dir, dataset)

    missing_count: Optional[int] = None
    if options.missing_positions:
        missing = missing_positions_subset(dataset.train, dataset.test)
        write_facts(out_dir / MISSING_POSITIONS_FILENAME, missing, dataset.vocab)
        missing_count = len(missing)

    stats = dataset_statistics(dataset)
    logger.info("划分完成：%s", stats)
    return {
        "out_dir": str(out_dir),
        "statistics": stats,
        "missing_positions": missing_count,
    }
