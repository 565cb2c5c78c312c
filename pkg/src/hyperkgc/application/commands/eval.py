"""
评估命令：读取检查点与数据集 → 过滤排名评估 → 输出 TSV/YAML 报告
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, TypedDict

from hyperkgc.application.evaluation.candidates import FilterIndex
from hyperkgc.application.evaluation.ranking import ReifiedRanker, evaluate
from hyperkgc.application.evaluation.report import EvalReport
from hyperkgc.domain.models.model_config import ModelKind
from hyperkgc.domain.services.conversions import translate_facts
from hyperkgc.domain.services.splits import missing_positions_subset
from hyperkgc.infrastructure.checkpoints.checkpoint import load_checkpoint
from hyperkgc.infrastructure.config.training_defaults import get_training_defaults
from hyperkgc.infrastructure.datasets.fact_files import load_dataset
from hyperkgc.shared.constants import (
    EVAL_REPORT_TSV_FILENAME,
    EVAL_REPORT_YAML_FILENAME,
    OUTPUT_DIR,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalOptions:
    data: Path
    checkpoint: Path
    out: Optional[Path] = None
    missing_positions: bool = False
    hits_at: Optional[Tuple[int, ...]] = None
    show_progress: bool = False


EvalCommandResult = TypedDict(
    "EvalCommandResult",
    {
        "report": EvalReport,
        "report_text": str,
        "tsv_path": str,
        "yaml_path": str,
        "facts_evaluated": int,
    },
)


def run_eval(options: EvalOptions) -> EvalCommandResult:
    """
    Raises:
        VocabMismatchError: 数据集词表哈希与检查点不一致
        EmptyReportError: 待评估的测试事实为空
    """
    checkpoint = load_checkpoint(options.checkpoint)
    dataset = load_dataset(options.data, require_test=True)
    checkpoint.check_dataset(dataset.vocab)

    test = list(dataset.test)
    if options.missing_positions:
        test = missing_positions_subset(dataset.train, test)
        logger.info("缺失位置子集：%d / %d 条测试事实", len(test), len(dataset.test))

    hits_at = options.hits_at or get_training_defaults().evaluation.hits_at
    params = checkpoint.params

    if params.config.kind is ModelKind.RSIMPLE:
        training = checkpoint.training
        defaults = get_training_defaults().training
        ranker = ReifiedRanker(
            params,
            checkpoint.vocab,
            dataset.vocab,
            steps=int(training.get("aux_fit_steps", defaults.aux_fit_steps)),
            lr=float(training.get("lr", defaults.lr)),
            ratio=int(training.get("negative_ratio", defaults.negative_ratio)),
            seed=checkpoint.seed,
        )
        index = FilterIndex.build(dataset.all_facts())
        report = evaluate(
            params,
            test,
            index,
            hits_at=hits_at,
            ranker=ranker,
            show_progress=options.show_progress,
        )
    else:
        known = translate_facts(dataset.all_facts(), dataset.vocab, checkpoint.vocab)
        mapped_test = translate_facts(test, dataset.vocab, checkpoint.vocab)
        report = evaluate(
            params,
            mapped_test,
            FilterIndex.build(known),
            hits_at=hits_at,
            show_progress=options.show_progress,
        )

    out_dir = options.out or OUTPUT_DIR
    out_dir.mkdir(parents=True, exist_ok=True)
    tsv_path = out_dir / EVAL_REPORT_TSV_FILENAME
    yaml_path = out_dir / EVAL_REPORT_YAML_FILENAME
    report_text = report.to_tsv()
    tsv_path.write_text(report_text, encoding="utf-8")
    yaml_path.write_text(report.to_yaml(), encoding="utf-8")
    logger.info("评估报告：%s / %s", tsv_path, yaml_path)

    return {
        "report": report,
        "report_text": report_text,
        "tsv_path": str(tsv_path),
        "yaml_path": str(yaml_path),
        "facts_evaluated": len(test),
    }
