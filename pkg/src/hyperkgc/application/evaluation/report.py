"""
评估报告

- 总体 MRR / Hit@t，以及按元数分组的同样指标（行标签 "arity=k"）
- 输出为制表符分隔的表格（pandas 渲染）和 YAML 键值文档
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd
import yaml

from hyperkgc.domain.errors import HyperKGCError

DEFAULT_HITS_AT: Tuple[int, ...] = (1, 3, 10)


class EvaluationError(HyperKGCError):
    """Evaluation error with user-facing message in args[0]."""


class EmptyReportError(EvaluationError):
    """没有任何预测任务"""


@dataclass(frozen=True)
class Metrics:
    mrr: float
    hits: Dict[int, float]
    tasks: int
    facts: int

    @classmethod
    def from_ranks(
        cls, ranks: np.ndarray, facts: int, hits_at: Sequence[int]
    ) -> "Metrics":
        # 排序后再求和，结果与测试集顺序无关
        ranks = np.sort(np.asarray(ranks, dtype=np.float64))
        return cls(
            mrr=float(np.mean(1.0 / ranks)),
            hits={t: float(np.mean(ranks <= t)) for t in hits_at},
            tasks=int(ranks.size),
            facts=facts,
        )

    def row(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"mrr": self.mrr}
        for t, value in sorted(self.hits.items()):
            out[f"hit@{t}"] = value
        out["tasks"] = self.tasks
        out["facts"] = self.facts
        return out


@dataclass(frozen=True)
class EvalReport:
    overall: Metrics
    per_arity: Dict[int, Metrics] = field(default_factory=dict)

    @property
    def mrr(self) -> float:
        return self.overall.mrr

    @property
    def hits(self) -> Dict[int, float]:
        return self.overall.hits

    @property
    def tasks(self) -> int:
        """K = Σ |r|"""
        return self.overall.tasks

    def hit(self, t: int) -> float:
        return self.overall.hits[t]

    def to_frame(self) -> pd.DataFrame:
        rows = {"all": self.overall.row()}
        for arity in sorted(self.per_arity):
            rows[f"arity={arity}"] = self.per_arity[arity].row()
        frame = pd.DataFrame.from_dict(rows, orient="index")
        frame.index.name = "subset"
        return frame

    def to_tsv(self) -> str:
        return self.to_frame().to_csv(sep="\t", float_format="%.6f")

    def to_mapping(self) -> Dict[str, Any]:
        return {
            "overall": self.overall.row(),
            "per_arity": {
                f"arity={arity}": self.per_arity[arity].row()
                for arity in sorted(self.per_arity)
            },
        }

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_mapping(), sort_keys=False, allow_unicode=True)


def build_report(
    fact_ranks: Iterable[Tuple[int, Sequence[int]]],
    hits_at: Sequence[int] = DEFAULT_HITS_AT,
) -> EvalReport:
    """
    Args:
        fact_ranks: 每条测试事实的 (元数, 各位置的名次)

    Raises:
        EmptyReportError: 没有任何预测任务
    """
    hits_at = sorted(set(hits_at))
    all_ranks: List[int] = []
    by_arity: Dict[int, List[int]] = {}
    fact_counts: Dict[int, int] = {}
    for arity, ranks in fact_ranks:
        all_ranks.extend(ranks)
        by_arity.setdefault(arity, []).extend(ranks)
        fact_counts[arity] = fact_counts.get(arity, 0) + 1

    if not all_ranks:
        raise EmptyReportError("测试集为空，无法生成评估报告")

    return EvalReport(
        overall=Metrics.from_ranks(
            np.array(all_ranks), sum(fact_counts.values()), hits_at
        ),
        per_arity={
            arity: Metrics.from_ranks(np.array(ranks), fact_counts[arity], hits_at)
            for arity, ranks in sorted(by_arity.items())
        },
    )
