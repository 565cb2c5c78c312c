"""
过滤排名与评估

rank = 1 + |{候选 ≠ 真实事实 : φ(候选) > φ(真实事实)}|（严格大于，平分时取乐观名次）。
"""

from __future__ import annotations

import logging
from typing import Dict, List, Optional, Protocol, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from hyperkgc.application.evaluation.candidates import (
    FilterIndex,
    KnownFacts,
    as_filter_index,
    candidate_entities,
)
from hyperkgc.application.evaluation.report import (
    DEFAULT_HITS_AT,
    EvalReport,
    EvaluationError,
    build_report,
)
from hyperkgc.application.training.aux_fit import fit_aux_embedding, head_coefficients
from hyperkgc.domain.models.fact import Fact, Vocab
from hyperkgc.domain.models.model_config import ModelKind
from hyperkgc.domain.models.params import ModelParams
from hyperkgc.domain.services.conversions import reified_relation_name
from hyperkgc.domain.services.scoring import FactBatch, build_model

logger = logging.getLogger(__name__)

_CANDIDATE_CHUNK = 8192


def count_better(true_score: float, candidate_scores: np.ndarray) -> int:
    """平分规则集中在这里：改成 >= 即为悲观名次"""
    return int(np.count_nonzero(candidate_scores > true_score))


class Ranker(Protocol):
    num_entities: int

    def rank(self, fact: Fact, position: int, index: FilterIndex) -> int:
        """position 为 0-indexed"""
        ...


class ModelRanker:
    """直接用批量打分模型对候选打分"""

    def __init__(self, params: ModelParams):
        self.params = params
        self.model = build_model(params.config)
        self.num_entities = params.config.num_entities

    def rank(self, fact: Fact, position: int, index: FilterIndex) -> int:
        candidates = candidate_entities(fact, position, self.num_entities, index)
        true_entity = np.array([fact.entities[position]], dtype=np.int64)
        better = 0
        true_score: Optional[float] = None
        # 每个分块都带上真实事实，保证它和候选走同一条计算路径
        for start in range(0, max(candidates.size, 1), _CANDIDATE_CHUNK):
            chunk = np.concatenate(
                [true_entity, candidates[start : start + _CANDIDATE_CHUNK]]
            )
            batch = FactBatch.with_candidates(
                fact, position, chunk, self.params.config.max_arity
            )
            scores = self.model.scores(self.params, batch)
            true_score = float(scores[0])
            better += count_better(true_score, scores[1:])
        return 1 + better


class ReifiedRanker:
    """
    r-SimplE 在原始（未具体化）测试事实上的排名。

    - 二元事实：直接按 SimplE 对两个位置排名
    - 元数 k ≥ 3：对位置 i，用其余 k−1 条具体化事实拟合辅助实体嵌入，
      然后只对 r__pos_i(aux, ·) 的尾位置排名
    候选与过滤都在数据集的实体编号空间中进行，再映射到模型编号打分。
    """

    def __init__(
        self,
        params: ModelParams,
        model_vocab: Vocab,
        dataset_vocab: Vocab,
        *,
        steps: int,
        lr: float,
        ratio: int,
        seed: int = 0,
    ):
        if params.config.kind is not ModelKind.RSIMPLE:
            raise EvaluationError(f"ReifiedRanker 需要 r-simple 参数，当前为 {params.config.kind}")
        self.params = params
        self.model = build_model(params.config)
        self.model_vocab = model_vocab
        self.dataset_vocab = dataset_vocab
        self.num_entities = dataset_vocab.num_entities
        self.steps = steps
        self.lr = lr
        self.ratio = ratio
        self.seed = seed
        self.entity_map = self._map_entities()
        self._relation_cache: Dict[Tuple[int, int], int] = {}

    def _map_entities(self) -> np.ndarray:
        mapping = np.empty(self.dataset_vocab.num_entities, dtype=np.int64)
        for idx, name in enumerate(self.dataset_vocab.entity_names):
            model_id = self.model_vocab.find_entity(name)
            if model_id is None:
                raise EvaluationError(f"实体 {name!r} 不在模型词表中")
            mapping[idx] = model_id
        return mapping

    def _model_relation(self, relation: int, position: int) -> int:
        """position 为 0 表示原关系本身，否则为 1-indexed 的位置关系"""
        key = (relation, position)
        if key not in self._relation_cache:
            name = self.dataset_vocab.relation_names[relation]
            if position:
                name = reified_relation_name(name, position)
            model_id = self.model_vocab.find_relation(name)
            if model_id is None:
                raise EvaluationError(f"关系 {name!r} 不在模型词表中")
            self._relation_cache[key] = model_id
        return self._relation_cache[key]

    def _rng(self, fact: Fact, position: int) -> np.random.Generator:
        return np.random.default_rng(
            [self.seed, fact.relation, position, *fact.entities]
        )

    def rank(self, fact: Fact, position: int, index: FilterIndex) -> int:
        if fact.arity == 1:
            raise EvaluationError("r-simple 不支持一元事实")
        candidates = candidate_entities(fact, position, self.num_entities, index)
        mapped = self.entity_map[candidates]
        true_entity = int(self.entity_map[fact.entities[position]])

        if fact.arity == 2:
            model_fact = Fact(
                self._model_relation(fact.relation, 0),
                tuple(int(self.entity_map[e]) for e in fact.entities),
            )
            chunk = np.concatenate([[true_entity], mapped]).astype(np.int64)
            batch = FactBatch.with_candidates(model_fact, position, chunk, 2)
            scores = self.model.scores(self.params, batch)
            return 1 + count_better(float(scores[0]), scores[1:])

        aux = self.params.config.num_entities
        observed = [
            Fact(self._model_relation(fact.relation, j + 1), (aux, int(self.entity_map[e])))
            for j, e in enumerate(fact.entities)
            if j != position
        ]
        embedding = fit_aux_embedding(
            self.params,
            observed,
            steps=self.steps,
            lr=self.lr,
            ratio=self.ratio,
            rng=self._rng(fact, position),
        )
        relation = self._model_relation(fact.relation, position + 1)
        tails = np.concatenate([[true_entity], mapped]).astype(np.int64)
        coef = head_coefficients(
            self.params, np.full(tails.size, relation, dtype=np.int64), tails
        )
        scores = np.einsum("mcd,cd->m", coef, embedding)
        return 1 + count_better(float(scores[0]), scores[1:])


def rank_of(params: ModelParams, fact: Fact, position: int, known: KnownFacts) -> int:
    """position 为 1-indexed"""
    if not 1 <= position <= fact.arity:
        raise ValueError(f"位置 {position} 超出 1..{fact.arity}")
    return ModelRanker(params).rank(fact, position - 1, as_filter_index(known))


def fact_ranks(
    ranker: Ranker, facts: Sequence[Fact], index: FilterIndex, *, show_progress: bool = False
) -> List[Tuple[int, List[int]]]:
    out: List[Tuple[int, List[int]]] = []
    for fact in tqdm(facts, desc="eval", unit="fact", disable=not show_progress):
        out.append((fact.arity, [ranker.rank(fact, i, index) for i in range(fact.arity)]))
    return out


def evaluate(
    params: ModelParams,
    test: Sequence[Fact],
    known: KnownFacts,
    *,
    hits_at: Sequence[int] = DEFAULT_HITS_AT,
    ranker: Optional[Ranker] = None,
    show_progress: bool = False,
) -> EvalReport:
    """
    对每条测试事实的每个位置做过滤排名，汇总为 EvalReport。

    Args:
        known: τ′ = train ∪ valid ∪ test（集合或预先建好的 FilterIndex）
        ranker: 默认直接用 params 打分；r-simple 在原始数据上评估时传入 ReifiedRanker

    Raises:
        EmptyReportError: test 为空
    """
    index = as_filter_index(known)
    active = ranker if ranker is not None else ModelRanker(params)
    report = build_report(fact_ranks(active, test, index, show_progress=show_progress), hits_at)
    logger.debug("评估完成：%d 条事实，K=%d，MRR=%.4f", len(test), report.tasks, report.mrr)
    return report
