"""
完全表达能力的可执行构造

- construct_hype: 构造一个 HypE 实例，对 τ 中的元组打 1 分，其余打 0 分
- construct_hsimple: 同上，HSimplE 版本（依靠循环移位对齐 one-hot 分块）
- verify_separation: 枚举所有元组，逐一核对打分是否恰为 0/1

实体维度均为 max(δ·|τ|, δ)。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import List, Optional, Tuple

import numpy as np

from hyperkgc.domain.models.fact import Fact
from hyperkgc.domain.models.model_config import ModelConfig, ModelKind
from hyperkgc.domain.models.params import ModelParams
from hyperkgc.domain.models.world import EnumerationBoundError, World
from hyperkgc.domain.services.scoring import PAD, FactBatch, build_model

DEFAULT_MAX_TUPLES = 10**6
DEFAULT_TOLERANCE = 1e-9
_SCORE_CHUNK = 65536


def construct_hype(world: World) -> ModelParams:
    """
    - 实体向量长度 δ·|τ|：第 p 个长度为 δ 的分块在实体于 f_p 中出现的位置上置 1
    - 关系向量长度 |τ|：f_p 使用该关系时第 p 位为 1
    - 每个位置 1 个卷积核 ω_i（长度 δ，第 i 位为 1），stride = δ，P 为 |τ| 阶单位阵
    τ 为空时所有向量为 0（实体长度 δ，关系长度 1）。
    """
    vocab = world.vocab
    delta = world.max_arity
    n_facts = len(world.facts)
    slots = max(n_facts, 1)
    config = ModelConfig(
        kind=ModelKind.HYPE,
        num_entities=vocab.num_entities,
        num_relations=vocab.num_relations,
        dim=delta * slots,
        rel_dim=slots,
        filters=1,
        filter_length=delta,
        stride=delta,
        max_arity=delta,
    )

    E = np.zeros((vocab.num_entities, delta * slots))
    R = np.zeros((vocab.num_relations, slots))
    for p, fact in enumerate(world.facts):
        R[fact.relation, p] = 1.0
        for i, entity in enumerate(fact.entities):
            E[entity, p * delta + i] = 1.0

    omega = np.zeros((delta, 1, delta))
    for i in range(delta):
        omega[i, 0, i] = 1.0
    P = np.eye(slots) if n_facts else np.zeros((1, 1))

    return ModelParams(config, {"E": E, "R": R, "omega": omega, "P": P})


def construct_hsimple(world: World) -> ModelParams:
    """
    - 实体向量由 δ 个长度为 |τ| 的分块组成：第 j 块是"实体位于第 j+1 个位置"的事实指示向量
    - 关系向量长度 δ·|τ|：前 |τ| 位为关系的事实指示向量，其余为 0
    位置 i 的实体左移 |τ|·(i−1) 后，第 i 块正好对齐到前 |τ| 位。
    """
    vocab = world.vocab
    delta = world.max_arity
    n_facts = len(world.facts)
    slots = max(n_facts, 1)
    config = ModelConfig(
        kind=ModelKind.HSIMPLE,
        num_entities=vocab.num_entities,
        num_relations=vocab.num_relations,
        dim=delta * slots,
        max_arity=delta,
    )

    E = np.zeros((vocab.num_entities, delta * slots))
    R = np.zeros((vocab.num_relations, delta * slots))
    for p, fact in enumerate(world.facts):
        R[fact.relation, p] = 1.0
        for j, entity in enumerate(fact.entities):
            E[entity, j * slots + p] = 1.0

    return ModelParams(config, {"E": E, "R": R})


@dataclass
class SeparationReport:
    model: str
    dimension: int
    tuples_checked: int
    violations: List[Tuple[Fact, float, float]] = field(default_factory=list)
    violation_count: int = 0

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    @property
    def first_violator(self) -> Optional[Tuple[Fact, float, float]]:
        return self.violations[0] if self.violations else None

    def to_text(self, world: Optional[World] = None) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = (
            f"{status}\tmodel={self.model}\tdim={self.dimension}"
            f"\ttuples={self.tuples_checked}\tviolations={self.violation_count}"
        )
        first = self.first_violator
        if first is not None:
            fact, score, expected = first
            label = str(fact)
            if world is not None:
                rel, ents = world.vocab.fact_names(fact)
                label = f"{rel}({', '.join(ents)})"
            line += f"\tfirst_violator={label} score={score:.6g} expected={expected:g}"
        return line


def _enumerate_relation(world: World, relation: int) -> np.ndarray:
    arity = world.vocab.arities[relation]
    combos = np.array(
        list(product(range(world.vocab.num_entities), repeat=arity)), dtype=np.int64
    ).reshape(-1, arity)
    padded = np.full((combos.shape[0], world.max_arity), PAD, dtype=np.int64)
    padded[:, :arity] = combos
    return padded


def verify_separation(
    params: ModelParams,
    world: World,
    *,
    max_tuples: int = DEFAULT_MAX_TUPLES,
    tolerance: float = DEFAULT_TOLERANCE,
    keep_violations: int = 10,
) -> SeparationReport:
    """
    枚举每个关系在其元数下的全部元组，检查 τ 上 φ = 1、其余 φ = 0（容差 tolerance）。

    Raises:
        EnumerationBoundError: 元组总数超过 max_tuples
    """
    total = world.tuple_count()
    if total > max_tuples:
        raise EnumerationBoundError(f"需要枚举 {total} 个元组，超过上限 {max_tuples}")

    model = build_model(params.config)
    truth = set(world.facts)
    report = SeparationReport(
        model=str(params.config.kind),
        dimension=params.config.dim,
        tuples_checked=0,
    )

    for relation in range(world.vocab.num_relations):
        arity = world.vocab.arities[relation]
        entities = _enumerate_relation(world, relation)
        for start in range(0, entities.shape[0], _SCORE_CHUNK):
            chunk = entities[start : start + _SCORE_CHUNK]
            size = chunk.shape[0]
            batch = FactBatch(
                relations=np.full(size, relation, dtype=np.int64),
                entities=chunk,
                arities=np.full(size, arity, dtype=np.int64),
            )
            scores = model.scores(params, batch)
            for row, score in zip(chunk, scores):
                fact = Fact(relation, tuple(int(e) for e in row[:arity]))
                expected = 1.0 if fact in truth else 0.0
                if abs(float(score) - expected) > tolerance:
                    report.violation_count += 1
                    if len(report.violations) < keep_violations:
                        report.violations.append((fact, float(score), expected))
            report.tuples_checked += size

    return report


def tamper(params: ModelParams) -> ModelParams:
    """在实体嵌入第一个非零元素上加 0.5（变异测试用）；全零时改第一个元素"""
    tampered = params.copy()
    flat = tampered["E"].reshape(-1)
    nonzero = np.flatnonzero(flat)
    idx = int(nonzero[0]) if nonzero.size else 0
    flat[idx] += 0.5
    return tampered
