"""
负样本生成：对每个位置 i，把 e_i 依次替换为 N 个从 E \\ {e_i} 均匀抽取的实体。

训练阶段不过滤"碰巧为真"的负样本，过滤只在评估阶段进行。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from hyperkgc.application.training.errors import CannotCorruptError, TrainingConfigError
from hyperkgc.domain.models.fact import Fact
from hyperkgc.domain.services.scoring import FactBatch


def draw_excluding(
    rng: np.random.Generator, num_entities: int, exclude: np.ndarray
) -> np.ndarray:
    """从 [0, |E|) \\ {exclude} 均匀抽样：先抽 [0, |E|−1)，再把 ≥ exclude 的值加 1"""
    draws = rng.integers(0, num_entities - 1, size=exclude.shape)
    return draws + (draws >= exclude)


@dataclass(frozen=True)
class NegativeBatch:
    """
    negatives 中的事实按正样本分组连续排列：owner[m] 为第 m 个负样本所属正样本的下标。
    """

    negatives: FactBatch
    owner: np.ndarray


def corrupt_batch(
    positives: FactBatch, ratio: int, num_entities: int, rng: np.random.Generator
) -> NegativeBatch:
    if ratio < 1:
        raise TrainingConfigError(f"负样本比例 N 必须 ≥ 1：{ratio}")
    if num_entities < 2:
        raise CannotCorruptError(f"实体数为 {num_entities}，无法替换出不同的实体")

    size, delta = positives.entities.shape
    # (B, δ, N, δ)：第 j 组替换位置 j
    entities = np.broadcast_to(
        positives.entities[:, None, None, :], (size, delta, ratio, delta)
    ).copy()
    originals = np.broadcast_to(
        positives.entities[:, :, None], (size, delta, ratio)
    )
    replacements = draw_excluding(rng, num_entities, originals)
    idx = np.arange(delta)
    entities[:, idx, :, idx] = np.moveaxis(replacements, 1, 0)

    valid = idx[None, :] < positives.arities[:, None]  # (B, δ)
    keep = np.broadcast_to(valid[:, :, None], (size, delta, ratio)).reshape(-1)
    owner = np.repeat(np.arange(size), delta * ratio)[keep]
    flat = entities.reshape(-1, delta)[keep]

    negatives = FactBatch(
        relations=positives.relations[owner],
        entities=flat,
        arities=positives.arities[owner],
    )
    return NegativeBatch(negatives=negatives, owner=owner)


def sample_negatives(
    fact: Fact, ratio: int, num_entities: int, rng: np.random.Generator
) -> List[Fact]:
    """
    返回 N·|r| 个负样本，按位置 1..|r| 分组，每组 N 个。

    Raises:
        CannotCorruptError: |E| < 2
    """
    batch = FactBatch.from_facts([fact], fact.arity)
    result = corrupt_batch(batch, ratio, num_entities, rng)
    return [
        Fact(int(rel), tuple(int(e) for e in row))
        for rel, row in zip(result.negatives.relations, result.negatives.entities)
    ]
