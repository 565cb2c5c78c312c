"""
数据划分工具

- missing_positions_subset: 测试集中至少有一个实体出现在训练集中从未出现过的位置
- random_split: 按比例随机划分事实（受 seed 控制，可复现）
"""

from __future__ import annotations

from typing import List, Sequence

import numpy as np

from hyperkgc.domain.models.fact import DatasetError, Fact


def observed_positions(facts: Sequence[Fact]) -> set[tuple[int, int]]:
    """训练集中出现过的 (实体, 位置) 对；位置从 1 开始"""
    return {
        (entity, pos)
        for fact in facts
        for pos, entity in enumerate(fact.entities, start=1)
    }


def missing_positions_subset(train: Sequence[Fact], test: Sequence[Fact]) -> List[Fact]:
    seen = observed_positions(train)
    return [
        fact
        for fact in test
        if any(
            (entity, pos) not in seen
            for pos, entity in enumerate(fact.entities, start=1)
        )
    ]


def random_split(
    facts: Sequence[Fact],
    fractions: Sequence[float],
    rng: np.random.Generator,
) -> List[List[Fact]]:
    """
    随机打乱后按比例切分。

    前 len(fractions) - 1 份大小为 round(fraction · n)，剩余全部归入最后一份。

    Raises:
        DatasetError: 比例为负或总和不为 1
    """
    if not fractions or any(f < 0 for f in fractions):
        raise DatasetError(f"划分比例非法：{list(fractions)}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise DatasetError(f"划分比例之和必须为 1：{list(fractions)}")

    n = len(facts)
    order = rng.permutation(n)
    parts: List[List[Fact]] = []
    start = 0
    for fraction in fractions[:-1]:
        size = min(int(round(fraction * n)), n - start)
        parts.append([facts[i] for i in order[start : start + size]])
        start += size
    parts.append([facts[i] for i in order[start:]])
    return parts
