"""
过滤设定下的候选集合

把事实第 i 个位置挖空得到一个"槽位键"，FilterIndex 记录每个槽位键下所有已知事实填入的实体。
对测试事实的第 i 个位置，候选 = 全部实体 − 已知填充实体 − 真实实体，再加上真实事实本身。
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import AbstractSet, Dict, Iterable, List, Set, Tuple, Union

import numpy as np

from hyperkgc.domain.models.fact import Fact
from hyperkgc.domain.services.scoring import PAD

SlotKey = Tuple[int, int, Tuple[int, ...]]


def slot_key(fact: Fact, position: int) -> SlotKey:
    """position 为 0-indexed"""
    blanked = list(fact.entities)
    blanked[position] = PAD
    return fact.relation, position, tuple(blanked)


@dataclass
class FilterIndex:
    fillers: Dict[SlotKey, Set[int]] = field(default_factory=dict)

    @classmethod
    def build(cls, known: Iterable[Fact]) -> "FilterIndex":
        fillers: Dict[SlotKey, Set[int]] = defaultdict(set)
        for fact in known:
            for pos, entity in enumerate(fact.entities):
                fillers[slot_key(fact, pos)].add(entity)
        return cls(dict(fillers))

    def known_fillers(self, fact: Fact, position: int) -> Set[int]:
        return self.fillers.get(slot_key(fact, position), set())


KnownFacts = Union[FilterIndex, AbstractSet[Fact]]


def as_filter_index(known: KnownFacts) -> FilterIndex:
    return known if isinstance(known, FilterIndex) else FilterIndex.build(known)


def candidate_entities(
    fact: Fact, position: int, num_entities: int, index: FilterIndex
) -> np.ndarray:
    """位置 position（0-indexed）上未被过滤的替换实体，不含真实实体，升序"""
    keep = np.ones(num_entities, dtype=bool)
    excluded = index.known_fillers(fact, position)
    if excluded:
        keep[np.fromiter(excluded, dtype=np.int64, count=len(excluded))] = False
    keep[fact.entities[position]] = False
    return np.flatnonzero(keep)


def filtered_candidates(
    fact: Fact, position: int, num_entities: int, known: KnownFacts
) -> List[Fact]:
    """
    θ_i：第 position 个位置（1-indexed）的 |E|−1 个替换，去掉已知为真的替换，再加上 fact 本身。
    返回列表的第一个元素是 fact 本身。
    """
    if not 1 <= position <= fact.arity:
        raise ValueError(f"位置 {position} 超出 1..{fact.arity}")
    index = as_filter_index(known)
    others = candidate_entities(fact, position - 1, num_entities, index)
    return [fact] + [fact.replace_entity(position - 1, int(e)) for e in others]
