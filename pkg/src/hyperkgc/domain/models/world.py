from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from hyperkgc.domain.errors import HyperKGCError
from hyperkgc.domain.models.fact import Fact, Vocab, validate_facts


class ExpressivityError(HyperKGCError):
    """Expressivity error with user-facing message in args[0]."""


class EnumerationBoundError(ExpressivityError):
    """需要枚举的元组数超过上限"""


@dataclass
class World:
    """
    一个"世界"：实体、带元数的关系，以及为真的元组集合 τ。
    不在 τ 中的元组都为假。
    """

    vocab: Vocab
    facts: List[Fact]

    def __post_init__(self) -> None:
        validate_facts(self.facts, self.vocab)
        if len(set(self.facts)) != len(self.facts):
            raise ExpressivityError("τ 中存在重复元组")

    @property
    def max_arity(self) -> int:
        return self.vocab.max_arity

    def tuple_count(self) -> int:
        """Σ_r |E|^{|r|}：完整枚举需要打分的元组数"""
        n = self.vocab.num_entities
        return sum(n**arity for arity in self.vocab.arities)


def random_world(
    rng: np.random.Generator,
    *,
    entities: int,
    relations: int,
    max_arity: int,
    facts: int,
) -> World:
    """
    随机生成世界：实体 e0..、关系 r0..；r0 的元数固定为 max_arity，其余在 1..max_arity 中均匀抽取。
    τ 的大小取 min(facts, 全部可能元组数)。
    """
    if entities < 1 or relations < 1 or max_arity < 1 or facts < 0:
        raise ExpressivityError("随机世界的规模参数非法")

    vocab = Vocab()
    for i in range(entities):
        vocab.entity_id(f"e{i}")
    for j in range(relations):
        arity = max_arity if j == 0 else int(rng.integers(1, max_arity + 1))
        vocab.relation_id(f"r{j}", arity)

    world = World(vocab=vocab, facts=[])
    target = min(facts, world.tuple_count())
    chosen: set[Fact] = set()
    ordered: List[Fact] = []
    while len(ordered) < target:
        rel = int(rng.integers(0, relations))
        ents = tuple(int(x) for x in rng.integers(0, entities, size=vocab.arities[rel]))
        fact = Fact(rel, ents)
        if fact in chosen:
            continue
        chosen.add(fact)
        ordered.append(fact)
    world.facts = ordered
    return world
