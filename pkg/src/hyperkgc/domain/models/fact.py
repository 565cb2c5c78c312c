"""
知识超图的基础数据结构

- Fact: 关系 id + 有序实体 id 列表，即 r(v1, ..., vk)
- Vocab: 实体/关系名 ↔ 连续整数 id，并记录每个关系固定的元数（arity）
- Dataset: 共享同一个 Vocab 的 train/valid/test 三个划分
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from hyperkgc.domain.errors import HyperKGCError

# 转换过程生成的名字使用 "__" 中缀；原始输入中的名字不允许包含它
RESERVED_INFIX = "__"
AUX_ENTITY_PREFIX = "_aux_"


class DatasetError(HyperKGCError):
    """Dataset error with user-facing message in args[0]."""


class FactParseError(DatasetError):
    """事实行格式错误"""


class ArityConflictError(DatasetError):
    """同一关系出现了不同的元数"""


class ReservedNameError(DatasetError):
    """输入名字使用了保留的中缀/前缀"""


class MalformedGroupError(DatasetError):
    """逆具体化时，同一辅助实体下的三元组分组不合法"""


@dataclass(frozen=True)
class Fact:
    relation: int
    entities: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.entities, tuple):
            object.__setattr__(self, "entities", tuple(self.entities))
        if len(self.entities) < 1:
            raise DatasetError("事实至少需要一个实体")

    @property
    def arity(self) -> int:
        return len(self.entities)

    def replace_entity(self, position: int, entity: int) -> "Fact":
        """返回把第 position 个位置（0-indexed）替换为 entity 的新事实"""
        ents = list(self.entities)
        ents[position] = entity
        return Fact(self.relation, tuple(ents))


@dataclass
class Vocab:
    """
    实体与关系的名字表。

    id 从 0 开始连续分配；关系的元数由第一次出现时决定。
    """

    entity_names: List[str] = field(default_factory=list)
    relation_names: List[str] = field(default_factory=list)
    arities: List[int] = field(default_factory=list)
    _entity_ids: Dict[str, int] = field(default_factory=dict, init=False, repr=False)
    _relation_ids: Dict[str, int] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.arities) != len(self.relation_names):
            raise DatasetError("关系名与元数表长度不一致")
        self._entity_ids = {name: i for i, name in enumerate(self.entity_names)}
        self._relation_ids = {name: i for i, name in enumerate(self.relation_names)}

    @property
    def num_entities(self) -> int:
        return len(self.entity_names)

    @property
    def num_relations(self) -> int:
        return len(self.relation_names)

    @property
    def max_arity(self) -> int:
        """δ = max_r |r|（空词表时为 1）"""
        return max(self.arities, default=1)

    def entity_id(self, name: str) -> int:
        idx = self._entity_ids.get(name)
        if idx is None:
            idx = len(self.entity_names)
            self.entity_names.append(name)
            self._entity_ids[name] = idx
        return idx

    def relation_id(self, name: str, arity: int) -> int:
        """
        获取（必要时登记）关系 id。

        Raises:
            ArityConflictError: 关系已登记且元数不同
        """
        idx = self._relation_ids.get(name)
        if idx is None:
            idx = len(self.relation_names)
            self.relation_names.append(name)
            self.arities.append(arity)
            self._relation_ids[name] = idx
            return idx

        declared = self.arities[idx]
        if declared != arity:
            raise ArityConflictError(
                f"关系 {name!r} 的元数冲突：已登记为 {declared}，当前为 {arity}"
            )
        return idx

    def find_entity(self, name: str) -> Optional[int]:
        return self._entity_ids.get(name)

    def find_relation(self, name: str) -> Optional[int]:
        return self._relation_ids.get(name)

    def copy(self) -> "Vocab":
        return Vocab(
            entity_names=list(self.entity_names),
            relation_names=list(self.relation_names),
            arities=list(self.arities),
        )

    def fact_names(self, fact: Fact) -> Tuple[str, Tuple[str, ...]]:
        return (
            self.relation_names[fact.relation],
            tuple(self.entity_names[e] for e in fact.entities),
        )


@dataclass
class Dataset:
    vocab: Vocab
    train: List[Fact]
    valid: List[Fact] = field(default_factory=list)
    test: List[Fact] = field(default_factory=list)

    def all_facts(self) -> List[Fact]:
        return [*self.train, *self.valid, *self.test]

    def known_facts(self) -> frozenset[Fact]:
        """τ′ = train ∪ valid ∪ test（过滤式评估用）"""
        return frozenset(self.all_facts())

    def validate(self) -> None:
        """
        检查数据集不变量：划分互不相交、id 合法、元数与声明一致。

        Raises:
            DatasetError: 任一不变量被破坏
        """
        validate_facts(self.all_facts(), self.vocab)
        seen: set[Fact] = set()
        for label, part in (("train", self.train), ("valid", self.valid), ("test", self.test)):
            overlap = seen.intersection(part)
            if overlap:
                raise DatasetError(f"{label} 与其他划分存在 {len(overlap)} 条重复事实")
            seen.update(part)


def validate_facts(facts: Iterable[Fact], vocab: Vocab) -> None:
    for fact in facts:
        if not 0 <= fact.relation < vocab.num_relations:
            raise DatasetError(f"未知关系 id：{fact.relation}")
        if fact.arity != vocab.arities[fact.relation]:
            raise ArityConflictError(
                f"关系 {vocab.relation_names[fact.relation]!r} 的事实元数为 {fact.arity}，"
                f"声明为 {vocab.arities[fact.relation]}"
            )
        for e in fact.entities:
            if not 0 <= e < vocab.num_entities:
                raise DatasetError(f"未知实体 id：{e}")


def dataset_statistics(dataset: Dataset) -> Dict[str, int]:
    """数据集统计：|E|、|R|、各划分大小，以及各元数的事实数"""
    stats: Dict[str, int] = {
        "entities": dataset.vocab.num_entities,
        "relations": dataset.vocab.num_relations,
        "train": len(dataset.train),
        "valid": len(dataset.valid),
        "test": len(dataset.test),
    }
    for fact in dataset.all_facts():
        key = f"arity={fact.arity}"
        stats[key] = stats.get(key, 0) + 1
    return stats
