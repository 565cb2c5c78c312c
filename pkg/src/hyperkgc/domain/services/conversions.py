"""
知识超图 ↔ 知识图谱的结构转换

- reify: k 元事实（k ≥ 3）→ 经由新的辅助实体连接的 k 条二元事实
- star_to_clique: k 元事实 → C(k, 2) 条两两实体之间的二元事实
- inverse_reify: 把共享同一辅助实体的二元三元组还原为一条多元事实
- filter_by_allowlist: 按实体/关系白名单筛选事实

命名约定：
- 辅助实体："_aux_<counter>"
- 具体化关系："<r>__pos<i>"（i 从 1 开始）
- 团关系："<r>__pair<i>_<j>"（i < j，从 1 开始）
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Collection, Dict, List, Optional, Tuple

from hyperkgc.domain.models.fact import (
    AUX_ENTITY_PREFIX,
    ArityConflictError,
    DatasetError,
    Fact,
    MalformedGroupError,
    Vocab,
)

logger = logging.getLogger(__name__)

DEFAULT_POSITION_PATTERN = re.compile(r"^(?P<base>.+)__pos(?P<pos>\d+)$")

# 数字实体：名字整体能解析为十进制数
_RE_DECIMAL = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?$")


def reified_relation_name(relation: str, position: int) -> str:
    return f"{relation}__pos{position}"


def clique_relation_name(relation: str, i: int, j: int) -> str:
    return f"{relation}__pair{i}_{j}"


def is_aux_entity_name(name: str) -> bool:
    return name.startswith(AUX_ENTITY_PREFIX)


def is_numeric_name(name: str) -> bool:
    return bool(_RE_DECIMAL.match(name.strip()))


def _next_aux_counter(vocab: Vocab, start: int) -> int:
    counter = start
    while vocab.find_entity(f"{AUX_ENTITY_PREFIX}{counter}") is not None:
        counter += 1
    return counter


def reify(facts: List[Fact], vocab: Vocab) -> List[Fact]:
    """
    具体化：r(e1, ..., ek) → r__pos1(aux, e1), ..., r__posk(aux, ek)。

    元数 ≤ 2 的事实原样保留。辅助实体编号从 vocab 中第一个未占用的计数开始，
    结果只依赖输入顺序。会向 vocab 中登记新的实体与关系。
    """
    out: List[Fact] = []
    counter = _next_aux_counter(vocab, 0)
    for fact in facts:
        if fact.arity <= 2:
            out.append(fact)
            continue

        aux = vocab.entity_id(f"{AUX_ENTITY_PREFIX}{counter}")
        counter = _next_aux_counter(vocab, counter + 1)
        base = vocab.relation_names[fact.relation]
        for pos, entity in enumerate(fact.entities, start=1):
            rel = vocab.relation_id(reified_relation_name(base, pos), 2)
            out.append(Fact(rel, (aux, entity)))
    return out


def reify_relations(vocab: Vocab) -> Dict[Tuple[int, int], int]:
    """
    为 vocab 中每个元数 ≥ 3 的关系登记全部位置关系。

    Returns:
        {(原关系 id, 位置 1..k): 具体化关系 id}
    """
    mapping: Dict[Tuple[int, int], int] = {}
    for rel in range(vocab.num_relations):
        arity = vocab.arities[rel]
        if arity <= 2:
            continue
        base = vocab.relation_names[rel]
        for pos in range(1, arity + 1):
            mapping[(rel, pos)] = vocab.relation_id(reified_relation_name(base, pos), 2)
    return mapping


def star_to_clique(facts: List[Fact], vocab: Vocab) -> List[Fact]:
    """
    星形转团：k 元事实（k ≥ 3）→ 对所有位置对 i < j 生成 r__pair<i>_<j>(e_i, e_j)。

    元数 ≤ 2 的事实原样保留。
    """
    out: List[Fact] = []
    for fact in facts:
        if fact.arity <= 2:
            out.append(fact)
            continue

        base = vocab.relation_names[fact.relation]
        for i, j in combinations(range(fact.arity), 2):
            rel = vocab.relation_id(clique_relation_name(base, i + 1, j + 1), 2)
            out.append(Fact(rel, (fact.entities[i], fact.entities[j])))
    return out


@dataclass
class InverseReifyResult:
    facts: List[Fact]
    vocab: Vocab
    dropped_single_entity: int = 0
    dropped_numeric: int = 0
    dropped_singleton_groups: int = 0
    malformed: List[str] = field(default_factory=list)


@dataclass
class _Group:
    base: Optional[str] = None
    members: List[Tuple[int, int]] = field(default_factory=list)  # (pos, entity)
    problem: Optional[str] = None


def inverse_reify(
    triples: List[Fact],
    vocab: Vocab,
    *,
    aux_detector: Callable[[str], bool] = is_aux_entity_name,
    position_pattern: re.Pattern[str] = DEFAULT_POSITION_PATTERN,
    skip_bad: bool = False,
    target: Optional[Vocab] = None,
) -> InverseReifyResult:
    """
    逆具体化。

    1. 丢弃单实体事实，以及含有数值型实体名的事实；
    2. 把首参数为同一辅助实体、关系名带位置后缀的三元组合并成一条事实，实体按位置后缀排序。
       其余事实（包括辅助实体开头但关系名无位置后缀的）原样保留。

    结果写入 target（默认新建 Vocab；关系名为去掉位置后缀后的原名）。输出顺序按每组第一次出现的位置。

    Raises:
        MalformedGroupError: 存在位置后缀重复/不连续、基关系不一致的分组，且 skip_bad=False
    """
    result = InverseReifyResult(
        facts=[], vocab=target if target is not None else Vocab()
    )
    # 按首次出现顺序记录输出项：("fact", Fact) 或 ("group", aux_id)
    order: List[Tuple[str, object]] = []
    groups: Dict[int, _Group] = {}

    for triple in triples:
        rel_name, ent_names = vocab.fact_names(triple)
        if triple.arity == 1:
            result.dropped_single_entity += 1
            continue

        # 只有"辅助实体开头 + 带位置后缀的关系"才属于具体化分组
        match = position_pattern.match(rel_name) if triple.arity == 2 else None
        if match is None or not aux_detector(ent_names[0]):
            order.append(("fact", triple))
            continue

        group = groups.get(triple.entities[0])
        if group is None:
            group = _Group()
            groups[triple.entities[0]] = group
            order.append(("group", triple.entities[0]))

        base = match.group("base")
        if group.base is not None and group.base != base:
            group.problem = f"同一辅助实体下出现不同关系：{group.base!r} / {base!r}"
            continue
        group.base = base
        group.members.append((int(match.group("pos")), triple.entities[1]))

    for kind, item in order:
        if kind == "fact":
            fact = item
            assert isinstance(fact, Fact)
            rel_name, ent_names = vocab.fact_names(fact)
            _emit(result, rel_name, ent_names, label=rel_name)
            continue

        aux = item
        assert isinstance(aux, int)
        aux_name = vocab.entity_names[aux]
        group = groups[aux]
        positions = [pos for pos, _ in group.members]
        if group.problem is None and len(set(positions)) != len(positions):
            group.problem = f"位置后缀重复：{sorted(positions)}"
        if group.problem is not None:
            result.malformed.append(f"{aux_name}: {group.problem}")
            continue
        if len(group.members) == 1:
            result.dropped_singleton_groups += 1
            continue

        ordered = sorted(group.members)
        if [pos for pos, _ in ordered] != list(range(1, len(ordered) + 1)):
            result.malformed.append(f"{aux_name}: 位置后缀不连续：{sorted(positions)}")
            continue

        assert group.base is not None
        ent_names = tuple(vocab.entity_names[e] for _, e in ordered)
        _emit(result, group.base, ent_names, label=aux_name)

    if result.dropped_singleton_groups:
        logger.warning("逆具体化：丢弃只有 1 条三元组的分组 %s 个", result.dropped_singleton_groups)
    if result.dropped_numeric:
        logger.info("逆具体化：丢弃含数值实体的事实 %s 条", result.dropped_numeric)
    if result.malformed:
        logger.warning("逆具体化：发现非法分组 %s 个", len(result.malformed))
        if not skip_bad:
            preview = "; ".join(result.malformed[:10])
            raise MalformedGroupError(
                f"逆具体化发现 {len(result.malformed)} 个非法分组：{preview}"
            )

    return result


def _emit(
    result: InverseReifyResult,
    rel_name: str,
    ent_names: Tuple[str, ...],
    *,
    label: str,
) -> None:
    if any(is_numeric_name(name) for name in ent_names):
        result.dropped_numeric += 1
        return
    try:
        rel = result.vocab.relation_id(rel_name, len(ent_names))
    except ArityConflictError as e:
        result.malformed.append(f"{label}: {e}")
        return
    ents = tuple(result.vocab.entity_id(name) for name in ent_names)
    result.facts.append(Fact(rel, ents))


def filter_by_allowlist(
    facts: List[Fact],
    vocab: Vocab,
    *,
    entities: Optional[Collection[str]] = None,
    relations: Optional[Collection[str]] = None,
) -> List[Fact]:
    """
    按白名单筛选：关系须在 relations 中（若给定），且所有实体须在 entities 中（若给定）。
    """
    entity_ids = None
    if entities is not None:
        allowed = set(entities)
        entity_ids = {i for i, n in enumerate(vocab.entity_names) if n in allowed}
    relation_ids = None
    if relations is not None:
        allowed = set(relations)
        relation_ids = {i for i, n in enumerate(vocab.relation_names) if n in allowed}

    kept: List[Fact] = []
    for fact in facts:
        if relation_ids is not None and fact.relation not in relation_ids:
            continue
        if entity_ids is not None and not all(e in entity_ids for e in fact.entities):
            continue
        kept.append(fact)
    return kept


def translate_facts(facts: List[Fact], source: Vocab, target: Vocab) -> List[Fact]:
    """
    按名字把 source 编号空间中的事实映射到 target 编号空间。

    Raises:
        DatasetError: 某个实体或关系名不在 target 中
    """
    entity_map: Dict[int, int] = {}
    relation_map: Dict[int, int] = {}
    out: List[Fact] = []
    for fact in facts:
        if fact.relation not in relation_map:
            name = source.relation_names[fact.relation]
            rel = target.find_relation(name)
            if rel is None:
                raise DatasetError(f"关系 {name!r} 不在目标词表中")
            relation_map[fact.relation] = rel
        ents: List[int] = []
        for e in fact.entities:
            if e not in entity_map:
                name = source.entity_names[e]
                mapped = target.find_entity(name)
                if mapped is None:
                    raise DatasetError(f"实体 {name!r} 不在目标词表中")
                entity_map[e] = mapped
            ents.append(entity_map[e])
        out.append(Fact(relation_map[fact.relation], tuple(ents)))
    return out
