"""
数据集转换命令：reify / clique / unreify，外加可选的实体/关系白名单筛选
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, TypedDict

import yaml

from hyperkgc.domain.models.fact import DatasetError, Fact, Vocab
from hyperkgc.domain.services.conversions import (
    filter_by_allowlist,
    inverse_reify,
    reify,
    star_to_clique,
)
from hyperkgc.infrastructure.datasets.fact_files import (
    load_dataset,
    read_allowlist,
    read_facts,
    write_facts,
)
from hyperkgc.shared.constants import (
    CONVERT_SUMMARY_FILENAME,
    OUTPUT_DIR,
    TEST_FILENAME,
    TRAIN_FILENAME,
    VALID_FILENAME,
)

logger = logging.getLogger(__name__)

CONVERT_MODES = ("reify", "clique", "unreify")
DEFAULT_AUX_PATTERN = r"^_aux_"


@dataclass(frozen=True)
class ConvertOptions:
    mode: str
    data: Path
    out: Optional[Path] = None
    entity_allowlist: Optional[Path] = None
    relation_allowlist: Optional[Path] = None
    skip_bad: bool = False
    aux_pattern: str = DEFAULT_AUX_PATTERN


ConvertCommandResult = TypedDict(
    "ConvertCommandResult",
    {
        "out_dir": str,
        "files": List[str],
        "summary": Dict[str, Any],
    },
)


def _load_parts(
    data: Path, *, allow_reserved: bool
) -> Tuple[Vocab, List[Tuple[str, List[Fact]]]]:
    """目录按数据集读取三个划分；单个文件作为一个划分，输出同名文件"""
    if data.is_dir():
        dataset = load_dataset(data, allow_reserved=allow_reserved)
        parts = [
            (TRAIN_FILENAME, dataset.train),
            (VALID_FILENAME, dataset.valid),
            (TEST_FILENAME, dataset.test),
        ]
        return dataset.vocab, parts
    vocab = Vocab()
    return vocab, [(data.name, read_facts(data, vocab, allow_reserved=allow_reserved))]


def _filter(
    parts: List[Tuple[str, List[Fact]]],
    vocab: Vocab,
    entities: Optional[set[str]],
    relations: Optional[set[str]],
) -> List[Tuple[str, List[Fact]]]:
    if entities is None and relations is None:
        return parts
    filtered = []
    for name, facts in parts:
        kept = filter_by_allowlist(facts, vocab, entities=entities, relations=relations)
        logger.info("白名单筛选 %s：%d → %d", name, len(facts), len(kept))
        filtered.append((name, kept))
    return filtered


def run_convert(options: ConvertOptions) -> ConvertCommandResult:
    """
    Raises:
        DatasetError: 模式非法或输入无法解析
        MalformedGroupError: unreify 发现非法分组且未指定 skip_bad
    """
    if options.mode not in CONVERT_MODES:
        raise DatasetError(f"未知转换模式：{options.mode!r}（可选：{', '.join(CONVERT_MODES)}）")
    try:
        aux_regex = re.compile(options.aux_pattern)
    except re.error as e:
        raise DatasetError(f"辅助实体正则非法：{options.aux_pattern!r}（{e}）") from e

    entities = read_allowlist(options.entity_allowlist)
    relations = read_allowlist(options.relation_allowlist)
    source_vocab, parts = _load_parts(
        options.data, allow_reserved=options.mode == "unreify"
    )

    summary: Dict[str, Any] = {
        "mode": options.mode,
        "entities_before": source_vocab.num_entities,
        "relations_before": source_vocab.num_relations,
        "facts_before": {name: len(facts) for name, facts in parts},
    }

    if options.mode == "unreify":
        target = Vocab()
        converted = []
        totals = {"single_entity": 0, "numeric": 0, "singleton_groups": 0}
        malformed: List[str] = []
        for name, facts in parts:
            result = inverse_reify(
                facts,
                source_vocab,
                aux_detector=lambda n: bool(aux_regex.search(n)),
                skip_bad=options.skip_bad,
                target=target,
            )
            converted.append((name, result.facts))
            totals["single_entity"] += result.dropped_single_entity
            totals["numeric"] += result.dropped_numeric
            totals["singleton_groups"] += result.dropped_singleton_groups
            malformed.extend(result.malformed)
        out_vocab = target
        converted = _filter(converted, out_vocab, entities, relations)
        summary["dropped"] = totals
        summary["malformed_groups"] = malformed
    else:
        out_vocab = source_vocab.copy()
        parts = _filter(parts, out_vocab, entities, relations)
        convert = reify if options.mode == "reify" else star_to_clique
        converted = [(name, convert(list(facts), out_vocab)) for name, facts in parts]

    out_dir = options.out or OUTPUT_DIR / f"converted_{options.mode}"
    files: List[str] = []
    for name, facts in converted:
        path = out_dir / name
        write_facts(path, facts, out_vocab)
        files.append(str(path))

    summary["facts_after"] = {name: len(facts) for name, facts in converted}
    summary["entities_after"] = out_vocab.num_entities
    summary["relations_after"] = out_vocab.num_relations
    summary["new_entities"] = max(out_vocab.num_entities - source_vocab.num_entities, 0)
    summary_path = out_dir / CONVERT_SUMMARY_FILENAME
    summary_path.write_text(
        yaml.safe_dump(summary, sort_keys=False, allow_unicode=True), encoding="utf-8"
    )
    logger.info(
        "转换完成（%s）：事实 %d → %d，实体 %d → %d",
        options.mode,
        sum(summary["facts_before"].values()),
        sum(summary["facts_after"].values()),
        summary["entities_before"],
        summary["entities_after"],
    )
    return {"out_dir": str(out_dir), "files": files, "summary": summary}
