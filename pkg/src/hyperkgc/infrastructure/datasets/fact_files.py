"""
事实文件读写

格式：UTF-8，每行一条事实，制表符分隔，第一列为关系名，其后为 k ≥ 1 个实体名。
数据集目录下固定为 train.txt / valid.txt / test.txt。
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Set

from hyperkgc.domain.models.fact import (
    AUX_ENTITY_PREFIX,
    RESERVED_INFIX,
    ArityConflictError,
    Dataset,
    DatasetError,
    Fact,
    FactParseError,
    ReservedNameError,
    Vocab,
)
from hyperkgc.shared.constants import TEST_FILENAME, TRAIN_FILENAME, VALID_FILENAME

logger = logging.getLogger(__name__)


def split_lines(text: str) -> List[str]:
    """只按 \\n / \\r\\n / \\r 断行；名字里的 \\u2028、\\x0c 等字符原样保留"""
    return text.replace("\r\n", "\n").replace("\r", "\n").split("\n")


def _check_name(name: str, *, allow_reserved: bool, source: str, lineno: int) -> None:
    if allow_reserved:
        return
    if RESERVED_INFIX in name:
        raise ReservedNameError(
            f"{source}:{lineno} 名字 {name!r} 包含保留中缀 {RESERVED_INFIX!r}"
        )
    if name.startswith(AUX_ENTITY_PREFIX):
        raise ReservedNameError(
            f"{source}:{lineno} 名字 {name!r} 以保留前缀 {AUX_ENTITY_PREFIX!r} 开头"
        )


def parse_facts(
    lines: Iterable[str],
    vocab: Vocab,
    *,
    allow_reserved: bool = False,
    source: str = "<input>",
) -> List[Fact]:
    """
    解析事实行；新名字登记到 vocab，关系第一次出现时的元数即其声明元数。

    Raises:
        FactParseError: 只有关系名或存在空字段
        ArityConflictError: 关系再次出现时元数不同（含行号）
        ReservedNameError: 名字含 "__" 或以 "_aux_" 开头，且 allow_reserved=False
    """
    facts: List[Fact] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 2:
            raise FactParseError(f"{source}:{lineno} 至少需要关系名和一个实体：{line!r}")
        if any(not f.strip() for f in fields):
            raise FactParseError(f"{source}:{lineno} 存在空字段：{line!r}")

        names = [f.strip() for f in fields]
        for name in names:
            _check_name(name, allow_reserved=allow_reserved, source=source, lineno=lineno)

        relation, entities = names[0], names[1:]
        try:
            rel_id = vocab.relation_id(relation, len(entities))
        except ArityConflictError as e:
            raise ArityConflictError(f"{source}:{lineno} {e.args[0]}") from e
        facts.append(Fact(rel_id, tuple(vocab.entity_id(name) for name in entities)))
    return facts


def read_facts(
    path: Path, vocab: Vocab, *, allow_reserved: bool = False
) -> List[Fact]:
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise DatasetError(f"未找到事实文件：{path}") from e
    except UnicodeDecodeError as e:
        raise DatasetError(f"事实文件不是合法的 UTF-8：{path}（{e}）") from e
    return parse_facts(
        split_lines(text), vocab, allow_reserved=allow_reserved, source=str(path)
    )


def format_facts(facts: Sequence[Fact], vocab: Vocab) -> List[str]:
    lines: List[str] = []
    for fact in facts:
        relation, entities = vocab.fact_names(fact)
        lines.append("\t".join([relation, *entities]))
    return lines


def write_facts(path: Path, facts: Sequence[Fact], vocab: Vocab) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    body = "".join(f"{line}\n" for line in format_facts(facts, vocab))
    path.write_text(body, encoding="utf-8", newline="\n")


def _dedupe(facts: List[Fact], seen: Set[Fact], label: str) -> List[Fact]:
    kept: List[Fact] = []
    dropped = 0
    for fact in facts:
        if fact in seen:
            dropped += 1
            continue
        seen.add(fact)
        kept.append(fact)
    if dropped:
        logger.warning("%s 中有 %d 条事实与之前的数据重复，已移除", label, dropped)
    return kept


def load_dataset(
    directory: Path, *, allow_reserved: bool = False, require_test: bool = False
) -> Dataset:
    """
    读取数据集目录，三个划分共享同一个 Vocab（按 train → valid → test 顺序登记名字）。
    valid/test 缺失时视为空；与前面划分重复的事实从后面的划分中移除。
    """
    if not directory.is_dir():
        raise DatasetError(f"数据集目录不存在：{directory}")

    vocab = Vocab()
    seen: Set[Fact] = set()
    parts: dict[str, List[Fact]] = {}
    for label, filename in (
        ("train", TRAIN_FILENAME),
        ("valid", VALID_FILENAME),
        ("test", TEST_FILENAME),
    ):
        path = directory / filename
        if not path.exists():
            if label == "train" or (label == "test" and require_test):
                raise DatasetError(f"缺少 {label} 文件：{path}")
            logger.warning("缺少 %s 文件：%s，按空集处理", label, path)
            parts[label] = []
            continue
        facts = read_facts(path, vocab, allow_reserved=allow_reserved)
        parts[label] = _dedupe(facts, seen, label)

    dataset = Dataset(vocab, parts["train"], parts["valid"], parts["test"])
    dataset.validate()
    logger.info(
        "已加载数据集 %s：|E|=%d，|R|=%d，δ=%d，train=%d，valid=%d，test=%d",
        directory,
        vocab.num_entities,
        vocab.num_relations,
        vocab.max_arity,
        len(dataset.train),
        len(dataset.valid),
        len(dataset.test),
    )
    return dataset


def write_dataset(directory: Path, dataset: Dataset) -> None:
    for filename, facts in (
        (TRAIN_FILENAME, dataset.train),
        (VALID_FILENAME, dataset.valid),
        (TEST_FILENAME, dataset.test),
    ):
        write_facts(directory / filename, facts, dataset.vocab)


def read_allowlist(path: Optional[Path]) -> Optional[Set[str]]:
    """每行一个名字；path 为 None 时返回 None（不做筛选）"""
    if path is None:
        return None
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise DatasetError(f"未找到白名单文件：{path}") from e
    return {line.strip() for line in split_lines(text) if line.strip()}
