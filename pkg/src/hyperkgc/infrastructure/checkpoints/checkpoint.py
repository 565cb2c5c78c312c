"""
检查点文件

布局：YAML 文件头 + 一个空行 + 负载。
负载为各参数数组按文件头 arrays 列表的顺序、行优先、小端 IEEE-754 存储（默认 float32，可选 float64）。

文件头记录模型结构、模型词表、训练种子，以及训练所用数据集词表的 FNV-1a 64 位哈希。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import yaml

from hyperkgc.domain.errors import HyperKGCError
from hyperkgc.domain.models.fact import Vocab
from hyperkgc.domain.models.model_config import ModelConfig, ModelError
from hyperkgc.domain.models.params import ModelParams, expected_shapes
from hyperkgc.shared.constants import CHECKPOINT_FORMAT, CHECKPOINT_VERSION

logger = logging.getLogger(__name__)

_HEADER_END = b"\n\n"
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_DTYPES = {"<f4": np.dtype("<f4"), "<f8": np.dtype("<f8")}


class CheckpointError(HyperKGCError):
    """Checkpoint error with user-facing message in args[0]."""


class VocabMismatchError(CheckpointError):
    """检查点与数据集的词表哈希不一致"""


def fnv1a_64(data: bytes) -> int:
    value = _FNV_OFFSET
    for byte in data:
        value ^= byte
        value = (value * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return value


def vocab_hash(vocab: Vocab) -> str:
    """排序后的实体名列表与"关系名\\t元数"列表拼接后的 FNV-1a 64，16 位十六进制"""
    entities = "\n".join(sorted(vocab.entity_names))
    relations = "\n".join(
        sorted(f"{name}\t{arity}" for name, arity in zip(vocab.relation_names, vocab.arities))
    )
    text = entities + "\n\n" + relations
    return f"{fnv1a_64(text.encode('utf-8')):016x}"


@dataclass
class Checkpoint:
    params: ModelParams
    vocab: Vocab
    dataset_vocab_hash: str
    seed: int = 0
    training: Dict[str, Any] = field(default_factory=dict)

    def check_dataset(self, dataset_vocab: Vocab) -> None:
        """
        Raises:
            VocabMismatchError: 数据集词表哈希与检查点记录的不一致
        """
        actual = vocab_hash(dataset_vocab)
        if actual != self.dataset_vocab_hash:
            raise VocabMismatchError(
                f"数据集词表与检查点不匹配：检查点 {self.dataset_vocab_hash}，数据集 {actual}"
            )


def _config_to_dict(config: ModelConfig) -> Dict[str, Any]:
    return {
        "kind": str(config.kind),
        "num_entities": config.num_entities,
        "num_relations": config.num_relations,
        "dim": config.dim,
        "rel_dim": config.relation_dim,
        "filters": config.filters,
        "filter_length": config.filter_length,
        "stride": config.stride,
        "max_arity": config.max_arity,
        "init_std": config.init_std,
    }


def build_header(checkpoint: Checkpoint, dtype: str) -> Dict[str, Any]:
    params = checkpoint.params
    vocab = checkpoint.vocab
    return {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "dtype": dtype,
        "seed": checkpoint.seed,
        "model": _config_to_dict(params.config),
        "arrays": [
            {"name": name, "shape": list(arr.shape)} for name, arr in params.items()
        ],
        "dataset_vocab_hash": checkpoint.dataset_vocab_hash,
        "model_vocab_hash": vocab_hash(vocab),
        "training": dict(checkpoint.training),
        "vocab": {
            "entities": list(vocab.entity_names),
            "relations": [
                [name, arity] for name, arity in zip(vocab.relation_names, vocab.arities)
            ],
        },
    }


def save_checkpoint(path: Path, checkpoint: Checkpoint, *, dtype: str = "<f4") -> None:
    if dtype not in _DTYPES:
        raise CheckpointError(f"不支持的负载类型：{dtype!r}（可选 {sorted(_DTYPES)}）")
    header = yaml.safe_dump(
        build_header(checkpoint, dtype),
        sort_keys=False,
        allow_unicode=True,
        width=float("inf"),
    )
    payload = b"".join(
        np.ascontiguousarray(arr, dtype=_DTYPES[dtype]).tobytes(order="C")
        for _, arr in checkpoint.params.items()
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(header.encode("utf-8").rstrip(b"\n") + _HEADER_END + payload)
    logger.info("已写入检查点：%s（%s，%d 字节负载）", path, dtype, len(payload))


def _parse_header(raw: bytes, path: Path) -> Dict[str, Any]:
    try:
        header = yaml.safe_load(raw.decode("utf-8"))
    except (UnicodeDecodeError, yaml.YAMLError) as e:
        raise CheckpointError(f"检查点文件头无法解析：{path}（{e}）") from e
    if not isinstance(header, dict) or header.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"不是 hyperkgc 检查点：{path}")
    if header.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"检查点版本不支持：{header.get('version')!r}")
    return header


def _vocab_from_header(header: Dict[str, Any]) -> Vocab:
    table = header.get("vocab") or {}
    relations: List[List[Any]] = table.get("relations") or []
    return Vocab(
        entity_names=[str(name) for name in table.get("entities") or []],
        relation_names=[str(name) for name, _ in relations],
        arities=[int(arity) for _, arity in relations],
    )


def load_checkpoint(path: Path) -> Checkpoint:
    """
    Raises:
        CheckpointError: 文件缺失、文件头非法、形状与负载长度不一致
    """
    try:
        blob = path.read_bytes()
    except FileNotFoundError as e:
        raise CheckpointError(f"未找到检查点文件：{path}") from e

    split = blob.find(_HEADER_END)
    if split < 0:
        raise CheckpointError(f"检查点缺少文件头结束标记：{path}")
    header = _parse_header(blob[:split], path)
    payload = memoryview(blob)[split + len(_HEADER_END) :]

    dtype = _DTYPES.get(str(header.get("dtype")))
    if dtype is None:
        raise CheckpointError(f"不支持的负载类型：{header.get('dtype')!r}")

    try:
        config = ModelConfig(**header["model"])
    except (KeyError, TypeError, ModelError) as e:
        raise CheckpointError(f"检查点模型配置非法：{e}") from e

    shapes = expected_shapes(config)
    declared = [(item["name"], tuple(item["shape"])) for item in header.get("arrays", [])]
    if dict(declared) != shapes:
        raise CheckpointError(f"文件头数组声明与模型配置不一致：{declared}")

    expected_bytes = sum(int(np.prod(shape)) * dtype.itemsize for _, shape in declared)
    if expected_bytes != len(payload):
        raise CheckpointError(
            f"负载长度 {len(payload)} 与文件头声明的 {expected_bytes} 字节不一致"
        )

    arrays: Dict[str, np.ndarray] = {}
    offset = 0
    for name, shape in declared:
        count = int(np.prod(shape))
        arr = np.frombuffer(payload, dtype=dtype, count=count, offset=offset)
        arrays[name] = arr.reshape(shape).astype(np.float64)
        offset += count * dtype.itemsize

    vocab = _vocab_from_header(header)
    if vocab.num_entities != config.num_entities or vocab.num_relations != config.num_relations:
        raise CheckpointError("检查点词表大小与模型配置不一致")

    return Checkpoint(
        params=ModelParams(config, arrays),
        vocab=vocab,
        dataset_vocab_hash=str(header.get("dataset_vocab_hash", "")),
        seed=int(header.get("seed", 0)),
        training=dict(header.get("training") or {}),
    )
