"""
训练默认值加载器（系统规则）

说明：
- `training_defaults.yaml` 保存模型/训练/评估的默认超参数
- 命令行参数总是覆盖这里的值；本模块只负责读取与校验
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Tuple

import yaml

from hyperkgc.domain.errors import HyperKGCError
from hyperkgc.shared.constants import TRAINING_DEFAULTS_FILE


class DefaultsError(HyperKGCError):
    """Training defaults error with user-facing message in args[0]."""


@dataclass(frozen=True)
class ModelDefaults:
    dim: int
    filters: int
    filter_length: int
    stride: int
    init_std: float


@dataclass(frozen=True)
class TrainingDefaults:
    epochs: int
    batch_size: int
    negative_ratio: int
    eval_every: int
    lr: float
    dropout: float
    seed: int
    adagrad_epsilon: float
    aux_fit_steps: int


@dataclass(frozen=True)
class EvaluationDefaults:
    hits_at: Tuple[int, ...]
    max_enumeration: int


@dataclass(frozen=True)
class Defaults:
    model: ModelDefaults
    training: TrainingDefaults
    evaluation: EvaluationDefaults


def _validate_int(value: object, *, label: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DefaultsError(f"{label} 必须是整数：{value!r}")
    if minimum is not None and value < minimum:
        raise DefaultsError(f"{label} 必须 ≥ {minimum}：{value}")
    return value


def _validate_float(
    value: object,
    *,
    label: str,
    minimum: float | None = None,
    below: float | None = None,
) -> float:
    if isinstance(value, bool):
        raise DefaultsError(f"{label} 必须是数字（不能是 bool）")
    if isinstance(value, (int, float)):
        number = float(value)
    elif isinstance(value, str) and value.strip():
        try:
            number = float(value.strip())
        except ValueError as e:
            raise DefaultsError(f"{label} 不是合法数字：{value!r}") from e
    else:
        raise DefaultsError(f"{label} 必须是数字")

    if minimum is not None and number < minimum:
        raise DefaultsError(f"{label} 必须 ≥ {minimum}：{number}")
    if below is not None and number >= below:
        raise DefaultsError(f"{label} 必须 < {below}：{number}")
    return number


def _validate_int_list(value: object, *, label: str) -> Tuple[int, ...]:
    if not isinstance(value, list) or not value:
        raise DefaultsError(f"{label} 必须是非空整数列表")
    items = [
        _validate_int(item, label=f"{label}[{idx}]", minimum=1)
        for idx, item in enumerate(value)
    ]
    return tuple(sorted(set(items)))


def _section(data: Dict[str, Any], name: str) -> Dict[str, Any]:
    section = data.get(name)
    if not isinstance(section, dict):
        raise DefaultsError(f"缺少 {name} 或类型错误（应为 dict）")
    return section


def _load_yaml(path: Path) -> Dict[str, Any]:
    try:
        raw_text = path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise DefaultsError(f"未找到训练默认值文件：{path}") from e
    except Exception as e:
        raise DefaultsError(f"读取训练默认值文件失败：{path}（{e}）") from e

    try:
        data = yaml.safe_load(raw_text)
    except yaml.YAMLError as e:
        raise DefaultsError(f"训练默认值 YAML 格式错误：{e}") from e

    if not isinstance(data, dict):
        raise DefaultsError("训练默认值文件根节点必须是 YAML mapping（dict）")
    return data


def parse_defaults(data: Dict[str, Any]) -> Defaults:
    version = data.get("version")
    if version != 1:
        raise DefaultsError(f"训练默认值版本不支持：{version!r}（仅支持 1）")

    model = _section(data, "model")
    training = _section(data, "training")
    evaluation = _section(data, "evaluation")

    epsilon = _validate_float(
        training.get("adagrad_epsilon"), label="training.adagrad_epsilon"
    )
    if epsilon <= 0:
        raise DefaultsError(f"training.adagrad_epsilon 必须 > 0：{epsilon}")

    return Defaults(
        model=ModelDefaults(
            dim=_validate_int(model.get("dim"), label="model.dim", minimum=1),
            filters=_validate_int(model.get("filters"), label="model.filters", minimum=1),
            filter_length=_validate_int(
                model.get("filter_length"), label="model.filter_length", minimum=1
            ),
            stride=_validate_int(model.get("stride"), label="model.stride", minimum=1),
            init_std=_validate_float(
                model.get("init_std"), label="model.init_std", minimum=0.0
            ),
        ),
        training=TrainingDefaults(
            epochs=_validate_int(training.get("epochs"), label="training.epochs", minimum=1),
            batch_size=_validate_int(
                training.get("batch_size"), label="training.batch_size", minimum=1
            ),
            negative_ratio=_validate_int(
                training.get("negative_ratio"), label="training.negative_ratio", minimum=1
            ),
            eval_every=_validate_int(
                training.get("eval_every"), label="training.eval_every", minimum=1
            ),
            lr=_validate_float(training.get("lr"), label="training.lr", minimum=0.0),
            dropout=_validate_float(
                training.get("dropout"), label="training.dropout", minimum=0.0, below=1.0
            ),
            seed=_validate_int(training.get("seed"), label="training.seed", minimum=0),
            adagrad_epsilon=epsilon,
            aux_fit_steps=_validate_int(
                training.get("aux_fit_steps"), label="training.aux_fit_steps", minimum=0
            ),
        ),
        evaluation=EvaluationDefaults(
            hits_at=_validate_int_list(
                evaluation.get("hits_at"), label="evaluation.hits_at"
            ),
            max_enumeration=_validate_int(
                evaluation.get("max_enumeration"),
                label="evaluation.max_enumeration",
                minimum=1,
            ),
        ),
    )


@lru_cache(maxsize=1)
def get_training_defaults() -> Defaults:
    """
    加载并校验 training_defaults.yaml。

    Note:
        - 如需在运行时重新加载，可调用 `get_training_defaults.cache_clear()` 后再调用本函数。
    """
    return parse_defaults(_load_yaml(TRAINING_DEFAULTS_FILE))
