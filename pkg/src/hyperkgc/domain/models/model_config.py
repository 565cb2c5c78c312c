from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from hyperkgc.domain.errors import HyperKGCError


class ModelError(HyperKGCError):
    """Model error with user-facing message in args[0]."""


class ModelConfigError(ModelError):
    """模型超参数组合非法"""


class PositionError(ModelError):
    """实体位置超出 1..δ"""


class ArityError(ModelError):
    """事实元数与模型不匹配"""


class ModelKind(Enum):
    """打分模型种类"""

    HYPE = "hype"
    HSIMPLE = "hsimple"
    MDISTMULT = "m-distmult"
    MCP = "m-cp"
    RSIMPLE = "r-simple"

    @classmethod
    def from_str(cls, value: str) -> "ModelKind":
        normalized = str(value or "").strip().lower()
        for kind in cls:
            if kind.value == normalized:
                return kind
        choices = ", ".join(k.value for k in cls)
        raise ModelConfigError(f"未知模型：{value!r}（可选：{choices}）")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ModelConfig:
    """
    模型结构超参数。

    - dim: 实体嵌入维度 d
    - rel_dim: 关系嵌入维度 d_r；None 表示与 d 相同（训练出的模型总是如此）
    - filters / filter_length / stride: HypE 的 n / l / s
    - max_arity: δ
    """

    kind: ModelKind
    num_entities: int
    num_relations: int
    dim: int
    max_arity: int
    rel_dim: Optional[int] = None
    filters: int = 2
    filter_length: int = 2
    stride: int = 2
    init_std: float = 0.01

    def __post_init__(self) -> None:
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", ModelKind.from_str(self.kind))
        if self.rel_dim is None:
            object.__setattr__(self, "rel_dim", self.dim)

        if self.num_entities < 1 or self.num_relations < 1:
            raise ModelConfigError("实体数与关系数必须 ≥ 1")
        if self.dim < 1:
            raise ModelConfigError(f"嵌入维度必须 ≥ 1：{self.dim}")
        if self.max_arity < 1:
            raise ModelConfigError(f"最大元数 δ 必须 ≥ 1：{self.max_arity}")
        if self.init_std < 0:
            raise ModelConfigError(f"初始化标准差不能为负：{self.init_std}")

        if self.kind is not ModelKind.HYPE and self.relation_dim != self.dim:
            raise ModelConfigError(f"{self.kind} 要求关系维度等于实体维度 {self.dim}")

        if self.kind is ModelKind.HSIMPLE and self.dim % self.max_arity != 0:
            raise ModelConfigError(
                f"hsimple 要求 δ 整除 d：d={self.dim}，δ={self.max_arity}"
            )
        if self.kind is ModelKind.RSIMPLE and self.max_arity != 2:
            raise ModelConfigError(
                f"r-simple 只能在具体化后的二元数据上训练（要求 δ=2，实际 {self.max_arity}）"
            )
        if self.kind is ModelKind.HYPE:
            if self.filters < 1:
                raise ModelConfigError(f"每个位置的卷积核数 n 必须 ≥ 1：{self.filters}")
            if self.stride < 1:
                raise ModelConfigError(f"stride 必须 ≥ 1：{self.stride}")
            if not 1 <= self.filter_length <= self.dim:
                raise ModelConfigError(
                    f"卷积核长度 l={self.filter_length} 必须在 1..d={self.dim} 之间"
                )

    @property
    def relation_dim(self) -> int:
        assert self.rel_dim is not None
        return self.rel_dim

    @property
    def feature_map_size(self) -> int:
        """q = ⌊(d − l) / s⌋ + 1"""
        return (self.dim - self.filter_length) // self.stride + 1

    @property
    def shift_step(self) -> int:
        """HSimplE 的位置移位步长 d / δ"""
        return self.dim // self.max_arity
