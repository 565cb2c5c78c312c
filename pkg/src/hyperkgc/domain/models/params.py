"""
模型参数与行稀疏梯度

参数统一保存为命名的 float64 数组，第一维为"行"（实体/关系/位置/投影行）：

| kind       | E              | R              | omega      | P          |
|------------|----------------|----------------|------------|------------|
| hype       | (|E|, d)       | (|R|, d_r)     | (δ, n, l)  | (n·q, d_r) |
| hsimple    | (|E|, d)       | (|R|, d)       |            |            |
| m-distmult | (|E|, d)       | (|R|, d)       |            |            |
| m-cp       | (|E|, δ, d)    | (|R|, d)       |            |            |
| r-simple   | (|E|, 2, d)    | (|R|, 2, d)    |            |            |
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, Tuple

import numpy as np

from hyperkgc.domain.models.model_config import ModelConfig, ModelConfigError, ModelKind


def expected_shapes(config: ModelConfig) -> Dict[str, Tuple[int, ...]]:
    n_e, n_r, d, d_r = (
        config.num_entities,
        config.num_relations,
        config.dim,
        config.relation_dim,
    )
    kind = config.kind
    if kind is ModelKind.HYPE:
        nq = config.filters * config.feature_map_size
        return {
            "E": (n_e, d),
            "R": (n_r, d_r),
            "omega": (config.max_arity, config.filters, config.filter_length),
            "P": (nq, d_r),
        }
    if kind is ModelKind.MCP:
        return {"E": (n_e, config.max_arity, d), "R": (n_r, d)}
    if kind is ModelKind.RSIMPLE:
        return {"E": (n_e, 2, d), "R": (n_r, 2, d)}
    return {"E": (n_e, d), "R": (n_r, d)}


@dataclass
class ModelParams:
    config: ModelConfig
    arrays: Dict[str, np.ndarray]

    def __post_init__(self) -> None:
        shapes = expected_shapes(self.config)
        if set(shapes) != set(self.arrays):
            raise ModelConfigError(
                f"参数名不匹配：期望 {sorted(shapes)}，实际 {sorted(self.arrays)}"
            )
        for name, shape in shapes.items():
            arr = np.asarray(self.arrays[name], dtype=np.float64)
            if arr.shape != shape:
                raise ModelConfigError(f"参数 {name} 形状应为 {shape}，实际 {arr.shape}")
            self.arrays[name] = arr

    def __getitem__(self, name: str) -> np.ndarray:
        return self.arrays[name]

    def items(self) -> Iterator[Tuple[str, np.ndarray]]:
        return iter(self.arrays.items())

    def copy(self) -> "ModelParams":
        return ModelParams(self.config, {k: v.copy() for k, v in self.arrays.items()})

    def all_finite(self) -> bool:
        return all(bool(np.isfinite(v).all()) for v in self.arrays.values())


def init_params(config: ModelConfig, rng: np.random.Generator) -> ModelParams:
    """
    随机初始化：嵌入与卷积核 ~ N(0, init_std²)；P 为矩形单位阵（主对角线为 1）。
    """
    arrays: Dict[str, np.ndarray] = {}
    for name, shape in expected_shapes(config).items():
        if name == "P":
            arrays[name] = np.eye(shape[0], shape[1], dtype=np.float64)
        else:
            arrays[name] = rng.normal(0.0, config.init_std, size=shape)
    return ModelParams(config, arrays)


@dataclass
class RowGrad:
    """
    参数数组的行稀疏梯度：index 为去重后的行号，values[i] 对应第 index[i] 行。
    """

    index: np.ndarray
    values: np.ndarray

    @classmethod
    def accumulate(
        cls, rows: np.ndarray, values: np.ndarray, row_shape: Tuple[int, ...]
    ) -> "RowGrad":
        rows = np.asarray(rows, dtype=np.int64).reshape(-1)
        values = np.asarray(values, dtype=np.float64).reshape((-1, *row_shape))
        index, inverse = np.unique(rows, return_inverse=True)
        summed = np.zeros((index.shape[0], *row_shape), dtype=np.float64)
        np.add.at(summed, inverse.reshape(-1), values)
        return cls(index=index, values=summed)

    @classmethod
    def full(cls, values: np.ndarray) -> "RowGrad":
        values = np.asarray(values, dtype=np.float64)
        return cls(index=np.arange(values.shape[0]), values=values)

    def to_dense(self, shape: Tuple[int, ...]) -> np.ndarray:
        dense = np.zeros(shape, dtype=np.float64)
        np.add.at(dense, self.index, self.values)
        return dense


Gradients = Dict[str, RowGrad]


def merge_gradients(parts: list[Gradients]) -> Gradients:
    """把多份行稀疏梯度按参数名合并（同一行相加）"""
    merged: Gradients = {}
    names = {name for part in parts for name in part}
    for name in sorted(names):
        chunks = [part[name] for part in parts if name in part]
        row_shape = chunks[0].values.shape[1:]
        rows = np.concatenate([c.index for c in chunks])
        values = np.concatenate([c.values for c in chunks])
        merged[name] = RowGrad.accumulate(rows, values, row_shape)
    return merged
