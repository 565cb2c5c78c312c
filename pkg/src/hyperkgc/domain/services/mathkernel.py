"""
稠密实向量基础运算（所有打分函数共用）

- dotsum: 多个等长向量逐元素相乘后求和（广义内积）
- circshift: 循环左移
- conv1d: 无 padding、不翻转卷积核的一维互相关
- finite_diff_grad: 中心差分数值梯度，用于校验解析梯度

全部为纯函数，使用 float64。
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from hyperkgc.domain.errors import DimensionError

DEFAULT_FINITE_DIFF_EPS: float = 1e-5


def as_vector(values: Sequence[float] | np.ndarray) -> np.ndarray:
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] == 0:
        raise DimensionError(f"需要非空一维向量，实际 shape={vec.shape}")
    return vec


def dotsum(vectors: Sequence[Sequence[float] | np.ndarray]) -> float:
    """
    计算 Σ_i Π_j vectors[j][i]。

    Raises:
        DimensionError: 输入为空，或某个向量长度与第一个不一致（错误信息包含其下标）
    """
    if len(vectors) == 0:
        raise DimensionError("dotsum 至少需要一个向量")

    first = as_vector(vectors[0])
    product = first.copy()
    for idx, raw in enumerate(vectors[1:], start=1):
        vec = as_vector(raw)
        if vec.shape != first.shape:
            raise DimensionError(
                f"dotsum 第 {idx} 个向量长度为 {vec.shape[0]}，应为 {first.shape[0]}"
            )
        product *= vec
    return float(product.sum())


def circshift(v: Sequence[float] | np.ndarray, x: int) -> np.ndarray:
    """循环左移：out[t] = v[(t + x) mod len(v)]"""
    vec = as_vector(v)
    if x < 0:
        raise DimensionError(f"移位步数必须非负：{x}")
    return np.roll(vec, -(x % vec.shape[0]))


def feature_map_size(d: int, l: int, s: int) -> int:
    """q = ⌊(d − l) / s⌋ + 1"""
    if s < 1:
        raise DimensionError(f"stride 必须 ≥ 1：{s}")
    if l < 1 or l > d:
        raise DimensionError(f"卷积核长度 {l} 超出向量长度 {d}")
    return (d - l) // s + 1


def conv1d(
    v: Sequence[float] | np.ndarray, w: Sequence[float] | np.ndarray, s: int
) -> np.ndarray:
    """
    valid 模式的一维互相关：out[t] = Σ_u v[t·s + u] · w[u]，t = 0..q−1。

    Raises:
        DimensionError: 卷积核比向量长，或 stride < 1
    """
    vec = as_vector(v)
    kernel = as_vector(w)
    q = feature_map_size(vec.shape[0], kernel.shape[0], s)
    windows = np.lib.stride_tricks.sliding_window_view(vec, kernel.shape[0])[::s]
    return windows[:q] @ kernel


def finite_diff_grad(
    f: Callable[[np.ndarray], float],
    x: Sequence[float] | np.ndarray,
    eps: float = DEFAULT_FINITE_DIFF_EPS,
) -> np.ndarray:
    """逐坐标中心差分：(f(x + eps·u_i) − f(x − eps·u_i)) / (2·eps)"""
    if eps <= 0:
        raise ValueError(f"eps 必须为正数：{eps}")

    base = np.array(x, dtype=np.float64)
    flat = base.reshape(-1)
    grad = np.zeros_like(flat)
    for i in range(flat.shape[0]):
        orig = flat[i]
        flat[i] = orig + eps
        f_plus = float(f(base))
        flat[i] = orig - eps
        f_minus = float(f(base))
        flat[i] = orig
        grad[i] = (f_plus - f_minus) / (2.0 * eps)
    return grad.reshape(base.shape)
