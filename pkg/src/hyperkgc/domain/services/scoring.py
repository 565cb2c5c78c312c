"""
打分函数：HypE、HSimplE、m-DistMult、m-CP，以及 r-SimplE 使用的二元 SimplE。

两条实现路径：
- 单事实函数（score_hype / score_hsimple / ...）：直接用 mathkernel 逐项组合，
  语义最直观，作为参考实现；
- 批量模型（ScoreModel 子类）：numpy 向量化的前向/反向，训练与评估都走这条路径。

所有模型的打分都可以写成 dotsum(r, F_1, ..., F_δ)：F_j 为第 j 个位置上的"因子向量"，
padding 位置的因子恒为全 1 向量，不影响乘积。
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from hyperkgc.domain.models.fact import Fact
from hyperkgc.domain.models.model_config import (
    ArityError,
    ModelConfig,
    ModelConfigError,
    ModelKind,
    PositionError,
)
from hyperkgc.domain.models.params import Gradients, ModelParams, RowGrad
from hyperkgc.domain.services.mathkernel import circshift, conv1d, dotsum

PAD = -1


# ==================== 单事实参考实现 ====================


def _require_kind(params: ModelParams, *kinds: ModelKind) -> ModelConfig:
    config = params.config
    if config.kind not in kinds:
        expected = "/".join(str(k) for k in kinds)
        raise ModelConfigError(f"参数属于 {config.kind}，此处需要 {expected}")
    return config


def _require_arity(config: ModelConfig, fact: Fact) -> None:
    if fact.arity > config.max_arity:
        raise ArityError(f"事实元数 {fact.arity} 超过 δ={config.max_arity}")


def position_transform(
    e: np.ndarray, i: int, omega: np.ndarray, P: np.ndarray, stride: int
) -> np.ndarray:
    """
    f(e, i) = concat(e * ω_{i,1}, ..., e * ω_{i,n}) · P

    Args:
        e: 实体嵌入（长度 d）
        i: 位置，1..δ
        omega: (δ, n, l) 位置卷积核
        P: (n·q, d_r) 投影矩阵
        stride: 卷积步长 s
    """
    if not 1 <= i <= omega.shape[0]:
        raise PositionError(f"位置 {i} 超出 1..{omega.shape[0]}")
    maps = [conv1d(e, omega[i - 1, k], stride) for k in range(omega.shape[1])]
    return np.concatenate(maps) @ P


def score_hype(params: ModelParams, fact: Fact) -> float:
    """φ = dotsum(r, f(e_1, 1), ..., f(e_k, k))"""
    config = _require_kind(params, ModelKind.HYPE)
    _require_arity(config, fact)
    vectors = [params["R"][fact.relation]]
    for pos, entity in enumerate(fact.entities, start=1):
        vectors.append(
            position_transform(
                params["E"][entity], pos, params["omega"], params["P"], config.stride
            )
        )
    return dotsum(vectors)


def score_hsimple(params: ModelParams, fact: Fact) -> float:
    """φ = dotsum(r, e_1, shift(e_2, d/δ), ..., shift(e_k, d·(k−1)/δ))"""
    config = _require_kind(params, ModelKind.HSIMPLE)
    _require_arity(config, fact)
    step = config.shift_step
    vectors = [params["R"][fact.relation]]
    for j, entity in enumerate(fact.entities):
        vectors.append(circshift(params["E"][entity], j * step))
    return dotsum(vectors)


def score_mdistmult(params: ModelParams, fact: Fact) -> float:
    """φ = dotsum(r, e_1, ..., e_k)"""
    config = _require_kind(params, ModelKind.MDISTMULT)
    _require_arity(config, fact)
    return dotsum([params["R"][fact.relation], *(params["E"][e] for e in fact.entities)])


def score_mcp(params: ModelParams, fact: Fact) -> float:
    """φ = dotsum(r, e_1^(1), ..., e_k^(k))，每个实体取其位置对应的副本"""
    config = _require_kind(params, ModelKind.MCP)
    _require_arity(config, fact)
    vectors = [params["R"][fact.relation]]
    for j, entity in enumerate(fact.entities):
        vectors.append(params["E"][entity, j])
    return dotsum(vectors)


def score_simple_binary(params: ModelParams, fact: Fact) -> float:
    """φ = dotsum(r^(1), h^(1), t^(2)) + dotsum(r^(2), t^(1), h^(2))"""
    _require_kind(params, ModelKind.RSIMPLE)
    if fact.arity != 2:
        raise ArityError(f"SimplE 只接受二元事实，当前元数 {fact.arity}")
    h, t = fact.entities
    E, R = params["E"], params["R"]
    r = R[fact.relation]
    return dotsum([r[0], E[h, 0], E[t, 1]]) + dotsum([r[1], E[t, 0], E[h, 1]])


_SCORE_FUNCTIONS = {
    ModelKind.HYPE: score_hype,
    ModelKind.HSIMPLE: score_hsimple,
    ModelKind.MDISTMULT: score_mdistmult,
    ModelKind.MCP: score_mcp,
    ModelKind.RSIMPLE: score_simple_binary,
}


def score_fact(params: ModelParams, fact: Fact) -> float:
    return _SCORE_FUNCTIONS[params.config.kind](params, fact)


def score_gradients(params: ModelParams, fact: Fact) -> Gradients:
    """单条事实的 ∂φ/∂θ（行稀疏；未涉及的参数行不出现）"""
    model = build_model(params.config)
    batch = FactBatch.from_facts([fact], params.config.max_arity)
    cache = model.forward(params, batch)
    return model.backward(params, cache, np.ones(1))


# ==================== 批量模型 ====================


@dataclass(frozen=True)
class FactBatch:
    """
    一批事实的数组表示：entities 用 PAD(-1) 补齐到 δ 列。
    """

    relations: np.ndarray  # (B,)
    entities: np.ndarray  # (B, δ)
    arities: np.ndarray  # (B,)

    @classmethod
    def from_facts(cls, facts: Sequence[Fact], max_arity: int) -> "FactBatch":
        size = len(facts)
        relations = np.empty(size, dtype=np.int64)
        entities = np.full((size, max_arity), PAD, dtype=np.int64)
        arities = np.empty(size, dtype=np.int64)
        for b, fact in enumerate(facts):
            if fact.arity > max_arity:
                raise ArityError(f"事实元数 {fact.arity} 超过 δ={max_arity}")
            relations[b] = fact.relation
            entities[b, : fact.arity] = fact.entities
            arities[b] = fact.arity
        return cls(relations, entities, arities)

    @classmethod
    def with_candidates(
        cls, fact: Fact, position: int, candidates: np.ndarray, max_arity: int
    ) -> "FactBatch":
        """把 fact 第 position 个位置（0-indexed）依次替换为 candidates 中的实体"""
        base = cls.from_facts([fact], max_arity)
        size = candidates.shape[0]
        entities = np.repeat(base.entities, size, axis=0)
        entities[:, position] = candidates
        return cls(
            np.repeat(base.relations, size),
            entities,
            np.repeat(base.arities, size),
        )

    def __len__(self) -> int:
        return int(self.relations.shape[0])

    @property
    def pad_mask(self) -> np.ndarray:
        """(B, δ) 布尔数组，True 表示该位置是 padding"""
        return self.entities == PAD

    @property
    def safe_entities(self) -> np.ndarray:
        return np.where(self.pad_mask, 0, self.entities)


@dataclass
class ScoreCache:
    """前向结果与反向传播需要的中间量"""

    scores: np.ndarray
    rel_vectors: np.ndarray
    factors: np.ndarray
    batch: FactBatch
    extra: Dict[str, Any] = field(default_factory=dict)


def _dropout(
    x: np.ndarray, rng: Optional[np.random.Generator], rate: float
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """inverted dropout；rng 为 None 或 rate 为 0 时不做处理"""
    if rng is None or rate <= 0.0:
        return x, None
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * mask, mask


def _apply_mask(g: np.ndarray, mask: Optional[np.ndarray]) -> np.ndarray:
    return g if mask is None else g * mask


def _exclusive_products(factors: np.ndarray) -> np.ndarray:
    """out[:, j] = Π_{m ≠ j} factors[:, m]（不使用除法，允许 0）"""
    ones = np.ones_like(factors[:, :1])
    prefix = np.cumprod(np.concatenate([ones, factors[:, :-1]], axis=1), axis=1)
    suffix = np.cumprod(
        np.concatenate([ones, factors[:, :0:-1]], axis=1), axis=1
    )[:, ::-1]
    return prefix * suffix


class ScoreModel(ABC):
    """
    批量打分模型基类。

    子类只需给出"关系向量 + 每个位置的因子向量"的构造方式及其反向传播，
    乘积与对因子的梯度由基类统一处理。
    """

    kind: ModelKind

    def __init__(self, config: ModelConfig):
        if config.kind is not self.kind:
            raise ModelConfigError(f"{type(self).__name__} 不能使用 {config.kind} 配置")
        self.config = config

    @abstractmethod
    def _factors(
        self,
        params: ModelParams,
        batch: FactBatch,
        rng: Optional[np.random.Generator],
        dropout: float,
    ) -> Tuple[np.ndarray, np.ndarray, Dict[str, Any]]:
        """返回 (关系向量 (B, D), 因子 (B, δ, D), 反向需要的中间量)"""

    @abstractmethod
    def _factor_backward(
        self,
        params: ModelParams,
        batch: FactBatch,
        extra: Dict[str, Any],
        g_rel: np.ndarray,
        g_factors: np.ndarray,
    ) -> Gradients:
        """把对关系向量与因子的梯度传回参数"""

    def check_batch(self, batch: FactBatch) -> None:
        if batch.entities.shape[1] != self.config.max_arity:
            raise ArityError(
                f"批量宽度 {batch.entities.shape[1]} 与 δ={self.config.max_arity} 不一致"
            )

    def forward(
        self,
        params: ModelParams,
        batch: FactBatch,
        *,
        rng: Optional[np.random.Generator] = None,
        dropout: float = 0.0,
    ) -> ScoreCache:
        self.check_batch(batch)
        rel, factors, extra = self._factors(params, batch, rng, dropout)
        factors = np.where(batch.pad_mask[:, :, None], 1.0, factors)
        scores = np.sum(rel * np.prod(factors, axis=1), axis=-1)
        return ScoreCache(scores, rel, factors, batch, extra)

    def backward(
        self, params: ModelParams, cache: ScoreCache, upstream: np.ndarray
    ) -> Gradients:
        """upstream[b] = ∂L/∂φ_b，返回 ∂L/∂θ"""
        up = np.asarray(upstream, dtype=np.float64)[:, None]
        g_rel = up * np.prod(cache.factors, axis=1)
        g_factors = (
            up[:, None, :]
            * cache.rel_vectors[:, None, :]
            * _exclusive_products(cache.factors)
        )
        g_factors = np.where(cache.batch.pad_mask[:, :, None], 0.0, g_factors)
        return self._factor_backward(params, cache.batch, cache.extra, g_rel, g_factors)

    def scores(self, params: ModelParams, batch: FactBatch) -> np.ndarray:
        return self.forward(params, batch).scores

    # ---------- 公共小工具 ----------

    @staticmethod
    def _relation_grad(
        batch: FactBatch, g_rel: np.ndarray, row_shape: Tuple[int, ...]
    ) -> RowGrad:
        return RowGrad.accumulate(batch.relations, g_rel, row_shape)

    @staticmethod
    def _entity_grad(
        batch: FactBatch, g_entities: np.ndarray, row_shape: Tuple[int, ...]
    ) -> RowGrad:
        valid = ~batch.pad_mask
        return RowGrad.accumulate(batch.entities[valid], g_entities[valid], row_shape)


class MDistMultModel(ScoreModel):
    kind = ModelKind.MDISTMULT

    def _factors(self, params, batch, rng, dropout):
        looked_up = params["E"][batch.safe_entities]
        factors, mask = _dropout(looked_up, rng, dropout)
        return params["R"][batch.relations], factors, {"mask": mask}

    def _factor_backward(self, params, batch, extra, g_rel, g_factors):
        d = self.config.dim
        g_entities = _apply_mask(g_factors, extra["mask"])
        return {
            "E": self._entity_grad(batch, g_entities, (d,)),
            "R": self._relation_grad(batch, g_rel, (d,)),
        }


class HSimplEModel(ScoreModel):
    kind = ModelKind.HSIMPLE

    def _shifts(self) -> List[int]:
        return [j * self.config.shift_step for j in range(self.config.max_arity)]

    def _factors(self, params, batch, rng, dropout):
        looked_up = params["E"][batch.safe_entities]
        dropped, mask = _dropout(looked_up, rng, dropout)
        factors = np.stack(
            [np.roll(dropped[:, j], -shift, axis=-1) for j, shift in enumerate(self._shifts())],
            axis=1,
        )
        return params["R"][batch.relations], factors, {"mask": mask}

    def _factor_backward(self, params, batch, extra, g_rel, g_factors):
        d = self.config.dim
        g_dropped = np.stack(
            [np.roll(g_factors[:, j], shift, axis=-1) for j, shift in enumerate(self._shifts())],
            axis=1,
        )
        g_entities = _apply_mask(g_dropped, extra["mask"])
        return {
            "E": self._entity_grad(batch, g_entities, (d,)),
            "R": self._relation_grad(batch, g_rel, (d,)),
        }


class MCPModel(ScoreModel):
    kind = ModelKind.MCP

    def _factors(self, params, batch, rng, dropout):
        positions = np.arange(self.config.max_arity)[None, :]
        looked_up = params["E"][batch.safe_entities, positions]
        factors, mask = _dropout(looked_up, rng, dropout)
        return params["R"][batch.relations], factors, {"mask": mask}

    def _factor_backward(self, params, batch, extra, g_rel, g_factors):
        delta, d = self.config.max_arity, self.config.dim
        g_copies = _apply_mask(g_factors, extra["mask"])
        # 每个实体行的形状为 (δ, d)，只有其所在位置的副本得到梯度
        size = len(batch)
        rows = np.zeros((size, delta, delta, d), dtype=np.float64)
        idx = np.arange(delta)
        rows[:, idx, idx, :] = g_copies
        return {
            "E": self._entity_grad(batch, rows, (delta, d)),
            "R": self._relation_grad(batch, g_rel, (d,)),
        }


class RSimplEModel(ScoreModel):
    """
    二元 SimplE，按拼接方式写成单个 dotsum：
    dotsum([r1, r2], [h1, h2], [t2, t1]) = SimplE(r(h, t))
    """

    kind = ModelKind.RSIMPLE

    def check_batch(self, batch: FactBatch) -> None:
        super().check_batch(batch)
        if np.any(batch.arities != 2):
            raise ArityError("SimplE 只接受二元事实")

    def _factors(self, params, batch, rng, dropout):
        size, d = len(batch), self.config.dim
        looked_up = params["E"][batch.safe_entities]  # (B, 2, 2, d)
        dropped, mask = _dropout(looked_up, rng, dropout)
        head = dropped[:, 0].reshape(size, 2 * d)
        tail = dropped[:, 1, ::-1].reshape(size, 2 * d)
        rel = params["R"][batch.relations].reshape(size, 2 * d)
        return rel, np.stack([head, tail], axis=1), {"mask": mask}

    def _factor_backward(self, params, batch, extra, g_rel, g_factors):
        size, d = len(batch), self.config.dim
        g_head = g_factors[:, 0].reshape(size, 2, d)
        g_tail = g_factors[:, 1].reshape(size, 2, d)[:, ::-1]
        g_entities = _apply_mask(np.stack([g_head, g_tail], axis=1), extra["mask"])
        return {
            "E": self._entity_grad(batch, g_entities, (2, d)),
            "R": self._relation_grad(batch, g_rel.reshape(size, 2, d), (2, d)),
        }


class HypEModel(ScoreModel):
    """
    f(e, i) 的批量实现：滑动窗口 (B, δ, q, l) 与位置卷积核做 einsum，
    拼接 n 个特征图后乘投影矩阵 P。dropout 作用在查表结果与 f(e, i) 输出上。
    """

    kind = ModelKind.HYPE

    def _windows(self, x: np.ndarray) -> np.ndarray:
        config = self.config
        windows = np.lib.stride_tricks.sliding_window_view(
            x, config.filter_length, axis=-1
        )
        return windows[:, :, :: config.stride][:, :, : config.feature_map_size]

    def _factors(self, params, batch, rng, dropout):
        size, delta = len(batch), self.config.max_arity
        looked_up = params["E"][batch.safe_entities]
        x, mask_in = _dropout(looked_up, rng, dropout)
        windows = self._windows(x)  # (B, δ, q, l)
        maps = np.einsum("bjtu,jku->bjkt", windows, params["omega"])  # (B, δ, n, q)
        concat = maps.reshape(size, delta, -1)
        projected = concat @ params["P"]
        factors, mask_out = _dropout(projected, rng, dropout)
        extra = {
            "windows": windows,
            "concat": concat,
            "mask_in": mask_in,
            "mask_out": mask_out,
        }
        return params["R"][batch.relations], factors, extra

    def _factor_backward(self, params, batch, extra, g_rel, g_factors):
        config = self.config
        size, delta = len(batch), config.max_arity
        n, q, l, s = (
            config.filters,
            config.feature_map_size,
            config.filter_length,
            config.stride,
        )

        g_projected = _apply_mask(g_factors, extra["mask_out"])
        g_P = np.einsum("bjm,bjo->mo", extra["concat"], g_projected)
        g_maps = (g_projected @ params["P"].T).reshape(size, delta, n, q)
        g_omega = np.einsum("bjkt,bjtu->jku", g_maps, extra["windows"])
        g_windows = np.einsum("bjkt,jku->bjtu", g_maps, params["omega"])

        g_x = np.zeros((size, delta, config.dim), dtype=np.float64)
        span = s * (q - 1) + 1
        for u in range(l):
            g_x[:, :, u : u + span : s] += g_windows[:, :, :, u]
        g_entities = _apply_mask(g_x, extra["mask_in"])

        return {
            "E": self._entity_grad(batch, g_entities, (config.dim,)),
            "R": self._relation_grad(batch, g_rel, (config.relation_dim,)),
            "omega": RowGrad.full(g_omega),
            "P": RowGrad.full(g_P),
        }


_MODEL_CLASSES = {
    cls.kind: cls
    for cls in (HypEModel, HSimplEModel, MDistMultModel, MCPModel, RSimplEModel)
}


def build_model(config: ModelConfig) -> ScoreModel:
    return _MODEL_CLASSES[config.kind](config)
