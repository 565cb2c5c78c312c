from __future__ import annotations

from typing import List

import numpy as np
import pytest

from hyperkgc.application.evaluation.candidates import filtered_candidates
from hyperkgc.application.evaluation.ranking import evaluate
from hyperkgc.application.training.trainer import TrainingConfig, train
from hyperkgc.domain.models.fact import Dataset, Fact, Vocab
from hyperkgc.domain.models.model_config import ModelConfig, ModelKind
from hyperkgc.domain.models.params import init_params


def _structured_dataset(seed: int = 0) -> Dataset:
    """实体按模 5 分组；r(a, b, c) 为真当且仅当 a、b、c 同组"""
    rng = np.random.default_rng(seed)
    vocab = Vocab()
    for i in range(30):
        vocab.entity_id(f"e{i}")
    vocab.relation_id("same_group", 3)
    vocab.relation_id("paired", 2)

    seen: set[Fact] = set()
    facts: List[Fact] = []
    while len(facts) < 300:
        group = int(rng.integers(0, 5))
        members = [group + 5 * int(k) for k in rng.integers(0, 6, size=3)]
        if rng.random() < 0.5:
            fact = Fact(0, tuple(members))
        else:
            fact = Fact(1, tuple(members[:2]))
        if fact not in seen:
            seen.add(fact)
            facts.append(fact)
    return Dataset(vocab, facts[:250], test=facts[250:])


@pytest.mark.slow
@pytest.mark.parametrize("kind", [ModelKind.HYPE, ModelKind.HSIMPLE, ModelKind.MDISTMULT])
def test_trained_model_beats_initialization_on_held_out_facts(kind: ModelKind) -> None:
    dataset = _structured_dataset()
    config = ModelConfig(
        kind=kind,
        num_entities=dataset.vocab.num_entities,
        num_relations=dataset.vocab.num_relations,
        dim=24,
        max_arity=3,
        init_std=0.1,
    )
    known = set(dataset.all_facts())

    before = evaluate(init_params(config, np.random.default_rng(0)), dataset.test, known)
    result = train(
        dataset,
        config,
        TrainingConfig(lr=0.1, epochs=60, batch_size=32, negative_ratio=5, eval_every=60),
    )
    after = evaluate(result.params, dataset.test, known)

    assert after.mrr > before.mrr + 0.1
    assert after.hit(10) > before.hit(10)


def _same_group_triples(num_facts: int = 200, seed: int = 0) -> Dataset:
    """30 个实体按模 5 分组，只含三元关系 same_group(a, b, c)"""
    rng = np.random.default_rng(seed)
    vocab = Vocab()
    for i in range(30):
        vocab.entity_id(f"e{i}")
    vocab.relation_id("same_group", 3)

    seen: set[Fact] = set()
    facts: List[Fact] = []
    while len(facts) < num_facts:
        group = int(rng.integers(0, 5))
        fact = Fact(0, tuple(group + 5 * int(k) for k in rng.integers(0, 6, size=3)))
        if fact not in seen:
            seen.add(fact)
            facts.append(fact)
    return Dataset(vocab, facts[:170], test=facts[170:])


def _random_ranking_mrr(dataset: Dataset, known: set[Fact]) -> float:
    """均匀随机打分时的期望 MRR：每个任务为 H_n / n，n 为过滤后候选数"""
    expected: List[float] = []
    for fact in dataset.test:
        for pos in range(1, fact.arity + 1):
            n = len(filtered_candidates(fact, pos, dataset.vocab.num_entities, known))
            expected.append(sum(1.0 / i for i in range(1, n + 1)) / n)
    return float(np.mean(expected))


@pytest.mark.slow
def test_hype_learns_group_rule_on_ternary_facts() -> None:
    dataset = _same_group_triples()
    config = ModelConfig(
        kind=ModelKind.HYPE,
        num_entities=dataset.vocab.num_entities,
        num_relations=dataset.vocab.num_relations,
        dim=32,
        max_arity=3,
    )
    known = set(dataset.all_facts())

    result = train(
        dataset,
        config,
        TrainingConfig(epochs=200, batch_size=32, negative_ratio=5, eval_every=200),
    )
    report = evaluate(result.params, dataset.test, known)

    # 组内 6 个成员对未观测的位置不可区分，MRR 上限约为 0.4
    assert report.mrr >= 2.0 * _random_ranking_mrr(dataset, known)
    assert report.hit(10) >= 0.75
