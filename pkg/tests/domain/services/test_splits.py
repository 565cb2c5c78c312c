from __future__ import annotations

import numpy as np
import pytest

from hyperkgc.domain.models.fact import DatasetError, Fact
from hyperkgc.domain.services.splits import (
    missing_positions_subset,
    observed_positions,
    random_split,
)


def test_observed_positions_are_one_indexed() -> None:
    assert observed_positions([Fact(0, (5, 6))]) == {(5, 1), (6, 2)}


def test_missing_positions_subset_keeps_unseen_entity_positions() -> None:
    train = [Fact(0, (0, 1, 2))]
    test = [
        Fact(0, (0, 1, 2)),  # 全部见过
        Fact(0, (1, 0, 2)),  # 实体 1 从未出现在位置 1
        Fact(1, (0, 1)),  # 关系不同，但 (实体, 位置) 都见过
        Fact(0, (0, 1, 3)),  # 3 从未出现
    ]
    assert missing_positions_subset(train, test) == [test[1], test[3]]


def test_random_split_sizes_and_disjointness() -> None:
    facts = [Fact(0, (i, i + 1)) for i in range(100)]
    train, valid, test = random_split(facts, [0.8, 0.1, 0.1], np.random.default_rng(0))
    assert (len(train), len(valid), len(test)) == (80, 10, 10)
    assert set(train) | set(valid) | set(test) == set(facts)
    assert not set(train) & set(valid)
    assert not set(valid) & set(test)


def test_random_split_is_reproducible() -> None:
    facts = [Fact(0, (i,)) for i in range(30)]
    first = random_split(facts, [0.5, 0.5], np.random.default_rng(7))
    second = random_split(facts, [0.5, 0.5], np.random.default_rng(7))
    assert first == second


def test_random_split_rejects_bad_fractions() -> None:
    facts = [Fact(0, (1,))]
    with pytest.raises(DatasetError):
        random_split(facts, [0.5, 0.4], np.random.default_rng(0))
    with pytest.raises(DatasetError):
        random_split(facts, [1.5, -0.5], np.random.default_rng(0))
