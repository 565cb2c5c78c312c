from __future__ import annotations

import pytest

from hyperkgc.domain.models.fact import (
    ArityConflictError,
    Dataset,
    DatasetError,
    Fact,
    Vocab,
    dataset_statistics,
)


def _vocab() -> Vocab:
    vocab = Vocab()
    for name in ("a", "b", "c"):
        vocab.entity_id(name)
    vocab.relation_id("r", 2)
    vocab.relation_id("s", 3)
    return vocab


def test_vocab_assigns_dense_ids_in_first_seen_order() -> None:
    vocab = _vocab()
    assert vocab.entity_id("b") == 1
    assert vocab.entity_id("d") == 3
    assert vocab.num_entities == 4
    assert vocab.find_entity("zzz") is None
    assert vocab.max_arity == 3


def test_vocab_rejects_arity_conflict() -> None:
    vocab = _vocab()
    with pytest.raises(ArityConflictError) as exc:
        vocab.relation_id("r", 3)
    assert "'r'" in exc.value.args[0]


def test_vocab_copy_is_independent() -> None:
    vocab = _vocab()
    clone = vocab.copy()
    clone.entity_id("new")
    assert vocab.find_entity("new") is None
    assert clone.find_entity("a") == 0


def test_empty_vocab_max_arity_is_one() -> None:
    assert Vocab().max_arity == 1


def test_fact_requires_entities_and_replaces_positions() -> None:
    with pytest.raises(DatasetError):
        Fact(0, ())
    fact = Fact(0, [1, 2])  # type: ignore[arg-type]
    assert fact.entities == (1, 2)
    assert fact.replace_entity(1, 0) == Fact(0, (1, 0))
    assert fact.arity == 2


def test_dataset_validate_rejects_overlap_and_bad_arity() -> None:
    vocab = _vocab()
    fact = Fact(0, (0, 1))
    with pytest.raises(DatasetError):
        Dataset(vocab, [fact], [], [fact]).validate()
    with pytest.raises(ArityConflictError):
        Dataset(vocab, [Fact(1, (0, 1))]).validate()
    with pytest.raises(DatasetError):
        Dataset(vocab, [Fact(0, (0, 9))]).validate()


def test_dataset_statistics_counts_per_arity() -> None:
    vocab = _vocab()
    dataset = Dataset(vocab, [Fact(0, (0, 1)), Fact(1, (0, 1, 2))], [], [Fact(0, (1, 2))])
    stats = dataset_statistics(dataset)
    assert stats["train"] == 2
    assert stats["test"] == 1
    assert stats["arity=2"] == 2
    assert stats["arity=3"] == 1
    assert dataset.known_facts() == frozenset(dataset.all_facts())
