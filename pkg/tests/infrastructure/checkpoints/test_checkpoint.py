from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from hyperkgc.domain.models.fact import Vocab
from hyperkgc.domain.models.model_config import ModelConfig, ModelKind
from hyperkgc.domain.models.params import init_params
from hyperkgc.infrastructure.checkpoints.checkpoint import (
    Checkpoint,
    CheckpointError,
    VocabMismatchError,
    fnv1a_64,
    load_checkpoint,
    save_checkpoint,
    vocab_hash,
)


def _vocab() -> Vocab:
    vocab = Vocab()
    for name in ("a", "b", "c", "d"):
        vocab.entity_id(name)
    vocab.relation_id("r", 3)
    vocab.relation_id("s", 2)
    return vocab


def _checkpoint(kind: ModelKind = ModelKind.HYPE) -> Checkpoint:
    vocab = _vocab()
    config = ModelConfig(
        kind=kind,
        num_entities=vocab.num_entities,
        num_relations=vocab.num_relations,
        dim=6,
        max_arity=3,
        filters=2,
        filter_length=2,
        stride=2,
        init_std=0.5,
    )
    params = init_params(config, np.random.default_rng(0))
    return Checkpoint(
        params=params,
        vocab=vocab,
        dataset_vocab_hash=vocab_hash(vocab),
        seed=11,
        training={"epochs": 3, "lr": 0.1},
    )


def test_fnv1a_64_known_values() -> None:
    assert fnv1a_64(b"") == 0xCBF29CE484222325
    assert fnv1a_64(b"a") == 0xAF63DC4C8601EC8C


def test_vocab_hash_ignores_registration_order() -> None:
    other = Vocab()
    for name in ("d", "c", "b", "a"):
        other.entity_id(name)
    other.relation_id("s", 2)
    other.relation_id("r", 3)
    assert vocab_hash(other) == vocab_hash(_vocab())

    changed = _vocab()
    changed.entity_id("e")
    assert vocab_hash(changed) != vocab_hash(_vocab())


@pytest.mark.parametrize("kind", [ModelKind.HYPE, ModelKind.MCP])
def test_float64_round_trip_is_exact(tmp_path: Path, kind: ModelKind) -> None:
    checkpoint = _checkpoint(kind)
    path = tmp_path / "model.hkc"
    save_checkpoint(path, checkpoint, dtype="<f8")

    loaded = load_checkpoint(path)
    assert loaded.params.config == checkpoint.params.config
    assert loaded.vocab.entity_names == checkpoint.vocab.entity_names
    assert loaded.vocab.arities == checkpoint.vocab.arities
    assert loaded.seed == 11
    assert loaded.training == {"epochs": 3, "lr": 0.1}
    for name, arr in checkpoint.params.items():
        np.testing.assert_array_equal(loaded.params[name], arr)


def test_float32_round_trip_is_close(tmp_path: Path) -> None:
    checkpoint = _checkpoint()
    path = tmp_path / "model.hkc"
    save_checkpoint(path, checkpoint)

    loaded = load_checkpoint(path)
    for name, arr in checkpoint.params.items():
        np.testing.assert_allclose(loaded.params[name], arr, rtol=1e-6, atol=1e-7)


def test_header_is_yaml_followed_by_blank_line(tmp_path: Path) -> None:
    path = tmp_path / "model.hkc"
    save_checkpoint(path, _checkpoint())
    blob = path.read_bytes()
    head = blob[: blob.index(b"\n\n")].decode("utf-8")
    assert head.startswith("format: hyperkgc-checkpoint")
    assert "dataset_vocab_hash:" in head


def test_check_dataset_detects_vocab_mismatch(tmp_path: Path) -> None:
    checkpoint = _checkpoint()
    checkpoint.check_dataset(_vocab())

    other = _vocab()
    other.entity_id("zzz")
    with pytest.raises(VocabMismatchError):
        checkpoint.check_dataset(other)


def test_truncated_payload_is_rejected(tmp_path: Path) -> None:
    path = tmp_path / "model.hkc"
    save_checkpoint(path, _checkpoint())
    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(CheckpointError) as exc:
        load_checkpoint(path)
    assert "负载长度" in exc.value.args[0]


def test_invalid_files_are_rejected(tmp_path: Path) -> None:
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "missing.hkc")

    no_header = tmp_path / "no_header.hkc"
    no_header.write_bytes(b"format: hyperkgc-checkpoint")
    with pytest.raises(CheckpointError):
        load_checkpoint(no_header)

    foreign = tmp_path / "foreign.hkc"
    foreign.write_bytes(b"format: other\nversion: 1\n\n")
    with pytest.raises(CheckpointError):
        load_checkpoint(foreign)

    with pytest.raises(CheckpointError):
        save_checkpoint(tmp_path / "x.hkc", _checkpoint(), dtype="<f2")
