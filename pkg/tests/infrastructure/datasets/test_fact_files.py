from __future__ import annotations

import logging
from pathlib import Path

import pytest

from hyperkgc.domain.models.fact import (
    ArityConflictError,
    DatasetError,
    FactParseError,
    ReservedNameError,
    Vocab,
)
from hyperkgc.infrastructure.datasets.fact_files import (
    format_facts,
    load_dataset,
    parse_facts,
    read_allowlist,
    read_facts,
    write_dataset,
)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def test_parse_facts_registers_names_and_arity() -> None:
    vocab = Vocab()
    facts = parse_facts(["r\ta\tb\tc", "", "s\tb", "r\tc\tb\ta\r\n"], vocab)
    assert len(facts) == 3
    assert vocab.relation_names == ["r", "s"]
    assert vocab.arities == [3, 1]
    assert vocab.entity_names == ["a", "b", "c"]
    assert format_facts(facts, vocab) == ["r\ta\tb\tc", "s\tb", "r\tc\tb\ta"]


def test_parse_facts_reports_line_of_arity_conflict() -> None:
    with pytest.raises(ArityConflictError) as exc:
        parse_facts(["r\ta\tb", "r\ta\tb\tc"], Vocab(), source="train.txt")
    assert exc.value.args[0].startswith("train.txt:2 ")


def test_parse_facts_rejects_malformed_lines() -> None:
    with pytest.raises(FactParseError):
        parse_facts(["lonely"], Vocab())
    with pytest.raises(FactParseError):
        parse_facts(["r\ta\t\tb"], Vocab())


def test_parse_facts_rejects_reserved_names_unless_allowed() -> None:
    with pytest.raises(ReservedNameError):
        parse_facts(["r__pos1\t_aux_0\ta"], Vocab())
    facts = parse_facts(["r__pos1\t_aux_0\ta"], Vocab(), allow_reserved=True)
    assert len(facts) == 1


def test_parse_facts_rejects_aux_prefixed_names_unless_allowed() -> None:
    with pytest.raises(ReservedNameError) as exc:
        parse_facts(["works_at\t_aux_x\tacme"], Vocab(), source="raw.txt")
    assert exc.value.args[0].startswith("raw.txt:1 ")
    facts = parse_facts(["works_at\t_aux_x\tacme"], Vocab(), allow_reserved=True)
    assert len(facts) == 1


def test_read_facts_only_breaks_on_newlines(tmp_path: Path) -> None:
    path = tmp_path / "train.txt"
    path.write_bytes("r\ta\u2028b\tc\x0cd\r\ns\tx\ry\tz\n".encode("utf-8"))
    vocab = Vocab()
    facts = read_facts(path, vocab)
    assert format_facts(facts, vocab) == ["r\ta\u2028b\tc\x0cd", "s\tx", "y\tz"]
    assert vocab.entity_names[0] == "a\u2028b"


def test_load_dataset_shares_vocab_and_dedupes(
    tmp_path: Path, caplog: pytest.LogCaptureFixture
) -> None:
    _write(tmp_path / "train.txt", "r\ta\tb\tc\ns\ta\tb\n")
    _write(tmp_path / "valid.txt", "s\tb\tc\n")
    _write(tmp_path / "test.txt", "s\ta\tb\nr\tc\tb\ta\n")

    with caplog.at_level(logging.WARNING):
        dataset = load_dataset(tmp_path)

    assert len(dataset.train) == 2
    assert len(dataset.valid) == 1
    assert len(dataset.test) == 1
    assert dataset.vocab.max_arity == 3
    assert any("重复" in rec.getMessage() for rec in caplog.records)


def test_load_dataset_missing_parts(tmp_path: Path) -> None:
    _write(tmp_path / "train.txt", "r\ta\tb\n")
    dataset = load_dataset(tmp_path)
    assert dataset.valid == [] and dataset.test == []
    with pytest.raises(DatasetError):
        load_dataset(tmp_path, require_test=True)
    with pytest.raises(DatasetError):
        load_dataset(tmp_path / "nope")


def test_write_dataset_round_trips(tmp_path: Path) -> None:
    _write(tmp_path / "in" / "train.txt", "r\ta\tb\tc\n")
    _write(tmp_path / "in" / "test.txt", "r\tc\tb\ta\n")
    dataset = load_dataset(tmp_path / "in")
    write_dataset(tmp_path / "out", dataset)
    assert (tmp_path / "out" / "train.txt").read_text(encoding="utf-8") == "r\ta\tb\tc\n"
    assert (tmp_path / "out" / "valid.txt").read_text(encoding="utf-8") == ""
    assert load_dataset(tmp_path / "out").test == dataset.test


def test_read_allowlist(tmp_path: Path) -> None:
    path = tmp_path / "allow.txt"
    _write(path, "a\n\n b \n")
    assert read_allowlist(path) == {"a", "b"}
    assert read_allowlist(None) is None
    with pytest.raises(DatasetError):
        read_allowlist(tmp_path / "missing.txt")
