from __future__ import annotations

from pathlib import Path

import pytest

from hyperkgc.infrastructure.config import training_defaults as td
from hyperkgc.shared.constants import PROJECT_ROOT

VALID_YAML = """
version: 1
model:
  dim: 64
  filters: 3
  filter_length: 4
  stride: 1
  init_std: 0.05
training:
  epochs: 10
  batch_size: 32
  negative_ratio: 5
  eval_every: 2
  lr: "0.1"
  dropout: 0.2
  seed: 7
  adagrad_epsilon: 1.0e-8
  aux_fit_steps: 0
evaluation:
  hits_at: [10, 1, 3, 1]
  max_enumeration: 5000
""".lstrip()


def _write_yaml(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def test_get_training_defaults_parses_and_normalizes(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    defaults_file = tmp_path / "training_defaults.yaml"
    _write_yaml(defaults_file, VALID_YAML)

    monkeypatch.setattr(td, "TRAINING_DEFAULTS_FILE", defaults_file)
    td.get_training_defaults.cache_clear()

    data = td.get_training_defaults()
    assert data.model.dim == 64
    assert data.model.init_std == 0.05
    assert data.training.lr == 0.1
    assert data.training.adagrad_epsilon == 1e-8
    assert data.evaluation.hits_at == (1, 3, 10)
    td.get_training_defaults.cache_clear()


def test_get_training_defaults_raises_on_version_mismatch(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    defaults_file = tmp_path / "training_defaults.yaml"
    _write_yaml(defaults_file, "version: 0\n")

    monkeypatch.setattr(td, "TRAINING_DEFAULTS_FILE", defaults_file)
    td.get_training_defaults.cache_clear()

    with pytest.raises(td.DefaultsError) as exc:
        td.get_training_defaults()
    assert "版本" in exc.value.args[0]
    td.get_training_defaults.cache_clear()


def test_get_training_defaults_raises_on_missing_file(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    monkeypatch.setattr(td, "TRAINING_DEFAULTS_FILE", tmp_path / "nope.yaml")
    td.get_training_defaults.cache_clear()
    with pytest.raises(td.DefaultsError):
        td.get_training_defaults()
    td.get_training_defaults.cache_clear()


@pytest.mark.parametrize(
    "old, new",
    [
        ("dropout: 0.2", "dropout: 1.0"),
        ("batch_size: 32", "batch_size: 0"),
        ("adagrad_epsilon: 1.0e-8", "adagrad_epsilon: 0"),
        ("hits_at: [10, 1, 3, 1]", "hits_at: []"),
        ("dim: 64", "dim: true"),
    ],
)
def test_parse_defaults_rejects_out_of_range_values(old: str, new: str) -> None:
    import yaml

    data = yaml.safe_load(VALID_YAML.replace(old, new))
    with pytest.raises(td.DefaultsError):
        td.parse_defaults(data)


def test_repository_defaults_file_is_valid() -> None:
    data = td.parse_defaults(td._load_yaml(PROJECT_ROOT / "training_defaults.yaml"))
    assert data.model.dim == 200
    assert data.training.epochs == 500
    assert data.training.batch_size == 128
    assert data.training.negative_ratio == 10
    assert data.training.eval_every == 50
    assert data.evaluation.max_enumeration == 10**6
