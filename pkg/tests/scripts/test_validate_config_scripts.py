from __future__ import annotations

import importlib.util
from pathlib import Path
from types import ModuleType

import pytest

from hyperkgc.infrastructure.config import training_defaults as td

SCRIPTS = Path(__file__).resolve().parents[2] / "scripts"


def _load_script(name: str) -> ModuleType:
    spec = importlib.util.spec_from_file_location(name, SCRIPTS / f"{name}.py")
    assert spec is not None and spec.loader is not None
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def test_runtime_constants_are_valid() -> None:
    mod = _load_script("validate_runtime_constants")
    mod.validate_runtime_constants()
    assert mod.main() == 0


def test_runtime_constants_reject_path_like_filename(
    monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
) -> None:
    mod = _load_script("validate_runtime_constants")
    monkeypatch.setattr(mod.constants, "TRAIN_FILENAME", "data/train.txt")
    with pytest.raises(ValueError, match="TRAIN_FILENAME"):
        mod.validate_runtime_constants()
    assert mod.main() == 1
    assert capsys.readouterr().err.startswith("ERROR: ")


def test_runtime_constants_reject_duplicate_filenames(
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    mod = _load_script("validate_runtime_constants")
    monkeypatch.setattr(mod.constants, "VALID_FILENAME", mod.constants.TEST_FILENAME)
    with pytest.raises(ValueError, match="重复"):
        mod.validate_runtime_constants()


def test_training_defaults_script_reports_bad_file(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
) -> None:
    mod = _load_script("validate_training_defaults")
    td.get_training_defaults.cache_clear()
    try:
        assert mod.main() == 0

        bad = tmp_path / "training_defaults.yaml"
        bad.write_text("version: 99\n", encoding="utf-8")
        monkeypatch.setattr(td, "TRAINING_DEFAULTS_FILE", bad)
        td.get_training_defaults.cache_clear()
        assert mod.main() == 1
        assert "ERROR: " in capsys.readouterr().err
    finally:
        td.get_training_defaults.cache_clear()
