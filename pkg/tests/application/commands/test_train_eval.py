from __future__ import annotations

from pathlib import Path
from typing import List

import numpy as np
import pandas as pd
import pytest

from hyperkgc.application.commands.eval import EvalOptions, run_eval
from hyperkgc.application.commands.train import TrainOptions, run_train
from hyperkgc.domain.models.fact import DatasetError
from hyperkgc.domain.models.model_config import ModelConfigError, ModelKind
from hyperkgc.infrastructure.checkpoints.checkpoint import (
    VocabMismatchError,
    load_checkpoint,
)


def _lines(rng: np.random.Generator, count: int) -> List[str]:
    seen: set[str] = set()
    out: List[str] = []
    while len(out) < count:
        if rng.random() < 0.5:
            ents = rng.integers(0, 10, 3)
            line = "r\t" + "\t".join(f"e{x}" for x in ents)
        else:
            ents = rng.integers(0, 10, 2)
            line = "s\t" + "\t".join(f"e{x}" for x in ents)
        if line not in seen:
            seen.add(line)
            out.append(line)
    return out


def _write_dataset(directory: Path, *, seed: int = 0) -> None:
    lines = _lines(np.random.default_rng(seed), 40)
    directory.mkdir(parents=True, exist_ok=True)
    for name, part in (
        ("train.txt", lines[:30]),
        ("valid.txt", lines[30:35]),
        ("test.txt", lines[35:]),
    ):
        (directory / name).write_text("".join(f"{x}\n" for x in part), encoding="utf-8")


def _train_options(model: str, data: Path, out: Path, **overrides: object) -> TrainOptions:
    values: dict[str, object] = {
        "model": model,
        "data": data,
        "out": out,
        "dim": 6,
        "epochs": 4,
        "batch_size": 8,
        "eval_every": 2,
        "negative_ratio": 2,
        "lr": 0.1,
        "seed": 0,
        "aux_fit_steps": 3,
    }
    values.update(overrides)
    return TrainOptions(**values)  # type: ignore[arg-type]


@pytest.mark.parametrize("model", ["hype", "hsimple", "m-distmult", "m-cp"])
def test_train_then_eval_writes_checkpoint_log_and_report(
    tmp_path: Path, model: str
) -> None:
    data = tmp_path / "data"
    _write_dataset(data)
    out = tmp_path / "out"

    result = run_train(_train_options(model, data, out))
    assert Path(result["checkpoint_path"]).exists()
    assert result["best_epoch"] in (2, 4)
    assert result["best_valid_mrr"] is not None
    assert 0.0 < result["best_valid_mrr"] <= 1.0

    log = Path(result["log_path"]).read_text(encoding="utf-8").splitlines()
    assert [line.split("\t")[0] for line in log] == ["2", "4"]

    checkpoint = load_checkpoint(Path(result["checkpoint_path"]))
    assert checkpoint.params.config.kind is ModelKind.from_str(model)
    assert checkpoint.params.config.max_arity == 3
    assert checkpoint.training["best_epoch"] == result["best_epoch"]

    evaluated = run_eval(
        EvalOptions(data=data, checkpoint=Path(result["checkpoint_path"]), out=out)
    )
    report = evaluated["report"]
    assert evaluated["facts_evaluated"] == 5
    assert report.tasks == sum(
        len(line.split("\t")) - 1
        for line in (data / "test.txt").read_text(encoding="utf-8").splitlines()
    )
    assert 0.0 < report.mrr <= 1.0
    assert Path(evaluated["tsv_path"]).read_text(encoding="utf-8").startswith("subset\tmrr")
    assert Path(evaluated["yaml_path"]).exists()


def test_training_is_reproducible_for_fixed_seed(tmp_path: Path) -> None:
    data = tmp_path / "data"
    _write_dataset(data)
    first = run_train(_train_options("m-distmult", data, tmp_path / "a", float64=True))
    second = run_train(_train_options("m-distmult", data, tmp_path / "b", float64=True))

    a = load_checkpoint(Path(first["checkpoint_path"])).params
    b = load_checkpoint(Path(second["checkpoint_path"])).params
    for name, arr in a.items():
        np.testing.assert_array_equal(arr, b[name])
    assert first["best_valid_mrr"] == second["best_valid_mrr"]


def test_r_simple_trains_on_reified_data_and_evaluates_original_facts(
    tmp_path: Path,
) -> None:
    data = tmp_path / "data"
    _write_dataset(data)
    out = tmp_path / "out"

    result = run_train(_train_options("r-simple", data, out, dim=4))
    checkpoint = load_checkpoint(Path(result["checkpoint_path"]))
    assert checkpoint.params.config.max_arity == 2
    assert "r__pos1" in checkpoint.vocab.relation_names
    assert any(name.startswith("_aux_") for name in checkpoint.vocab.entity_names)

    evaluated = run_eval(
        EvalOptions(data=data, checkpoint=Path(result["checkpoint_path"]), out=out)
    )
    assert evaluated["facts_evaluated"] == 5
    assert 0.0 < evaluated["report"].mrr <= 1.0


def test_r_simple_rejects_unary_relations(tmp_path: Path) -> None:
    data = tmp_path / "data"
    _write_dataset(data)
    with (data / "train.txt").open("a", encoding="utf-8") as fh:
        fh.write("u\te1\n")
    with pytest.raises(DatasetError):
        run_train(_train_options("r-simple", data, tmp_path / "out", dim=4))


def test_hsimple_requires_dim_divisible_by_max_arity(tmp_path: Path) -> None:
    data = tmp_path / "data"
    _write_dataset(data)
    with pytest.raises(ModelConfigError):
        run_train(_train_options("hsimple", data, tmp_path / "out", dim=8))


def test_training_without_validation_logs_dash(tmp_path: Path) -> None:
    data = tmp_path / "data"
    _write_dataset(data)
    (data / "valid.txt").unlink()

    result = run_train(_train_options("m-cp", data, tmp_path / "out"))
    assert result["best_valid_mrr"] is None
    assert result["best_epoch"] == 4
    log = Path(result["log_path"]).read_text(encoding="utf-8").splitlines()
    assert all(line.endswith("\t-") for line in log)


def test_dimension_sweep_writes_one_row_per_dim(tmp_path: Path) -> None:
    data = tmp_path / "data"
    _write_dataset(data)
    out = tmp_path / "out"

    result = run_train(_train_options("m-distmult", data, out, dims=(4, 8)))
    assert result["sweep_path"] is not None
    table = pd.read_csv(result["sweep_path"], sep="\t")
    assert table["dim"].tolist() == [4, 8]
    assert (out / "dim_4" / "checkpoint.hkc").exists()
    assert (out / "dim_8" / "checkpoint.hkc").exists()
    assert result["checkpoint_path"] == str(out / "dim_8" / "checkpoint.hkc")


def test_eval_missing_positions_subset(tmp_path: Path) -> None:
    data = tmp_path / "data"
    _write_dataset(data)
    # e99 从未在训练集出现，这条测试事实一定属于缺失位置子集
    with (data / "test.txt").open("a", encoding="utf-8") as fh:
        fh.write("s\te99\te1\n")
    out = tmp_path / "out"
    result = run_train(_train_options("m-distmult", data, out))

    full = run_eval(
        EvalOptions(data=data, checkpoint=Path(result["checkpoint_path"]), out=out)
    )
    subset = run_eval(
        EvalOptions(
            data=data,
            checkpoint=Path(result["checkpoint_path"]),
            out=out / "missing",
            missing_positions=True,
        )
    )
    assert full["facts_evaluated"] == 6
    assert 1 <= subset["facts_evaluated"] <= 6


def test_eval_rejects_checkpoint_from_other_dataset(tmp_path: Path) -> None:
    data = tmp_path / "data"
    _write_dataset(data)
    result = run_train(_train_options("m-distmult", data, tmp_path / "out"))

    other = tmp_path / "other"
    _write_dataset(other)
    with (other / "test.txt").open("a", encoding="utf-8") as fh:
        fh.write("s\tnew_entity\te1\n")
    with pytest.raises(VocabMismatchError):
        run_eval(
            EvalOptions(
                data=other,
                checkpoint=Path(result["checkpoint_path"]),
                out=tmp_path / "eval",
            )
        )
