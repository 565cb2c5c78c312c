from __future__ import annotations

from pathlib import Path

import pytest
import yaml

from hyperkgc.application.commands.convert import ConvertOptions, run_convert
from hyperkgc.domain.models.fact import DatasetError, MalformedGroupError


def _write(path: Path, lines: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{x}\n" for x in lines), encoding="utf-8")


def _read(path: Path) -> list[str]:
    return path.read_text(encoding="utf-8").splitlines()


def _dataset(directory: Path) -> Path:
    _write(directory / "train.txt", ["r\ta\tb\tc", "s\ta\tb"])
    _write(directory / "test.txt", ["r\tc\tb\ta"])
    return directory


def test_reify_dataset_directory(tmp_path: Path) -> None:
    out = tmp_path / "out"
    result = run_convert(ConvertOptions(mode="reify", data=_dataset(tmp_path / "in"), out=out))

    assert _read(out / "train.txt") == [
        "r__pos1\t_aux_0\ta",
        "r__pos2\t_aux_0\tb",
        "r__pos3\t_aux_0\tc",
        "s\ta\tb",
    ]
    assert _read(out / "test.txt") == [
        "r__pos1\t_aux_1\tc",
        "r__pos2\t_aux_1\tb",
        "r__pos3\t_aux_1\ta",
    ]
    summary = result["summary"]
    assert summary["facts_before"] == {"train.txt": 2, "valid.txt": 0, "test.txt": 1}
    assert summary["facts_after"] == {"train.txt": 4, "valid.txt": 0, "test.txt": 3}
    assert summary["new_entities"] == 2

    on_disk = yaml.safe_load((out / "convert_summary.yaml").read_text(encoding="utf-8"))
    assert on_disk["mode"] == "reify"


def test_reify_then_unreify_restores_facts(tmp_path: Path) -> None:
    reified = tmp_path / "reified"
    run_convert(ConvertOptions(mode="reify", data=_dataset(tmp_path / "in"), out=reified))
    restored = tmp_path / "restored"
    result = run_convert(ConvertOptions(mode="unreify", data=reified, out=restored))

    assert _read(restored / "train.txt") == ["r\ta\tb\tc", "s\ta\tb"]
    assert _read(restored / "test.txt") == ["r\tc\tb\ta"]
    assert result["summary"]["malformed_groups"] == []


def test_clique_expansion(tmp_path: Path) -> None:
    out = tmp_path / "out"
    run_convert(ConvertOptions(mode="clique", data=_dataset(tmp_path / "in"), out=out))
    assert _read(out / "train.txt") == [
        "r__pair1_2\ta\tb",
        "r__pair1_3\ta\tc",
        "r__pair2_3\tb\tc",
        "s\ta\tb",
    ]


def test_single_file_input_keeps_file_name(tmp_path: Path) -> None:
    src = tmp_path / "facts.txt"
    _write(src, ["r\ta\tb\tc\td"])
    out = tmp_path / "out"
    result = run_convert(ConvertOptions(mode="reify", data=src, out=out))
    assert result["files"] == [str(out / "facts.txt")]
    assert len(_read(out / "facts.txt")) == 4


def test_relation_allowlist_filters_before_conversion(tmp_path: Path) -> None:
    allow = tmp_path / "relations.txt"
    _write(allow, ["s"])
    out = tmp_path / "out"
    run_convert(
        ConvertOptions(
            mode="reify",
            data=_dataset(tmp_path / "in"),
            out=out,
            relation_allowlist=allow,
        )
    )
    assert _read(out / "train.txt") == ["s\ta\tb"]
    assert _read(out / "test.txt") == []


def test_unreify_drops_numeric_and_single_entity_facts(tmp_path: Path) -> None:
    src = tmp_path / "raw.txt"
    _write(
        src,
        [
            "p__pos2\t_aux_0\ty",
            "p__pos1\t_aux_0\tx",
            "p__pos1\t_aux_1\t1990",
            "p__pos2\t_aux_1\tz",
            "lonely\tq",
            "p__pos1\t_aux_2\tw",
        ],
    )
    out = tmp_path / "out"
    result = run_convert(ConvertOptions(mode="unreify", data=src, out=out))

    assert _read(out / "raw.txt") == ["p\tx\ty"]
    assert result["summary"]["dropped"] == {
        "single_entity": 1,
        "numeric": 1,
        "singleton_groups": 1,
    }


def test_unreify_malformed_group(tmp_path: Path) -> None:
    src = tmp_path / "raw.txt"
    _write(
        src,
        [
            "p__pos1\t_aux_0\tx",
            "p__pos1\t_aux_0\ty",
            "p__pos1\t_aux_1\tx",
            "p__pos2\t_aux_1\ty",
        ],
    )
    with pytest.raises(MalformedGroupError):
        run_convert(ConvertOptions(mode="unreify", data=src, out=tmp_path / "a"))

    result = run_convert(
        ConvertOptions(mode="unreify", data=src, out=tmp_path / "b", skip_bad=True)
    )
    assert _read(tmp_path / "b" / "raw.txt") == ["p\tx\ty"]
    assert len(result["summary"]["malformed_groups"]) == 1


def test_invalid_mode_and_pattern(tmp_path: Path) -> None:
    data = _dataset(tmp_path / "in")
    with pytest.raises(DatasetError):
        run_convert(ConvertOptions(mode="flatten", data=data, out=tmp_path / "out"))
    with pytest.raises(DatasetError):
        run_convert(
            ConvertOptions(mode="unreify", data=data, out=tmp_path / "out", aux_pattern="(")
        )
