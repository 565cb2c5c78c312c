#!/usr/bin/env python3
from __future__ import annotations

import sys
from pathlib import Path


PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_ROOT = PROJECT_ROOT / "src"
if str(SRC_ROOT) not in sys.path:
    sys.path.insert(0, str(SRC_ROOT))


from hyperkgc.domain.models.fact import (  # noqa: E402
    AUX_ENTITY_PREFIX,
    RESERVED_INFIX,
)
from hyperkgc.shared import constants  # noqa: E402

FILENAME_CONSTANTS = (
    "TRAIN_FILENAME",
    "VALID_FILENAME",
    "TEST_FILENAME",
    "MISSING_POSITIONS_FILENAME",
    "TRAINING_LOG_FILENAME",
    "CHECKPOINT_FILENAME",
    "EVAL_REPORT_TSV_FILENAME",
    "EVAL_REPORT_YAML_FILENAME",
    "DIMENSION_SWEEP_FILENAME",
    "CONVERT_SUMMARY_FILENAME",
)


def validate_runtime_constants() -> None:
    names = []
    for label in FILENAME_CONSTANTS:
        value = getattr(constants, label, None)
        if not isinstance(value, str) or not value.strip():
            raise ValueError(f"{label} 必须是非空字符串")
        if "/" in value or "\\" in value:
            raise ValueError(f"{label} 只能是文件名，不能包含路径分隔符：{value!r}")
        names.append(value)

    if len(set(names)) != len(names):
        raise ValueError("标准文件名存在重复项")

    if not isinstance(constants.CHECKPOINT_VERSION, int) or constants.CHECKPOINT_VERSION < 1:
        raise ValueError("CHECKPOINT_VERSION 必须是 int >= 1")

    if not constants.CHECKPOINT_FORMAT.strip():
        raise ValueError("CHECKPOINT_FORMAT 必须是非空字符串")

    # 保留中缀与辅助实体前缀分别校验，前缀里不能再含中缀
    if RESERVED_INFIX in AUX_ENTITY_PREFIX:
        raise ValueError("AUX_ENTITY_PREFIX 不能包含保留中缀")


def main() -> int:
    try:
        validate_runtime_constants()
        return 0
    except Exception as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
