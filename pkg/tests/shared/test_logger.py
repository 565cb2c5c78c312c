from __future__ import annotations

import logging

import pytest

from hyperkgc.shared.logger import set_global_log_level


def test_set_global_log_level_accepts_names_and_numbers() -> None:
    root = logging.getLogger()
    previous = root.level
    try:
        set_global_log_level(" debug ")
        assert root.level == logging.DEBUG
        set_global_log_level(logging.WARNING)
        assert root.level == logging.WARNING
        assert all(h.level == logging.WARNING for h in root.handlers)
    finally:
        root.setLevel(previous)


def test_set_global_log_level_rejects_unknown_name() -> None:
    with pytest.raises(ValueError):
        set_global_log_level("LOUD")
