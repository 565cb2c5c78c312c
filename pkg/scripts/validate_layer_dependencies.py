#!/usr/bin/env python3
"""
Validate architectural layering via import rules.

Intended to run as a local pre-commit hook. Imports under `src/hyperkgc/` must point
downwards only:
- interfaces -> application -> (infrastructure / domain / shared)
- infrastructure -> (domain / shared)
- domain -> domain only (pure numerics and data types)
- shared -> nothing internal
"""

from __future__ import annotations

import ast
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator


PROJECT_ROOT = Path(__file__).resolve().parents[1]
PACKAGE = "hyperkgc"
PACKAGE_ROOT = PROJECT_ROOT / "src" / PACKAGE

LAYERS = ("application", "domain", "infrastructure", "interfaces", "shared")

# layer -> internal layers it may import (besides itself)
ALLOWED: dict[str, frozenset[str]] = {
    "interfaces": frozenset({"application", "domain", "shared"}),
    "application": frozenset({"infrastructure", "domain", "shared"}),
    "infrastructure": frozenset({"domain", "shared"}),
    "domain": frozenset(),
    "shared": frozenset(),
}

SKIP_DIR_PARTS = {"__pycache__", ".mypy_cache", ".ruff_cache"}


@dataclass(frozen=True)
class Violation:
    path: Path
    lineno: int
    layer: str
    imported: str

    def format(self) -> str:
        return f"{self.path}:{self.lineno}: [{self.layer}] 禁止依赖 {self.imported!r}"


def layer_of_path(path: Path, root: Path = PACKAGE_ROOT) -> str | None:
    try:
        parts = path.relative_to(root).parts
    except ValueError:
        return None
    if len(parts) < 2 or parts[0] not in LAYERS:
        return None
    return parts[0]


def layer_of_module(module: str) -> str | None:
    """hyperkgc.application.foo -> application；非本包或包根返回 None"""
    head, _, rest = module.partition(".")
    if head != PACKAGE or not rest:
        return None
    layer = rest.split(".", 1)[0]
    return layer if layer in LAYERS else None


def iter_imports(tree: ast.AST) -> Iterator[tuple[int, str]]:
    """绝对 import 的 (行号, 模块名)；相对 import 总在包内，忽略"""
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            for alias in node.names:
                yield node.lineno, alias.name
        elif isinstance(node, ast.ImportFrom) and not node.level and node.module:
            yield node.lineno, node.module


def check_file(path: Path, root: Path = PACKAGE_ROOT) -> list[Violation]:
    layer = layer_of_path(path, root)
    if layer is None:
        return []
    tree = ast.parse(path.read_text(encoding="utf-8"), filename=str(path))
    violations = []
    for lineno, module in iter_imports(tree):
        target = layer_of_module(module)
        if target is None or target == layer or target in ALLOWED[layer]:
            continue
        violations.append(Violation(path, lineno, layer, module))
    return violations


def check_tree(root: Path = PACKAGE_ROOT) -> list[Violation]:
    found: list[Violation] = []
    for path in sorted(root.rglob("*.py")):
        if SKIP_DIR_PARTS.intersection(path.parts):
            continue
        found.extend(check_file(path, root))
    return found


def main() -> int:
    try:
        violations = check_tree()
    except SyntaxError as e:
        print(f"ERROR: 语法错误：{e}", file=sys.stderr)
        return 1

    if violations:
        print("ERROR: 分层依赖校验失败：检测到不允许的跨层 import。", file=sys.stderr)
        for v in violations:
            print(f"- {v.format()}", file=sys.stderr)
        print(
            "建议：调整依赖方向（interfaces -> application -> infra/domain/shared）。",
            file=sys.stderr,
        )
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
