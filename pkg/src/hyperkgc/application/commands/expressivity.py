"""
完全表达能力检查命令

对世界文件或若干随机世界，分别构造 HypE 与 HSimplE 实例并枚举验证；两者都通过时成功。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, TypedDict

import numpy as np

from hyperkgc.domain.models.fact import Vocab
from hyperkgc.domain.models.params import ModelParams
from hyperkgc.domain.models.world import ExpressivityError, World, random_world
from hyperkgc.domain.services.expressivity import (
    SeparationReport,
    construct_hsimple,
    construct_hype,
    tamper,
    verify_separation,
)
from hyperkgc.infrastructure.checkpoints.checkpoint import (
    Checkpoint,
    save_checkpoint,
    vocab_hash,
)
from hyperkgc.infrastructure.config.training_defaults import get_training_defaults
from hyperkgc.infrastructure.datasets.fact_files import (
    load_dataset,
    read_facts,
    write_facts,
)
from hyperkgc.shared.constants import TEST_FILENAME, TRAIN_FILENAME

logger = logging.getLogger(__name__)

CONSTRUCTIONS = {"hype": construct_hype, "hsimple": construct_hsimple}


@dataclass(frozen=True)
class ExpressivityOptions:
    world: Optional[Path] = None
    random: bool = False
    entities: int = 5
    relations: int = 3
    max_arity: int = 4
    facts: int = 8
    trials: int = 1
    seed: int = 0
    tamper: bool = False
    max_tuples: Optional[int] = None
    out: Optional[Path] = None


@dataclass
class ModelTally:
    passed: int = 0
    failed: int = 0


ExpressivityCommandResult = TypedDict(
    "ExpressivityCommandResult",
    {
        "passed": bool,
        "worlds": int,
        "lines": List[str],
        "tally": Dict[str, ModelTally],
    },
)


def load_world(path: Path) -> World:
    """世界文件与数据集事实文件格式相同；文件中的事实即 τ"""
    vocab = Vocab()
    facts = read_facts(path, vocab)
    return World(vocab=vocab, facts=list(dict.fromkeys(facts)))


def _worlds(options: ExpressivityOptions) -> List[World]:
    if options.world is not None and options.random:
        raise ExpressivityError("--world 与 --random 只能二选一")
    if options.world is not None:
        return [load_world(options.world)]
    if not options.random:
        raise ExpressivityError("需要 --world FILE 或 --random")
    if options.trials < 1:
        raise ExpressivityError(f"trials 必须 ≥ 1：{options.trials}")
    rng = np.random.default_rng(options.seed)
    return [
        random_world(
            rng,
            entities=options.entities,
            relations=options.relations,
            max_arity=options.max_arity,
            facts=options.facts,
        )
        for _ in range(options.trials)
    ]


def _export(out_dir: Path, world: World, constructed: Dict[str, ModelParams]) -> None:
    """把世界写成数据集目录（τ 放在 test.txt），并为每个构造写一个检查点"""
    write_facts(out_dir / TRAIN_FILENAME, [], world.vocab)
    write_facts(out_dir / TEST_FILENAME, world.facts, world.vocab)
    dataset_hash = vocab_hash(load_dataset(out_dir).vocab)
    for name, params in constructed.items():
        save_checkpoint(
            out_dir / f"{name}.hkc",
            Checkpoint(params=params, vocab=world.vocab, dataset_vocab_hash=dataset_hash),
            dtype="<f8",
        )


def run_expressivity(options: ExpressivityOptions) -> ExpressivityCommandResult:
    """
    Raises:
        EnumerationBoundError: 某个世界需要枚举的元组数超过上限
    """
    max_tuples = options.max_tuples or get_training_defaults().evaluation.max_enumeration
    worlds = _worlds(options)
    tally = {name: ModelTally() for name in CONSTRUCTIONS}
    lines: List[str] = []

    for idx, world in enumerate(worlds):
        constructed: Dict[str, ModelParams] = {}
        for name, construct in CONSTRUCTIONS.items():
            params = construct(world)
            if options.tamper:
                params = tamper(params)
            constructed[name] = params
            report: SeparationReport = verify_separation(
                params, world, max_tuples=max_tuples
            )
            lines.append(f"world={idx}\t|τ|={len(world.facts)}\t{report.to_text(world)}")
            if report.passed:
                tally[name].passed += 1
            else:
                tally[name].failed += 1

        if options.out is not None:
            target = options.out if len(worlds) == 1 else options.out / f"world_{idx}"
            _export(target, world, constructed)

    for name, counts in tally.items():
        lines.append(f"{name}: {counts.passed}/{len(worlds)} passed")
        logger.info("%s：%d/%d 个世界通过", name, counts.passed, len(worlds))

    passed = all(counts.failed == 0 for counts in tally.values())
    return {"passed": passed, "worlds": len(worlds), "lines": lines, "tally": tally}
