"""
命令行入口

    hyperkgc train --model hype --data jf17k/ --dim 200 --nr 10 --epochs 500 --batch 128
    hyperkgc eval --data jf17k/ --checkpoint outputs/checkpoint.hkc [--missing-positions]
    hyperkgc convert --mode reify|clique|unreify --data DIR_OR_FILE --out DIR
    hyperkgc split --data facts.txt --out DIR [--missing-positions]
    hyperkgc expressivity --random --entities 5 --relations 3 --max-arity 4 --facts 8 --trials 50

退出码：0 成功；1 领域错误或验证未通过；2 参数错误。
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from hyperkgc.application.commands.convert import (
    CONVERT_MODES,
    DEFAULT_AUX_PATTERN,
    ConvertOptions,
    run_convert,
)
from hyperkgc.application.commands.eval import EvalOptions, run_eval
from hyperkgc.application.commands.expressivity import (
    ExpressivityOptions,
    run_expressivity,
)
from hyperkgc.application.commands.split import SplitOptions, run_split
from hyperkgc.application.commands.train import TrainOptions, run_train
from hyperkgc.domain.errors import HyperKGCError
from hyperkgc.domain.models.model_config import ModelKind
from hyperkgc.shared.logger import set_global_log_level

logger = logging.getLogger(__name__)


def _int_list(text: str) -> Tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"需要逗号分隔的整数：{text!r}") from e
    if not values:
        raise argparse.ArgumentTypeError("列表不能为空")
    return values


def _fractions(text: str) -> Tuple[float, float, float]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"需要逗号分隔的三个比例：{text!r}") from e
    if len(values) != 3:
        raise argparse.ArgumentTypeError("需要 train,valid,test 三个比例")
    return values[0], values[1], values[2]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--log-level", default="INFO", help="日志级别（DEBUG/INFO/WARNING/ERROR）"
    )
    parser.add_argument("--progress", action="store_true", help="显示进度条")


def _add_train(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("train", help="训练模型，写检查点与训练日志")
    p.add_argument("--model", required=True, choices=[k.value for k in ModelKind])
    p.add_argument("--data", required=True, type=Path, help="数据集目录（train/valid/test.txt）")
    p.add_argument("--out", type=Path, help="输出目录（默认 HYPERKGC_OUTPUT_DIR）")
    p.add_argument("--dim", type=int, help="嵌入维度 d（默认 200）")
    p.add_argument("--dims", type=_int_list, help="维度扫描，如 50,100,200")
    p.add_argument("--lr", type=float, help="Adagrad 学习率（默认 0.05）")
    p.add_argument("--nr", type=int, help="负样本比例 N（默认 10）")
    p.add_argument("--dropout", type=float, help="dropout 概率（默认 0）")
    p.add_argument("--epochs", type=int, help="训练轮数（默认 500）")
    p.add_argument("--batch", type=int, help="批量大小（默认 128）")
    p.add_argument("--eval-every", type=int, help="每隔多少 epoch 计算验证 MRR（默认 50）")
    p.add_argument("--filters", type=int, help="HypE 每个位置的卷积核数 n（默认 2）")
    p.add_argument("--flen", type=int, help="HypE 卷积核长度 l（默认 2）")
    p.add_argument("--stride", type=int, help="HypE 卷积步长 s（默认 2）")
    p.add_argument("--seed", type=int, help="随机种子（默认 0）")
    p.add_argument("--aux-steps", type=int, help="r-simple 辅助实体拟合步数（默认 100）")
    p.add_argument("--float64", action="store_true", help="检查点负载使用 float64")
    _add_common(p)


def _add_eval(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("eval", help="过滤排名评估")
    p.add_argument("--data", required=True, type=Path)
    p.add_argument("--checkpoint", required=True, type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument(
        "--missing-positions",
        action="store_true",
        help="只评估含有训练中未出现过的 (实体, 位置) 的测试事实",
    )
    p.add_argument("--hits", type=_int_list, help="Hit@t 的 t 列表（默认 1,3,10）")
    _add_common(p)


def _add_convert(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("convert", help="数据集结构转换")
    p.add_argument("--mode", required=True, choices=CONVERT_MODES)
    p.add_argument("--data", required=True, type=Path, help="数据集目录或单个事实文件")
    p.add_argument("--out", type=Path)
    p.add_argument("--entity-allowlist", type=Path, help="实体白名单（每行一个名字）")
    p.add_argument("--relation-allowlist", type=Path, help="关系白名单（每行一个名字）")
    p.add_argument("--skip-bad", action="store_true", help="unreify 时跳过非法分组")
    p.add_argument(
        "--aux-pattern", default=DEFAULT_AUX_PATTERN, help="识别辅助实体名的正则"
    )
    _add_common(p)


def _add_split(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("split", help="随机划分 train/valid/test")
    p.add_argument("--data", required=True, type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--fractions", type=_fractions, default=(0.8, 0.1, 0.1))
    p.add_argument("--holdout-valid", type=float, help="从已有 train 中留出的 valid 比例")
    p.add_argument("--missing-positions", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)


def _add_expressivity(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("expressivity", help="验证 HypE/HSimplE 的完全表达构造")
    p.add_argument("--world", type=Path, help="世界文件（事实格式，全部为真）")
    p.add_argument("--random", action="store_true", help="随机生成世界")
    p.add_argument("--entities", type=int, default=5)
    p.add_argument("--relations", type=int, default=3)
    p.add_argument("--max-arity", type=int, default=4)
    p.add_argument("--facts", type=int, default=8)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tamper", action="store_true", help="验证前篡改一个嵌入元素")
    p.add_argument("--max-tuples", type=int, help="枚举元组数上限（默认 10^6）")
    p.add_argument("--out", type=Path, help="写出世界数据集与构造检查点")
    _add_common(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperkgc", description="知识超图补全：训练、评估、转换与表达能力检查"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_train(sub)
    _add_eval(sub)
    _add_convert(sub)
    _add_split(sub)
    _add_expressivity(sub)
    return parser


def _cmd_train(args: argparse.Namespace) -> int:
    result = run_train(
        TrainOptions(
            model=args.model,
            data=args.data,
            out=args.out,
            dim=args.dim,
            dims=args.dims,
            lr=args.lr,
            negative_ratio=args.nr,
            dropout=args.dropout,
            epochs=args.epochs,
            batch_size=args.batch,
            eval_every=args.eval_every,
            filters=args.filters,
            filter_length=args.flen,
            stride=args.stride,
            seed=args.seed,
            aux_fit_steps=args.aux_steps,
            float64=args.float64,
            show_progress=args.progress,
        )
    )
    mrr = result["best_valid_mrr"]
    print(f"checkpoint\t{result['checkpoint_path']}")
    print(f"log\t{result['log_path']}")
    print(f"best_epoch\t{result['best_epoch']}")
    print(f"best_valid_mrr\t{'-' if mrr is None else f'{mrr:.6f}'}")
    if result["sweep_path"]:
        print(f"dimension_sweep\t{result['sweep_path']}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    result = run_eval(
        EvalOptions(
            data=args.data,
            checkpoint=args.checkpoint,
            out=args.out,
            missing_positions=args.missing_positions,
            hits_at=args.hits,
            show_progress=args.progress,
        )
    )
    print(result["report_text"], end="")
    return 0


def _cmd_convert(args: argparse.Namespace) -> int:
    result = run_convert(
        ConvertOptions(
            mode=args.mode,
            data=args.data,
            out=args.out,
            entity_allowlist=args.entity_allowlist,
            relation_allowlist=args.relation_allowlist,
            skip_bad=args.skip_bad,
            aux_pattern=args.aux_pattern,
        )
    )
    summary = result["summary"]
    for key in ("facts_before", "facts_after"):
        for name, count in summary[key].items():
            print(f"{key}\t{name}\t{count}")
    print(f"entities\t{summary['entities_before']}\t{summary['entities_after']}")
    print(f"relations\t{summary['relations_before']}\t{summary['relations_after']}")
    for problem in summary.get("malformed_groups", []):
        print(f"malformed\t{problem}")
    return 0


def _cmd_split(args: argparse.Namespace) -> int:
    result = run_split(
        SplitOptions(
            data=args.data,
            out=args.out,
            fractions=args.fractions,
            holdout_valid=args.holdout_valid,
            missing_positions=args.missing_positions,
            seed=args.seed,
        )
    )
    for key, value in result["statistics"].items():
        print(f"{key}\t{value}")
    if result["missing_positions"] is not None:
        print(f"missing_positions\t{result['missing_positions']}")
    return 0


def _cmd_expressivity(args: argparse.Namespace) -> int:
    result = run_expressivity(
        ExpressivityOptions(
            world=args.world,
            random=args.random,
            entities=args.entities,
            relations=args.relations,
            max_arity=args.max_arity,
            facts=args.facts,
            trials=args.trials,
            seed=args.seed,
            tamper=args.tamper,
            max_tuples=args.max_tuples,
            out=args.out,
        )
    )
    for line in result["lines"]:
        print(line)
    return 0 if result["passed"] else 1


_COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "train": _cmd_train,
    "eval": _cmd_eval,
    "convert": _cmd_convert,
    "split": _cmd_split,
    "expressivity": _cmd_expressivity,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    try:
        set_global_log_level(args.log_level)
    except ValueError as e:
        parser.error(str(e))

    try:
        return _COMMANDS[args.command](args)
    except HyperKGCError as e:
        print(f"ERROR: {e.args[0] if e.args else e}", file=sys.stderr)
        return 1


def run(argv: Optional[List[str]] = None) -> None:
    raise SystemExit(main(argv))


if __name__ == "__main__":
    run()
