"""
全局常量定义

存储项目级别的常量，供所有模块使用
"""

import os
from pathlib import Path

# 项目根目录路径（仓库根目录）
PROJECT_ROOT = Path(__file__).resolve().parents[3]


def get_path_from_env(env_var: str, default: Path) -> Path:
    """
    从环境变量获取路径，如果未设置则使用默认值

    Args:
        env_var: 环境变量名称
        default: 默认路径

    Returns:
        Path: 配置的路径
    """
    env_value = os.getenv(env_var)
    if env_value:
        return Path(env_value)
    return default


# 训练默认值文件路径（系统规则，非用户输入）
TRAINING_DEFAULTS_FILE = get_path_from_env(
    "HYPERKGC_DEFAULTS_FILE", PROJECT_ROOT / "training_defaults.yaml"
)

# 未指定 --out 时的输出目录
OUTPUT_DIR = get_path_from_env("HYPERKGC_OUTPUT_DIR", PROJECT_ROOT / "outputs")

# ==================== 内部约定字符串（跨模块共享） ====================

# 数据集目录下的标准文件名
TRAIN_FILENAME = "train.txt"
VALID_FILENAME = "valid.txt"
TEST_FILENAME = "test.txt"
MISSING_POSITIONS_FILENAME = "test_missing_positions.txt"

# 训练/评估输出文件名
TRAINING_LOG_FILENAME = "training_log.tsv"
CHECKPOINT_FILENAME = "checkpoint.hkc"
EVAL_REPORT_TSV_FILENAME = "eval_report.tsv"
EVAL_REPORT_YAML_FILENAME = "eval_report.yaml"
DIMENSION_SWEEP_FILENAME = "dimension_sweep.tsv"
CONVERT_SUMMARY_FILENAME = "convert_summary.yaml"

# 检查点文件头标识
CHECKPOINT_FORMAT = "hyperkgc-checkpoint"
CHECKPOINT_VERSION = 1
