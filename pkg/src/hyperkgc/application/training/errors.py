from hyperkgc.domain.errors import HyperKGCError


class TrainingError(HyperKGCError):
    """Training error with user-facing message in args[0]."""


class TrainingConfigError(TrainingError):
    """训练超参数非法"""


class DegenerateLossError(TrainingError):
    """正样本没有任何负样本，softmax 损失无意义"""


class TrainingDivergedError(TrainingError):
    """损失出现 NaN/Inf"""


class CannotCorruptError(TrainingError):
    """实体数不足 2，无法构造负样本"""


class AuxFitError(TrainingError):
    """辅助实体没有可用于拟合的观测事实"""
