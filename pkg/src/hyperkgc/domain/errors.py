"""
领域层异常基类

所有子系统的异常都继承自 `HyperKGCError`，args[0] 为面向用户的错误信息。
CLI 统一捕获该基类并以非零退出码结束。
"""


class HyperKGCError(Exception):
    """Base error with user-facing message in args[0]."""


class KernelError(HyperKGCError):
    """向量基础运算错误"""


class DimensionError(KernelError):
    """向量维度不匹配"""
