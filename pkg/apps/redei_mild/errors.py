"""错误类型。

说明:
- 所有业务错误都继承 `RedeiError(RuntimeError)`，并携带 CLI 退出码；
- 退出码约定: 1 校验/证书失败，2 输入非法或不满足前提，3 容量或搜索上限耗尽。
"""

from __future__ import annotations


class RedeiError(RuntimeError):
    """业务错误基类。"""

    exit_code = 1


class DomainError(RedeiError, ValueError):
    """输入不在定义域内（前提条件不满足）。"""

    exit_code = 2


class UnsupportedCaseError(DomainError):
    """刻意不支持的情形，例如 Q(√2) 一侧的同余归一化。"""


class TruncationError(DomainError):
    """请求的多重指标超出截断次数。"""


class NotTotallyRealError(DomainError):
    """某一对素数确定不是全实的。"""


class CapacityError(RedeiError):
    """输入超出支持范围，或搜索上限耗尽。"""

    exit_code = 3


class SearchExhaustedError(CapacityError):
    """三元方程在搜索上限内无解。"""


class NormalizationError(CapacityError):
    """解的轨道内找不到满足同余条件的代表元。"""


class TotalRealnessUnknownError(CapacityError):
    """构造性搜索未找到全实见证。"""


class InternalContradictionError(RedeiError):
    """不应出现的内部矛盾（例如两个根的约化都为 0）。"""


class InconsistencyError(RedeiError):
    """数据无法在基本换位子基下实现，说明上游有缺陷。"""


class VerificationError(RedeiError):
    """与已知算例的数据不一致。"""
