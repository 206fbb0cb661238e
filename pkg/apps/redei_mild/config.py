"""运行配置模块。

该模块集中管理搜索上限、精度和策略参数，避免散落在各算法文件中。

说明:
- 每个字段都可以通过 `REDEI_MILD_*` 环境变量覆盖，非法值回退到默认值并被限制在合法区间；
- CLI 单次运行的覆盖通过 `dataclasses.replace(settings, ...)` 生成新实例，不修改全局单例。
"""

from __future__ import annotations

from dataclasses import dataclass, field
import os

TOTAL_REALNESS_POLICIES = ("strict", "warn")


def _read_env_int(name: str, default: int, min_value: int, max_value: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return max(min_value, min(max_value, value))


def _read_env_str(name: str, default: str, choices: tuple[str, ...]) -> str:
    value = os.getenv(name, default).strip().lower()
    return value if value in choices else default


@dataclass(frozen=True)
class Settings:
    """算法配置。

    说明:
    - `solver_bound_cap` 是三元方程搜索的放大因子 C 的上限，C 从 1 开始逐次翻倍；
    - `total_realness_policy` 为 `strict` 时全实性未知/否定即报错，为 `warn` 时只记录告警。
    """

    # 输入上限: 所有素数参数必须小于 2^61
    prime_limit: int = 1 << 61

    solver_bound_cap: int = field(default_factory=lambda: _read_env_int("REDEI_MILD_BOUND_CAP", 32, 1, 4096))
    orbit_depth: int = field(default_factory=lambda: _read_env_int("REDEI_MILD_ORBIT_DEPTH", 64, 0, 1024))
    certificate_attempts: int = field(
        default_factory=lambda: _read_env_int("REDEI_MILD_CERT_ATTEMPTS", 256, 1, 100000)
    )
    two_adic_precision: int = field(
        default_factory=lambda: _read_env_int("REDEI_MILD_TWO_ADIC_PRECISION", 64, 8, 4096)
    )
    total_real_attempts: int = field(
        default_factory=lambda: _read_env_int("REDEI_MILD_TOTAL_REAL_ATTEMPTS", 16, 1, 10000)
    )
    total_realness_policy: str = field(
        default_factory=lambda: _read_env_str("REDEI_MILD_TOTAL_REALNESS", "strict", TOTAL_REALNESS_POLICIES)
    )

    magnus_degree: int = 4
    magnus_degree_max: int = 6
    mild_search_max_dim: int = 6

    search_workers: int = field(default_factory=lambda: _read_env_int("REDEI_MILD_WORKERS", 1, 1, 64))


settings = Settings()
