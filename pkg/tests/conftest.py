"""测试公共夹具。"""

from __future__ import annotations

import os

# 日志文件在 logger 模块导入时确定，必须先于任何包内导入设置
os.environ.setdefault("REDEI_MILD_LOG_FILE", os.devnull)

from dataclasses import replace
import random

import pytest

from apps.redei_mild.config import settings
from apps.redei_mild.redei import RedeiEngine

EXAMPLE_SET = (313, 457, 521)
ZERO_SET = (113, 593)
GST_SET = (17, 7489, 15809)


@pytest.fixture
def engine() -> RedeiEngine:
    return RedeiEngine()


@pytest.fixture(scope="session")
def shared_engine() -> RedeiEngine:
    """整个测试会话共享缓存，避免重复求解三元方程。"""

    return RedeiEngine()


@pytest.fixture(scope="session")
def warn_engine(shared_engine: RedeiEngine) -> RedeiEngine:
    return shared_engine.with_settings(replace(settings, total_realness_policy="warn"))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


class TableEngine:
    """按给定表返回符号值的替身引擎，用于只检验组合结构的测试。"""

    def __init__(self, values: dict[tuple[int, int, int], int], default: int = 1) -> None:
        self.values = {tuple(sorted(k)): v for k, v in values.items()}
        self.default = default
        self.queries: list[tuple[int, int, int]] = []

    def symbol(self, a: int, b: int, c: int) -> int:
        self.queries.append((a, b, c))
        return self.values.get(tuple(sorted((a, b, c))), self.default)

    def ensure_totally_real(self, a: int, b: int) -> str | None:
        return None


@pytest.fixture
def table_engine_factory():
    return TableEngine
