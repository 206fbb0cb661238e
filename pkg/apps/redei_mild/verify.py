"""已知算例校验。

三组算例:
- `redei-313`: S = {2, 313, 457, 521}，−1 符号表、δ 张量和温和性；
- `zero-113`: S = {2, 113, 593}，[2, 113, 593] = -1（早先记录为 1，见明细），张量在 (1, 0, 2, 1) 处非零，z ≥ 3 且有温和性证书；
- `gst-17`: S = {2, 17, 7489, 15809}、q = 5 的商群，迹支撑集、两条独立计算路径、基本换位子表示和温和性。

`gst-17` 中 (2, 17) 没有构造性的全实见证，这一组在 warn 策略下运行并把告警写进明细。
"""

from __future__ import annotations

from dataclasses import replace
from itertools import permutations
from typing import Callable, Iterable

from logger import logger

from .errors import DomainError, RedeiError
from .magnus import format_word, relator_words, tensor_roundtrip
from .massey import (
    Decomposition,
    build_tensor,
    gst_case_table_tensor,
    inflate_tensor,
    mild_certificate,
    mild_search,
    z_lower_bound,
)
from .presentation import PrimeSet, gst_admissible, gst_presentation_data
from .redei import RedeiEngine, evaluate_ordered, redei_engine
from .schemas import VerifyItem, VerifyReport

EXAMPLE_IDS = ("redei-313", "zero-113", "gst-17")

REDEI_313_SET = (313, 457, 521)
REDEI_313_MINUS_ONE = frozenset(
    {
        (1, 1, 3), (1, 2, 3), (1, 3, 3),
        (0, 0, 1), (0, 0, 2), (0, 0, 3),
        (0, 1, 1), (0, 2, 2), (0, 3, 3), (0, 2, 3),
    }
)

ZERO_113_SET = (113, 593)
ZERO_113_TRIPLE = (2, 113, 593)
# 早先的记录认为 S = {2, 113, 593} 的符号全部为 1；六个排列与多个证书一致给出 -1
ZERO_113_VALUE = -1
ZERO_113_ENTRY = (1, 0, 2, 1)

GST_17_SET = (17, 7489, 15809)
GST_17_Q = 5
GST_17_ORDERING = (7489, 15809, 17)
GST_17_SUPPORT = {
    1: frozenset({(1, 1, 3), (1, 2, 3), (1, 3, 2), (1, 3, 3), (2, 3, 1), (3, 1, 1), (3, 2, 1), (3, 3, 1)}),
    2: frozenset({(1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2)}),
    3: frozenset({(1, 1, 3), (1, 2, 3), (2, 1, 3), (3, 1, 1), (3, 1, 2), (3, 2, 1)}),
}
GST_17_RELATORS = {
    1: "[[x1, x3], x1]·[[x1, x3], x3]·[[x2, x3], x1]",
    2: "[[x1, x3], x2]",
    3: "[[x1, x3], x1]·[[x1, x3], x2]·[[x2, x3], x1]",
}


class _Recorder:
    def __init__(self, example: str) -> None:
        self.example = example
        self.items: list[VerifyItem] = []

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.items.append(VerifyItem(example=self.example, check=name, passed=bool(passed), detail=detail))
        if not passed:
            logger.error("example %s check %s failed: %s", self.example, name, detail)
        return bool(passed)


def _symbol_detail(engine: RedeiEngine, primes: tuple[int, ...], got: set, expected: Iterable) -> str:
    diff = sorted(got ^ set(expected))
    if not diff:
        return ""
    idx = diff[0]
    triple = [primes[t] for t in idx]
    return f"下标三元组 {idx}（素数 {triple}）的符号为 {engine.symbol(*triple)}，与已知数据不一致"


def _verify_redei_313(engine: RedeiEngine, rec: _Recorder) -> None:
    S = PrimeSet(REDEI_313_SET)
    got = engine.minus_one_triples(S.primes)
    rec.check("minus-one-triples", got == REDEI_313_MINUS_ONE, _symbol_detail(engine, S.primes, got, REDEI_313_MINUS_ONE))

    tensor = build_tensor(S, engine)
    delta = all(tensor.entry(m, 0, 0, k) == int(m == k) for m in range(1, 4) for k in range(1, 4))
    rec.check("delta-traces", delta, "" if delta else "entry(m, 0, 0, k) ≠ δ_mk")

    decomposition = Decomposition.from_labels([[1], [2], [3]], [[0]], 1, tensor.gen_labels)
    certificate = mild_certificate(tensor, decomposition)
    rec.check("mild-given-decomposition", certificate.ok, certificate.diagnostic)

    report = engine.cross_check(*REDEI_313_SET)
    rec.check(
        "cross-check",
        report.ok,
        "" if report.ok else f"排列取值 {report.permutations}，选择取值 {report.choice_values}",
    )


def _verify_zero_113(engine: RedeiEngine, rec: _Recorder) -> None:
    S = PrimeSet(ZERO_113_SET)
    value = engine.symbol(*ZERO_113_TRIPLE)
    rec.check(
        "symbol-2-113-593",
        value == ZERO_113_VALUE,
        f"计算值 {value}；早先记录的“全部符号为 1”与之不符，以计算值为准",
    )
    perms = {perm: evaluate_ordered(*perm, settings=engine.settings) for perm in sorted(set(permutations(ZERO_113_TRIPLE)))}
    agree = all(v == value for v in perms.values())
    rec.check("permutations-agree", agree, "" if agree else f"排列取值 {perms}")

    got = engine.minus_one_triples(S.primes)
    rec.check("minus-one-triples", (0, 1, 2) in got, "" if (0, 1, 2) in got else f"-1 三元组 {sorted(got)} 中没有 (0, 1, 2)")
    tensor = build_tensor(S, engine)
    rec.check("tensor-entry", tensor.entry(*ZERO_113_ENTRY) == 1, f"非零项 {tensor.nonzero()}")
    rec.check("z-lower-bound", z_lower_bound(tensor) == 3, f"z ≥ {z_lower_bound(tensor)}")
    certificate = mild_search(tensor)
    rec.check(
        "mild-search",
        certificate is not None and mild_certificate(tensor, certificate.decomposition).ok,
        "" if certificate else "穷举全部分解后没有证书",
    )


def _verify_gst_17(engine: RedeiEngine, rec: _Recorder) -> None:
    warn_engine = engine.with_settings(replace(engine.settings, total_realness_policy="warn"))
    S = PrimeSet(GST_17_SET)

    verdict = gst_admissible(S, GST_17_Q)
    rec.check("ordering", verdict.ok and verdict.ordering == GST_17_ORDERING, f"得到的顺序 {verdict.ordering}")

    presentation = gst_presentation_data(S, GST_17_Q)
    rec.check("generator-count", presentation.generator_count == 3)
    rec.check("relators-in-F3", presentation.relators_in_F3())

    tensor = inflate_tensor(build_tensor(presentation.base, warn_engine), presentation)
    for warning in tensor.warnings:
        rec.check("total-realness", True, warning)
    for m, expected in GST_17_SUPPORT.items():
        got = set(tensor.support(m))
        rec.check(
            f"support-r{m}",
            got == expected,
            "" if got == expected else f"r̄_{m} 的支撑集差异 {sorted(got ^ expected)}",
        )

    table = gst_case_table_tensor(S, GST_17_Q, warn_engine)
    rec.check("case-table-matches-inflation", table == tensor, f"差异项 {sorted(set(table.nonzero()) ^ set(tensor.nonzero()))[:3]}")

    words = relator_words(tensor)
    for m, expected in GST_17_RELATORS.items():
        rec.check(f"roundtrip-r{m}", tensor_roundtrip(tensor, m))
        printed = format_word(words[m])
        rec.check(f"basic-commutators-r{m}", printed == expected, f"得到 {printed}")

    decomposition = Decomposition.from_labels([[1]], [[2], [3]], 1, tensor.gen_labels)
    certificate = mild_certificate(tensor, decomposition)
    rec.check("mild-given-decomposition", certificate.ok, certificate.diagnostic)


_EXAMPLES: dict[str, Callable[[RedeiEngine, _Recorder], None]] = {
    "redei-313": _verify_redei_313,
    "zero-113": _verify_zero_113,
    "gst-17": _verify_gst_17,
}


def parse_only(text: str | None) -> tuple[str, ...]:
    if not text:
        return EXAMPLE_IDS
    ids = tuple(part.strip() for part in text.split(",") if part.strip())
    unknown = [i for i in ids if i not in _EXAMPLES]
    if unknown:
        raise DomainError(f"未知的算例 {unknown}，可选 {list(EXAMPLE_IDS)}")
    return ids


def verify_examples(engine: RedeiEngine | None = None, only: Iterable[str] | None = None) -> VerifyReport:
    """逐个运行算例；某一组抛出业务错误时记为失败并继续下一组。"""

    engine = engine or redei_engine
    items: list[VerifyItem] = []
    for example in only or EXAMPLE_IDS:
        rec = _Recorder(example)
        try:
            _EXAMPLES[example](engine, rec)
        except RedeiError as exc:
            rec.check("completed", False, str(exc))
        items.extend(rec.items)
    return VerifyReport(passed=all(item.passed for item in items), items=items)
