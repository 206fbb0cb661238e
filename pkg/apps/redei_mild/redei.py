"""Rédei 符号引擎。

职责:
- 三元组可容许性检查（奇素数 ≡ 1 mod 8、两两 Legendre 符号为 1）；
- 素数对的全实性判定（奇素数对用四次剩余判据，含 2 的对做构造性搜索）；
- 求 [a, b, c] ∈ {±1}，并按排序后的三元组做进程内缓存。

取向策略:
- 两个分量为 2 时直接按 l mod 16 取值；
- 否则借助对称性把奇素数放到第三位（求值素数），若剩下的两个里有 2，则把 2 放在范数位置，
  使 α 总落在奇根式的 Q(√l) 中；
- 求值素数等于根式时，在分歧素理想 (√l) 上求值（剩余域 F_l，α ≡ x）。

设计说明:
- 缓存是唯一的共享状态，用 `threading.RLock` 保护；计算本身在锁外进行，重复计算结果一致；
- `overrides` 用于校验流程的故障注入测试，正常运行时为空。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations_with_replacement, permutations
import json
from pathlib import Path
import threading
from typing import Sequence

from pydantic import ValidationError

from logger import logger

from .config import Settings, settings as default_settings
from .errors import (
    CapacityError,
    DomainError,
    InternalContradictionError,
    NotTotallyRealError,
    RedeiError,
    TotalRealnessUnknownError,
)
from .modarith import is_prime, legendre, quartic_symbol
from .quadfield import residue_symbol, residue_symbol_2adic, split_prime
from .schemas import CacheLine
from .ternary import AlphaCertificate, certificates, find_certificate

Triple = tuple[int, int, int]


class Verdict(str, Enum):
    """全实性判定结果。"""

    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown-constructive"


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    diagnostic: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class SymbolQuery:
    """按查询顺序记录的三元组，以及内部使用的取向。"""

    a: int
    b: int
    c: int
    canonical_order: tuple[int, int, int]
    kind: str

    @property
    def pair(self) -> tuple[int, int]:
        return self.canonical_order[0], self.canonical_order[1]

    @property
    def evaluation_prime(self) -> int:
        return self.canonical_order[2]


@dataclass
class SymbolEvaluation:
    """一次求值的结果与出处。"""

    triple: Triple
    value: int
    provenance: str
    orientation: Triple


def _sorted(a: int, b: int, c: int) -> Triple:
    return tuple(sorted((a, b, c)))  # type: ignore[return-value]


def admissible(a: int, b: int, c: int) -> Admissibility:
    """检查三元组能否求 Rédei 符号，诊断信息指出第一个不满足的条件。

    三个分量全相同的 (l, l, l) 视为不可容许: 构造中没有对应的 α，见 DESIGN.md 的第 2 条决定。
    """

    entries = (a, b, c)
    for value in entries:
        if value < 2 or not is_prime(value):
            return Admissibility(False, f"{value} 不是素数")
        if value != 2 and value % 8 != 1:
            return Admissibility(False, f"{value} ≢ 1 mod 8")
    if a == b == c:
        return Admissibility(False, f"三个分量全相同 ({a}, {a}, {a})，符号无定义")
    odd = sorted({value for value in entries if value != 2})
    for i, p in enumerate(odd):
        for q in odd[i + 1:]:
            if legendre(p, q) != 1:
                return Admissibility(False, f"({p}/{q}) = -1")
    return Admissibility(True)


def orient(a: int, b: int, c: int) -> SymbolQuery:
    """按取向策略选出 (根式, 范数, 求值素数)。"""

    t = _sorted(a, b, c)
    twos = t.count(2)
    if twos == 2:
        return SymbolQuery(a, b, c, (2, 2, t[2]), "two-two")
    odd = [value for value in t if value != 2]
    if twos == 1:
        l, k = odd
        # (2, l, l) 时在分歧素理想上求值
        return SymbolQuery(a, b, c, (l, 2, k), "alpha")
    if t[0] == t[1]:
        return SymbolQuery(a, b, c, (t[0], t[0], t[2]), "alpha")
    if t[1] == t[2]:
        return SymbolQuery(a, b, c, (t[1], t[1], t[0]), "alpha")
    return SymbolQuery(a, b, c, t, "alpha")


def two_two_symbol(l: int) -> int:
    """[2, 2, l]: l ≡ 1 mod 16 为 1，l ≡ 9 mod 16 为 -1。"""

    if l % 16 == 1:
        return 1
    if l % 16 == 9:
        return -1
    raise DomainError(f"[2, 2, {l}] 要求 {l} ≡ 1 mod 8")


def evaluate_certificate(cert: AlphaCertificate, c: int, both_roots: bool = False) -> int:
    """在 c 上方的一次素理想处求 (α|k / p)；约化为 0 的根换成另一个根。"""

    p = split_prime(c, cert.a)
    values = [v for v in (residue_symbol(cert.alpha, p), residue_symbol(cert.alpha, p.other_root())) if v != 0]
    if not values:
        raise InternalContradictionError(f"α = {cert.alpha} 在 {c} 上方两个根处约化都为 0")
    if both_roots and len(set(values)) != 1:
        raise InternalContradictionError(f"α = {cert.alpha} 在 {c} 上方两个根处取值不同: {values}")
    return values[0]


def evaluate_certificate_2adic(cert: AlphaCertificate, precision: int, sign: int = 1) -> int:
    return residue_symbol_2adic(cert.alpha, precision, sign)


def symbol_quartic_oracle(l: int, k: int) -> int:
    """[l, l, k] 的独立计算: K_{l,l} 是唯一的 l 外不分歧循环四次域，k 的分解由四次剩余决定。"""

    if l % 2 == 0 or k % 2 == 0:
        raise DomainError("四次剩余对照要求 l、k 都是奇素数")
    if l % 8 != 1:
        raise DomainError(f"四次剩余对照要求 l ≡ 1 mod 8，收到 {l}")
    return quartic_symbol(k, l)


def _evaluate_pair(
    pair: tuple[int, int],
    c: int,
    settings: Settings,
    cert: AlphaCertificate | None = None,
) -> tuple[int, str]:
    r, n = pair
    if r == 2:
        r, n = n, r
    cert = cert or find_certificate(r, n, settings)
    if c == 2:
        return evaluate_certificate_2adic(cert, settings.two_adic_precision), f"{cert.provenance}/2-adic"
    return evaluate_certificate(cert, c), cert.provenance


def evaluate_ordered(a: int, b: int, c: int, settings: Settings | None = None) -> int:
    """不经缓存、按给定顺序本身的取向求值（用于对称性交叉检验）。

    第三位为 2 时走 2-adic 路径: 2 在 Q(√a) 中分裂，其完备化为 Q_2，分裂当且仅当 α ≡ 1 mod 8。
    """

    settings = settings or default_settings
    verdict = admissible(a, b, c)
    if not verdict:
        raise DomainError(f"[{a}, {b}, {c}] 不可容许: {verdict.diagnostic}")
    if (a, b, c).count(2) == 2:
        return two_two_symbol(max(a, b, c))
    return _evaluate_pair((a, b), c, settings)[0]


def _pair_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


@dataclass
class CrossCheck:
    triple: Triple
    value: int
    permutations: dict[Triple, int] = field(default_factory=dict)
    choice_values: list[int] = field(default_factory=list)
    certificates_used: int = 0
    quartic_oracle: int | None = None

    @property
    def permutations_agree(self) -> bool:
        return all(v == self.value for v in self.permutations.values())

    @property
    def choices_agree(self) -> bool:
        return all(v == self.value for v in self.choice_values)

    @property
    def oracle_agrees(self) -> bool:
        return self.quartic_oracle is None or self.quartic_oracle == self.value

    @property
    def ok(self) -> bool:
        return self.permutations_agree and self.choices_agree and self.oracle_agrees


class RedeiEngine:
    """带缓存的 Rédei 符号求值器。"""

    def __init__(self, settings: Settings | None = None) -> None:
        self.settings = settings or default_settings
        self._lock = threading.RLock()
        self._memo: dict[Triple, SymbolEvaluation] = {}
        self._verdicts: dict[tuple[int, int], Verdict] = {}
        self.overrides: dict[Triple, int] = {}

    def with_settings(self, settings: Settings) -> RedeiEngine:
        """换一套配置（例如全实性策略），共享缓存与故障注入表。"""

        engine = RedeiEngine(settings)
        engine._lock = self._lock
        engine._memo = self._memo
        engine._verdicts = self._verdicts
        engine.overrides = self.overrides
        return engine

    # ---- 全实性 ----

    def totally_real(self, a: int, b: int) -> Verdict:
        key = _pair_key(a, b)
        with self._lock:
            if key in self._verdicts:
                return self._verdicts[key]
        verdict = totally_real(a, b, self.settings)
        with self._lock:
            self._verdicts[key] = verdict
        return verdict

    def ensure_totally_real(self, a: int, b: int) -> str | None:
        """按全实性策略检查 (a, b)；strict 下失败即抛错，warn 下返回告警文本。"""

        verdict = self.totally_real(a, b)
        if verdict is Verdict.TRUE:
            return None
        if verdict is Verdict.FALSE:
            message = f"素数对 ({a}, {b}) 不是全实的（四次剩余符号不对称）"
            error: RedeiError = NotTotallyRealError(message)
        else:
            message = f"未找到素数对 ({a}, {b}) 全实性的构造性见证，可调大 --bound-cap"
            error = TotalRealnessUnknownError(message)
        if self.settings.total_realness_policy == "strict":
            raise error
        logger.warning("total-realness policy 'warn': pair (%d, %d) verdict %s", a, b, verdict.value)
        return message

    # ---- 符号 ----

    def symbol(self, a: int, b: int, c: int) -> int:
        return self.evaluation(a, b, c).value

    def evaluation(self, a: int, b: int, c: int) -> SymbolEvaluation:
        key = _sorted(a, b, c)
        with self._lock:
            if key in self.overrides:
                return SymbolEvaluation(key, self.overrides[key], "override", key)
            cached = self._memo.get(key)
        if cached is not None:
            return cached
        result = self._compute(key)
        with self._lock:
            self._memo.setdefault(key, result)
            return self._memo[key]

    def _compute(self, key: Triple) -> SymbolEvaluation:
        verdict = admissible(*key)
        if not verdict:
            raise DomainError(f"[{key[0]}, {key[1]}, {key[2]}] 不可容许: {verdict.diagnostic}")
        query = orient(*key)
        if query.kind == "two-two":
            return SymbolEvaluation(key, two_two_symbol(query.evaluation_prime), "two-two", query.canonical_order)
        value, provenance = _evaluate_pair(query.pair, query.evaluation_prime, self.settings)
        return SymbolEvaluation(key, value, provenance, query.canonical_order)

    def evaluations(self) -> list[SymbolEvaluation]:
        with self._lock:
            return [self._memo[key] for key in sorted(self._memo)]

    def clear(self) -> None:
        with self._lock:
            self._memo.clear()
            self._verdicts.clear()

    # ---- 交叉检验 ----

    def cross_check(self, a: int, b: int, c: int, trials: int = 3) -> CrossCheck:
        """六个排列各自取向求值、多证书与两个根的选择无关性、以及 [l, l, k] 的四次剩余对照。"""

        report = CrossCheck(triple=(a, b, c), value=self.symbol(a, b, c))
        for perm in sorted(set(permutations((a, b, c)))):
            report.permutations[perm] = evaluate_ordered(*perm, settings=self.settings)

        query = orient(a, b, c)
        if query.kind == "alpha":
            r, n = query.pair
            for cert in certificates(r, n, trials, self.settings, include_automorphs=r < 1000):
                report.certificates_used += 1
                report.choice_values.append(evaluate_certificate(cert, query.evaluation_prime, both_roots=True))

        # 恰好一个 2 时，两个奇分量组成的 α 在 2 上方的两个素理想处求值
        odd = [value for value in (a, b, c) if value != 2]
        if len(odd) == 2:
            cert = find_certificate(odd[0], odd[1], self.settings)
            for sign in (1, -1):
                report.choice_values.append(
                    evaluate_certificate_2adic(cert, self.settings.two_adic_precision, sign)
                )

        t = _sorted(a, b, c)
        if 2 not in t:
            if t[0] == t[1]:
                report.quartic_oracle = symbol_quartic_oracle(t[0], t[2])
            elif t[1] == t[2]:
                report.quartic_oracle = symbol_quartic_oracle(t[1], t[0])
        return report

    # ---- 表格 ----

    def symbol_table(self, primes: Sequence[int]) -> dict[Triple, int]:
        """primes = (l_0, ..., l_n)；返回所有可容许的非降序下标三元组的取值。"""

        table: dict[Triple, int] = {}
        for idx in combinations_with_replacement(range(len(primes)), 3):
            entries = tuple(primes[i] for i in idx)
            if not admissible(*entries):
                continue
            table[idx] = self.symbol(*entries)  # type: ignore[index]
        return table

    def minus_one_triples(self, primes: Sequence[int]) -> set[Triple]:
        return {idx for idx, value in self.symbol_table(primes).items() if value == -1}

    # ---- 缓存文件 ----

    def load_cache(self, path: Path) -> int:
        """读取 JSON-lines 缓存；损坏或过期的行跳过并告警。"""

        if not path.exists():
            return 0
        loaded = 0
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                entry = CacheLine.model_validate_json(line)
            except ValidationError as exc:
                logger.warning("cache %s line %d skipped: %s", path, lineno, exc.errors()[0]["msg"])
                continue
            key = _sorted(*entry.triple)
            if not admissible(*key):
                logger.warning("cache %s line %d skipped: triple %s is not admissible", path, lineno, key)
                continue
            with self._lock:
                self._memo.setdefault(key, SymbolEvaluation(key, entry.value, "cache", key))
            loaded += 1
        logger.info("loaded %d cached symbols from %s", loaded, path)
        return loaded

    def save_cache(self, path: Path) -> int:
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [
            json.dumps(CacheLine(triple=list(ev.triple), value=ev.value).model_dump(), ensure_ascii=False)
            for ev in self.evaluations()
        ]
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return len(lines)


def totally_real(a: int, b: int, settings: Settings | None = None) -> Verdict:
    """(2,2) 与 (l,l) 恒为全实；奇素数对比较两个四次剩余符号；(2,l) 构造性搜索 x > 0 的归一化证书。"""

    settings = settings or default_settings
    if a == b:
        return Verdict.TRUE
    if 2 not in (a, b):
        if legendre(a, b) != 1:
            raise DomainError(f"({a}/{b}) = -1，该素数对不可容许")
        return Verdict.TRUE if quartic_symbol(a, b) == quartic_symbol(b, a) else Verdict.FALSE
    l = b if a == 2 else a
    try:
        for cert in certificates(l, 2, settings.total_real_attempts, settings):
            if cert.x > 0:
                return Verdict.TRUE
    except CapacityError as exc:
        logger.debug("constructive total-realness search for (2, %d) stopped: %s", l, exc)
    return Verdict.UNKNOWN


redei_engine = RedeiEngine()


def redei_symbol(a: int, b: int, c: int) -> int:
    return redei_engine.symbol(a, b, c)
