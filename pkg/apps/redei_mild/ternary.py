"""三元方程 x² − a·y² − b·z² = 0 的求解与 Rédei 归一化。

设计说明:
- 求解采用 (z, y) 的有界双重循环，边界为 B_y = ⌈√b⌉·C、B_z = ⌈√a⌉·C，C 从 1 开始翻倍直到 `solver_bound_cap`；
  每一层只搜索上一层盒子之外的点；
- a、b 都为奇数时，归一化条件为 α ≡ 1 mod 4·O_k；a ≡ 1 mod 4 时 Pell 自同构保持 y 的奇偶性，
  而同余要求 y 为偶数，所以 y 为奇数的解直接跳过，`solve_legendre_eq` 与 `find_certificate` 都换下一个解；
- b = 2 时 x、y 都是奇数，mod 4 同余永远不成立，改用 2-adic 判据: α 的两个 2-adic 嵌入中
  赋值为偶数的那个，其单位部分必须 ≡ 1 mod 4；
- 证书是值对象，构造时重新校验全部不变量；模块内不做缓存。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, isqrt
from typing import Iterator, Literal

import gmpy2

from logger import logger

from .config import Settings, settings as default_settings
from .errors import (
    CapacityError,
    DomainError,
    NormalizationError,
    SearchExhaustedError,
    UnsupportedCaseError,
)
from .modarith import pell_fundamental, two_adic_split, two_squares
from .quadfield import QuadInt, congruent_one_mod_4O, embed_2adic, norm

Provenance = Literal["direct-solve", "two-squares", "conjugate-trace-swap"]
Congruence = Literal["mod-4O", "2-adic"]

Solution = tuple[int, int, int]


def _embedding_parts(alpha: QuadInt, z: int, precision: int) -> list[tuple[int, int]]:
    """α 在两个 2-adic 嵌入下的 (赋值, 单位部分 mod 8)。"""

    k = precision + 2 * max(abs(z), 1).bit_length() + 8
    parts = []
    for sign in (1, -1):
        e = embed_2adic(alpha, k, sign)
        if e == 0:
            raise CapacityError(f"2-adic 精度 {k} 不足以确定 α = {alpha} 的赋值")
        v, u = two_adic_split(e)
        if v + 3 > k:
            raise CapacityError(f"2-adic 精度 {k} 不足以确定 α = {alpha} 的单位部分")
        parts.append((v, u % 8))
    return parts


def _norm_slot_two_ok(alpha: QuadInt, z: int, precision: int) -> bool:
    even = [u for v, u in _embedding_parts(alpha, z, precision) if v % 2 == 0]
    return len(even) == 1 and even[0] % 4 == 1


def _swap_ok(alpha: QuadInt, z: int, precision: int) -> bool:
    return all(v % 2 == 0 and u % 4 == 1 for v, u in _embedding_parts(alpha, z, precision))


@dataclass(frozen=True)
class AlphaCertificate:
    """(a, b) 对的归一化解 α = x + y√a，N(α) = b·z²。"""

    a: int
    b: int
    alpha: QuadInt
    z: int
    provenance: Provenance = "direct-solve"
    congruence: Congruence = "mod-4O"
    precision: int = field(default=64, compare=False, repr=False)

    def __post_init__(self) -> None:
        x, y, m = self.alpha.x, self.alpha.y, self.alpha.m
        if m != self.a:
            raise DomainError(f"α 的根式 {m} 与证书的 a={self.a} 不一致")
        if norm(self.alpha) != self.b * self.z * self.z:
            raise DomainError(f"N(α) = {norm(self.alpha)} 不等于 b·z² = {self.b * self.z * self.z}")
        if self.provenance != "conjugate-trace-swap" and gcd(gcd(x, y), self.z) != 1:
            raise DomainError(f"解 ({x}, {y}, {self.z}) 不是本原解")
        if self.congruence == "mod-4O":
            if not congruent_one_mod_4O(self.alpha):
                raise DomainError(f"α = {self.alpha} 不满足 α ≡ 1 mod 4·O_k")
        elif self.provenance == "conjugate-trace-swap":
            if not _swap_ok(self.alpha, self.z, self.precision):
                raise DomainError(f"α = {self.alpha} 的 2-adic 嵌入不满足 4^t·u, u ≡ 1 mod 4")
        elif not _norm_slot_two_ok(self.alpha, self.z, self.precision):
            raise DomainError(f"α = {self.alpha} 的偶赋值嵌入单位部分不满足 ≡ 1 mod 4")

    @property
    def x(self) -> int:
        return self.alpha.x

    @property
    def y(self) -> int:
        return self.alpha.y

    @property
    def solution(self) -> Solution:
        return self.alpha.x, self.alpha.y, self.z


def _check_pair(a: int, b: int) -> None:
    for name, value in (("a", a), ("b", b)):
        if value < 2:
            raise DomainError(f"{name}={value} 必须是素数")
        if value >= default_settings.prime_limit:
            raise CapacityError(f"{name}={value} 超出支持范围（必须小于 2^61）")


def iter_solutions(a: int, b: int, settings: Settings | None = None) -> Iterator[Solution]:
    """按盒子逐层放大枚举 x² = a·y² + b·z² 的本原正解。"""

    settings = settings or default_settings
    _check_pair(a, b)
    if a == b and a % 8 == 1:
        y, z = two_squares(a)
        yield a, y, z

    root_a = isqrt(a - 1) + 1
    root_b = isqrt(b - 1) + 1
    prev_y = prev_z = 0
    c = 1
    while c <= settings.solver_bound_cap:
        bound_y, bound_z = root_b * c, root_a * c
        logger.debug("solver box (%d, %d) for pair (%d, %d)", bound_y, bound_z, a, b)
        for z in range(1, bound_z + 1):
            bz2 = b * z * z
            start_y = prev_y + 1 if z <= prev_z else 1
            for y in range(start_y, bound_y + 1):
                rhs = a * y * y + bz2
                if not gmpy2.is_square(rhs):
                    continue
                x = int(gmpy2.isqrt(rhs))
                if gcd(gcd(x, y), z) == 1:
                    yield x, y, z
        prev_y, prev_z = bound_y, bound_z
        c *= 2


def solve_legendre_eq(a: int, b: int, settings: Settings | None = None) -> Solution:
    """求解器输出中第一个能通过 `normalize` 的本原解；a = 2 时没有归一化，直接取第一个解。"""

    settings = settings or default_settings
    rejected = 0
    for sol in iter_solutions(a, b, settings):
        if a == 2:
            return sol
        try:
            normalize(sol, a, b, settings)
        except NormalizationError:
            rejected += 1
            if rejected >= settings.certificate_attempts:
                break
            continue
        if rejected:
            logger.debug("pair (%d, %d): skipped %d solutions before a normalizable one", a, b, rejected)
        return sol
    if rejected:
        raise NormalizationError(f"({a}, {b}) 的前 {rejected} 个解都无法归一化")
    cap = settings.solver_bound_cap
    raise SearchExhaustedError(f"在放大因子上限 C={cap} 内未找到 x² = {a}·y² + {b}·z² 的本原解，可调大 --bound-cap")


def _automorph(sol: Solution, a: int, u: int, v: int, direction: int) -> Solution:
    x, y, z = sol
    if direction > 0:
        return u * x + a * v * y, v * x + u * y, z
    return u * x - a * v * y, -v * x + u * y, z


def orbit(sol: Solution, a: int, depth: int) -> Iterator[Solution]:
    """sol 本身，然后交替产出正向/反向自同构像；Pell 基本解只在需要时计算。"""

    yield sol
    if depth <= 0:
        return
    u, v = pell_fundamental(a)
    forward = backward = sol
    for _ in range(depth):
        forward = _automorph(forward, a, u, v, 1)
        backward = _automorph(backward, a, u, v, -1)
        yield forward
        yield backward


def _sign_patterns(x: int, y: int) -> tuple[tuple[int, int], ...]:
    return (x, y), (-x, -y), (x, -y), (-x, y)


def normalize(sol: Solution, a: int, b: int, settings: Settings | None = None) -> AlphaCertificate:
    """在符号翻转与 Pell 自同构轨道中寻找满足归一化条件的代表元。"""

    settings = settings or default_settings
    x, y, z = sol
    z = abs(z)
    if x * x - a * y * y - b * z * z != 0:
        raise DomainError(f"({x}, {y}, {z}) 不是 x² − {a}·y² − {b}·z² = 0 的解")
    if a == 2:
        raise UnsupportedCaseError("α 位于 Q(√2) 的取向不受支持，请把 2 放在范数位置")
    if a % 2 == 0:
        raise DomainError(f"a={a} 必须是奇素数")
    provenance: Provenance = "two-squares" if a == b and x == a else "direct-solve"

    if b == 2:
        for sx, sy in ((x, y), (-x, -y)):
            alpha = QuadInt(sx, sy, a)
            if _norm_slot_two_ok(alpha, z, settings.two_adic_precision):
                return AlphaCertificate(a, b, alpha, z, provenance, "2-adic", settings.two_adic_precision)
        raise NormalizationError(f"({x}, {y}, {z}) 的两个符号都不满足 2-adic 归一化")

    if a % 4 == 1 and y % 2 == 1:
        raise NormalizationError(f"({x}, {y}, {z}) 中 y 为奇数，而自同构保持 y 的奇偶性")

    for depth, (ox, oy, oz) in enumerate(orbit((x, y, z), a, settings.orbit_depth)):
        for sx, sy in _sign_patterns(ox, oy):
            alpha = QuadInt(sx, sy, a)
            if congruent_one_mod_4O(alpha):
                if depth:
                    logger.debug("pair (%d, %d) normalized at orbit position %d", a, b, depth)
                return AlphaCertificate(a, b, alpha, oz, provenance, "mod-4O", settings.two_adic_precision)
    raise NormalizationError(f"({x}, {y}, {z}) 的轨道（深度 {settings.orbit_depth}）中没有满足 α ≡ 1 mod 4·O_k 的代表元")


def conjugate_trace_swap(cert: AlphaCertificate, settings: Settings | None = None) -> AlphaCertificate:
    """由 (a, b) 证书构造 (b, a) 证书: Tr(α) + 2√N(α) = 2x + 2z√b，新的 z 为 2y。"""

    settings = settings or default_settings
    if cert.b == 2:
        raise UnsupportedCaseError("交换到 Q(√2) 的取向不受支持")
    nx, ny, nz = 2 * cert.x, 2 * cert.z, 2 * abs(cert.y)
    # α 除以 4 时范数除以 16，z 也要除以 4
    while nx % 4 == 0 and ny % 4 == 0 and nz % 4 == 0:
        nx, ny, nz = nx // 4, ny // 4, nz // 4
    for sx, sy in _sign_patterns(nx, ny):
        alpha = QuadInt(sx, sy, cert.b)
        if _swap_ok(alpha, nz, settings.two_adic_precision):
            return AlphaCertificate(
                cert.b, cert.a, alpha, nz, "conjugate-trace-swap", "2-adic", settings.two_adic_precision
            )
    raise NormalizationError(f"交换后的元素 {nx} + {ny}√{cert.b} 没有满足 2-adic 条件的符号")


def find_certificate(a: int, b: int, settings: Settings | None = None) -> AlphaCertificate:
    """取求解器输出中第一个能归一化的解。"""

    for cert in certificates(a, b, 1, settings):
        return cert
    raise SearchExhaustedError(f"在搜索上限内未找到 ({a}, {b}) 的本原解，可调大 --bound-cap")


def certificates(
    a: int,
    b: int,
    count: int,
    settings: Settings | None = None,
    *,
    include_automorphs: bool = False,
) -> Iterator[AlphaCertificate]:
    """依次产出最多 count 个互不相同的归一化证书（求解器输出、Galois 共轭、可选的自同构像）。"""

    settings = settings or default_settings
    seen: set[Solution] = set()
    produced = 0
    attempts = 0
    failures = 0
    automorph = pell_fundamental(a) if include_automorphs else None
    for sol in iter_solutions(a, b, settings):
        attempts += 1
        if attempts > settings.certificate_attempts:
            break
        x, y, z = sol
        candidates = [sol, (x, -y, z)]
        if automorph is not None:
            candidates.append(_automorph(sol, a, automorph[0], automorph[1], 1))
        for cand in candidates:
            try:
                cert = normalize(cand, a, b, settings)
            except NormalizationError:
                failures += 1
                continue
            if cert.solution in seen:
                continue
            seen.add(cert.solution)
            yield cert
            produced += 1
            if produced >= count:
                return
    if produced == 0 and attempts:
        raise NormalizationError(f"({a}, {b}) 的前 {attempts} 个解都无法归一化（失败 {failures} 次）")
