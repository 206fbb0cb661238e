"""G_S(2) 模 F_(3) 的 Koch 表现、环绕数、Zassenhaus 判据与 G_S^T(2) 商表现数据。

约定:
- S = {l_0 = 2, l_1, ..., l_n}，生成元 x_0..x_n 的下标与素数下标一致；
- 商群 G_S^T(2) 的生成元 x̄_1..x̄_n 沿用下标 1..n，x_0 经 r_Q ≡ x_0·x_n 消去；
- 关系子是结构化的 `GroupWord`，需要时再交给 `magnus` 展开。
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from logger import logger

from .errors import DomainError, InternalContradictionError
from .magnus import GroupWord, commutator, filtration_degree, letter
from .modarith import is_prime, legendre


@dataclass(frozen=True)
class PrimeSet:
    """S = {2} ∪ {l_1, ..., l_n}；给定 q 时 l_n 是 q 的唯一非剩余素数。"""

    odd_primes: tuple[int, ...]
    q: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "odd_primes", tuple(self.odd_primes))
        if not self.odd_primes:
            raise DomainError("S 至少要包含一个奇素数（n ≥ 1）")
        if len(set(self.odd_primes)) != len(self.odd_primes):
            raise DomainError(f"奇素数 {list(self.odd_primes)} 有重复")
        for l in self.odd_primes:
            if l < 3 or l % 2 == 0 or not is_prime(l):
                raise DomainError(f"{l} 不是奇素数")
        if self.q is not None:
            problem = _gst_conditions(self.odd_primes, self.q)
            if problem:
                raise DomainError(problem)

    @classmethod
    def parse(cls, text: str, q: int | None = None) -> PrimeSet:
        """解析 "2,313,457,521"；2 可以省略，奇素数保持给定顺序。"""

        try:
            values = [int(part) for part in text.replace(" ", "").split(",") if part]
        except ValueError as exc:
            raise DomainError(f"无法解析素数集合 {text!r}") from exc
        return cls(tuple(v for v in values if v != 2), q)

    @property
    def n(self) -> int:
        return len(self.odd_primes)

    @property
    def primes(self) -> tuple[int, ...]:
        """(l_0, ..., l_n)，l_0 = 2。"""

        return (2, *self.odd_primes)

    def prime(self, index: int) -> int:
        return self.primes[index]


@dataclass(frozen=True)
class LinkingData:
    """F₂ 上的环绕数表；矩阵按 0..n 编号，未定义的位置恒为 0。"""

    a: np.ndarray
    a_i0: np.ndarray
    atilde_i0: np.ndarray
    aprime: np.ndarray

    def is_trivial(self) -> bool:
        return not self.aprime.any()


def linking_data(S: PrimeSet) -> LinkingData:
    n = S.n
    l = S.primes
    a = np.zeros((n + 1, n + 1), dtype=np.uint8)
    a_i0 = np.zeros(n + 1, dtype=np.uint8)
    atilde_i0 = np.zeros(n + 1, dtype=np.uint8)
    aprime = np.zeros((n + 1, n + 1), dtype=np.uint8)
    for i in range(1, n + 1):
        a_i0[i] = l[i] % 8 in (3, 5)
        atilde_i0[i] = l[i] % 8 in (3, 7)
        for j in range(1, n + 1):
            if j != i:
                a[i, j] = legendre(l[i], l[j]) == -1
    for i in range(1, n + 1):
        aprime[i, 0] = a_i0[i]
        for j in range(1, n + 1):
            if j == i:
                continue
            aprime[i, j] = a[i, j] ^ atilde_i0[i] if l[j] % 4 == 3 else a[i, j]
    return LinkingData(a, a_i0, atilde_i0, aprime)


def koch_relators(S: PrimeSet) -> list[GroupWord]:
    """r_i ≡ x_i^{l_i−1} · ∏_{j≠i} [x_i, x_j]^{a′_{i,j}} mod F_(3)，i = 1..n。"""

    data = linking_data(S)
    relators = []
    for i in range(1, S.n + 1):
        word = letter(i, S.prime(i) - 1)
        for j in range(S.n + 1):
            if j != i and data.aprime[i, j]:
                word = word * commutator(letter(i), letter(j))
        relators.append(word)
    return relators


def _zassenhaus_by_congruence(S: PrimeSet) -> bool:
    if any(l % 8 != 1 for l in S.odd_primes):
        return False
    return all(
        legendre(p, q) == 1 for idx, p in enumerate(S.odd_primes) for q in S.odd_primes[idx + 1:]
    )


def zassenhaus_ge3_via_relators(S: PrimeSet) -> bool:
    """所有 Koch 关系子都落在 F_(3) 中（在次数 2 处截断展开）。"""

    return all(filtration_degree(r, D=2, d=S.n + 1) is None for r in koch_relators(S))


def zassenhaus_ge3(S: PrimeSet) -> bool:
    """z(G_S(2)) ≥ 3 当且仅当所有 l_i ≡ 1 mod 8 且奇素数两两 Legendre 符号为 1。"""

    direct = _zassenhaus_by_congruence(S)
    via_relators = zassenhaus_ge3_via_relators(S)
    if direct != via_relators:
        raise InternalContradictionError(
            f"S={list(S.primes)} 的两种 Zassenhaus 判据不一致: 同余判据 {direct}, 关系子判据 {via_relators}"
        )
    return direct


def ranks(S: PrimeSet) -> tuple[int, int]:
    relators = koch_relators(S)
    h1, h2 = S.n + 1, S.n
    if len(relators) != h2:
        raise InternalContradictionError(f"关系子个数 {len(relators)} 与关系秩 {h2} 不一致")
    return h1, h2


# ---------------------------------------------------------------------------
# G_S^T(2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GstVerdict:
    ok: bool
    ordering: tuple[int, ...] | None = None
    diagnostic: str = ""

    def __bool__(self) -> bool:
        return self.ok

    @property
    def designated(self) -> int | None:
        return self.ordering[-1] if self.ordering else None


def _gst_conditions(ordered: tuple[int, ...], q: int) -> str:
    """返回第一个不满足的条件；全部满足时返回空串。"""

    if q < 2 or not is_prime(q):
        return f"q={q} 不是素数"
    if q == 2 or q in ordered:
        return f"q={q} 已经在 S 中"
    if q % 8 != 5:
        return f"q={q} ≢ 5 mod 8"
    *head, last = ordered
    for l in head:
        if legendre(q, l) != 1:
            return f"({q}/{l}) = -1，但 {l} 不是指定的 l_n"
    if legendre(q, last) != -1:
        return f"({q}/{last}) = 1，指定的 l_n 必须满足 (q/l_n) = -1"
    return ""


def gst_admissible(S: PrimeSet, q: int) -> GstVerdict:
    """检查 q 的条件，并把唯一满足 (q/l) = −1 的奇素数移到最后作为 l_n。"""

    if not zassenhaus_ge3(S):
        return GstVerdict(False, diagnostic=f"S={list(S.primes)} 不满足 z(G_S(2)) ≥ 3")
    if q < 2 or not is_prime(q):
        return GstVerdict(False, diagnostic=f"q={q} 不是素数")
    if q == 2 or q in S.odd_primes:
        return GstVerdict(False, diagnostic=f"q={q} 已经在 S 中")
    if q % 8 != 5:
        return GstVerdict(False, diagnostic=f"q={q} ≢ 5 mod 8")
    non_residues = [l for l in S.odd_primes if legendre(q, l) == -1]
    if len(non_residues) != 1:
        return GstVerdict(
            False,
            diagnostic=f"满足 ({q}/l) = -1 的奇素数有 {len(non_residues)} 个: {non_residues}，必须恰好一个",
        )
    designated = non_residues[0]
    ordering = tuple(l for l in S.odd_primes if l != designated) + (designated,)
    if _gst_conditions(ordering, q):
        raise InternalContradictionError(f"重排后的 {ordering} 仍不满足 q={q} 的条件")
    if ordering != S.odd_primes:
        logger.info("reordered odd primes %s -> %s for q=%d", list(S.odd_primes), list(ordering), q)
    return GstVerdict(True, ordering)


@dataclass(frozen=True)
class GstPresentation:
    """G_S^T(2) 的商表现: x_0 ↦ x̄_n 消去生成元，特征标按 χ̄_n ↦ χ_0 + χ_n 膨胀。"""

    base: PrimeSet
    q: int
    relators: tuple[GroupWord, ...]
    eliminated: tuple[int, int] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "eliminated", (0, self.base.n))

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def generator_count(self) -> int:
        return self.base.n

    @property
    def inflation(self) -> dict[int, tuple[int, ...]]:
        """χ̄_i ↦ Σ χ_t，t 取自返回的下标元组。"""

        n = self.base.n
        return {i: (i,) if i < n else (0, n) for i in range(1, n + 1)}

    def inflation_matrix(self) -> np.ndarray:
        """形状 (n+1, n) 的 F₂ 矩阵，第 ī−1 列是 χ̄_ī 在基 χ_0..χ_n 下的坐标。"""

        n = self.base.n
        matrix = np.zeros((n + 1, n), dtype=np.uint8)
        for i, targets in self.inflation.items():
            for t in targets:
                matrix[t, i - 1] = 1
        return matrix

    def relators_in_F3(self) -> bool:
        return all(filtration_degree(r, D=2, d=self.base.n + 1) is None for r in self.relators)


def gst_presentation_data(S: PrimeSet, q: int) -> GstPresentation:
    verdict = gst_admissible(S, q)
    if not verdict:
        raise DomainError(f"(S, q) = ({list(S.primes)}, {q}) 不满足商群条件: {verdict.diagnostic}")
    base = PrimeSet(verdict.ordering, q)
    n = base.n
    psi = {0: letter(n)}
    relators = tuple(r.substitute(psi) for r in koch_relators(base))
    return GstPresentation(base, q, relators)
