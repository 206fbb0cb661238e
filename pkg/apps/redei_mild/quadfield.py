"""实二次域 Q(√m) 的元素运算与分裂符号。

说明:
- `QuadInt` 表示 α = x + y√m，坐标为精确整数；
- 素理想只以一次分裂形式 (q, √m − s) 表示；当 q = m 时用 s = 0 表示分歧素理想 (√m)；
- `residue_symbol` 在约化为 0 时返回 0 而不是报错，由调用方换用另一个根。
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, UnsupportedCaseError
from .modarith import legendre, sqrt_2adic, sqrt_mod


@dataclass(frozen=True)
class QuadInt:
    """实二次域中的元素 x + y√m。"""

    x: int
    y: int
    m: int

    def __post_init__(self) -> None:
        if self.m < 2:
            raise DomainError(f"根式 m={self.m} 必须是 ≥ 2 的无平方因子整数")

    def __mul__(self, other: QuadInt | int) -> QuadInt:
        if isinstance(other, int):
            return QuadInt(self.x * other, self.y * other, self.m)
        if other.m != self.m:
            raise DomainError(f"不同二次域的元素不能相乘: √{self.m} 与 √{other.m}")
        return QuadInt(
            self.x * other.x + self.m * self.y * other.y,
            self.x * other.y + self.y * other.x,
            self.m,
        )

    __rmul__ = __mul__

    def __neg__(self) -> QuadInt:
        return QuadInt(-self.x, -self.y, self.m)

    def conjugate(self) -> QuadInt:
        return QuadInt(self.x, -self.y, self.m)

    def trace(self) -> int:
        return 2 * self.x

    def norm(self) -> int:
        return norm(self)

    def __str__(self) -> str:
        sign = "-" if self.y < 0 else "+"
        return f"{self.x} {sign} {abs(self.y)}√{self.m}"


@dataclass(frozen=True)
class SplitPrime:
    """一次素理想 (q, √m − s)。"""

    q: int
    m: int
    s: int

    @property
    def ramified(self) -> bool:
        return self.q == self.m

    def other_root(self) -> SplitPrime:
        if self.ramified:
            return self
        return SplitPrime(self.q, self.m, self.q - self.s)


def split_prime(q: int, m: int) -> SplitPrime:
    """q 在 Q(√m) 中分裂时，返回较小根对应的素理想；q = m 时返回分歧素理想。"""

    if q == m:
        return SplitPrime(q, m, 0)
    if legendre(m, q) != 1:
        raise DomainError(f"{q} 在 Q(√{m}) 中不分裂")
    return SplitPrime(q, m, sqrt_mod(m, q))


def norm(alpha: QuadInt) -> int:
    return alpha.x * alpha.x - alpha.m * alpha.y * alpha.y


def congruent_one_mod_4O(alpha: QuadInt) -> bool:
    """判断 α − 1 ∈ 4·O_k。

    m ≡ 1 mod 4 时 O_k 的整基为 {1, (1+√m)/2}，4·O_k 的格基为 {4, 2+2√m}，
    于是条件等价于 y 为偶数且 x − 1 − y ≡ 0 mod 4。
    """

    m = alpha.m
    if m == 2:
        raise UnsupportedCaseError("Q(√2) 一侧的 mod 4 同余归一化不受支持")
    if m % 2 == 0:
        raise DomainError(f"根式 m={m} 必须是奇数")
    if m % 4 == 1:
        return alpha.y % 2 == 0 and (alpha.x - 1 - alpha.y) % 4 == 0
    # m ≡ 3 mod 4: O_k = Z[√m]
    return (alpha.x - 1) % 4 == 0 and alpha.y % 4 == 0


def reduce_at(alpha: QuadInt, p: SplitPrime) -> int:
    if p.m != alpha.m:
        raise DomainError(f"素理想位于 Q(√{p.m})，而 α 位于 Q(√{alpha.m})")
    return (alpha.x + alpha.y * p.s) % p.q


def residue_symbol(alpha: QuadInt, p: SplitPrime) -> int:
    """(α|k / p)：p 在 k(√α) 中分裂为 1，惰性为 -1，分歧为 0。"""

    r = reduce_at(alpha, p)
    if r == 0:
        return 0
    return legendre(r, p.q)


def embed_2adic(alpha: QuadInt, precision: int, sign: int = 1) -> int:
    """在 √m ↦ ±sqrt_2adic(m) 下把 α 嵌入 Z/2^precision。"""

    r = sqrt_2adic(alpha.m, precision)
    return (alpha.x + sign * alpha.y * r) % (1 << precision)


def residue_symbol_2adic(alpha: QuadInt, precision: int, sign: int = 1) -> int:
    if alpha.m % 8 != 1:
        raise DomainError(f"2-adic 求值要求 m ≡ 1 mod 8，收到 m={alpha.m}")
    u = embed_2adic(alpha, precision, sign)
    if u % 2 == 0:
        raise DomainError(f"α = {alpha} 在该 2-adic 嵌入下不是单位")
    return 1 if u % 8 == 1 else -1
