"""模运算基础函数。

提供素性判定、Legendre 符号、四次剩余符号、模平方根、二平方和分解、Pell 基本解以及 2-adic 平方根。

说明:
- 素性、Legendre 符号、模平方根、Pell 基本解与素数枚举交给 sympy / gmpy2，这里只负责前提检查和取根约定；
- 所有函数都是输入的纯函数，可以任意并发调用；
- 素数参数必须小于 `settings.prime_limit`（2^61），超出时抛出 `CapacityError`；
- Python 整数本身是任意精度的，中间结果（例如 Pell 基本解）不受该上限约束。
"""

from __future__ import annotations

from typing import Iterator

import gmpy2
from sympy import isprime, primerange
from sympy.ntheory import sqrt_mod as _sympy_sqrt_mod
from sympy.solvers.diophantine.diophantine import diop_DN

from .config import settings
from .errors import CapacityError, DomainError


def check_capacity(n: int, name: str = "n") -> None:
    if abs(n) >= settings.prime_limit:
        raise CapacityError(f"{name}={n} 超出支持范围（必须小于 2^61）")


def is_prime(n: int) -> bool:
    """素性判定；sympy 的 isprime 对 2^64 以下的整数是确定性的。"""

    if n < 2:
        raise DomainError(f"素性判定要求 n ≥ 2，收到 {n}")
    check_capacity(n)
    return bool(isprime(n))


def require_prime(n: int, name: str = "p") -> int:
    if n < 2 or not is_prime(n):
        raise DomainError(f"{name}={n} 不是素数")
    return n


def _require_odd_modulus(p: int) -> None:
    if p == 2:
        raise DomainError("Legendre 符号要求奇素数模，收到 p=2")
    if p < 3 or p % 2 == 0:
        raise DomainError(f"模数 p={p} 不是奇素数")
    check_capacity(p, "p")


def legendre(a: int, p: int) -> int:
    """(a/p)，返回 -1、0 或 1。

    只检查 p 为奇数，不重复做素性判定（调用方保证 p 为素数）。
    """

    _require_odd_modulus(p)
    return int(gmpy2.legendre(a % p, p))


def quartic_symbol(a: int, p: int) -> int:
    """有理四次剩余符号 a^((p-1)/4) mod p，取值 ±1。"""

    _require_odd_modulus(p)
    if p % 4 != 1:
        raise DomainError(f"四次剩余符号要求 p ≡ 1 mod 4，收到 p={p}")
    if legendre(a, p) != 1:
        raise DomainError(f"四次剩余符号要求 ({a}/{p}) = 1")
    r = gmpy2.powmod(a % p, (p - 1) // 4, p)
    return 1 if r == 1 else -1


def sqrt_mod(a: int, p: int) -> int:
    """模平方根，返回两个根中较小的一个。"""

    if legendre(a, p) != 1:
        raise DomainError(f"{a} 不是模 {p} 的二次剩余")
    x = int(_sympy_sqrt_mod(a % p, p))
    return min(x, p - x)


def two_squares(p: int) -> tuple[int, int]:
    """Cornacchia 分解 p = y² + z²，其中 y ≡ 0 mod 4、z 为奇数。"""

    if p % 8 != 1:
        raise DomainError(f"二平方和分解要求 p ≡ 1 mod 8，收到 p={p}")
    require_prime(p)
    # -1 的平方根，取较大的那个启动欧几里得算法
    t = p - sqrt_mod(-1, p)
    a, b = p, t
    limit = gmpy2.isqrt(p)
    while b > limit:
        a, b = b, a % b
    rest = p - b * b
    if not gmpy2.is_square(rest):
        raise DomainError(f"p={p} 的 Cornacchia 分解失败")
    c = int(gmpy2.isqrt(rest))
    y, z = (b, c) if b % 2 == 0 else (c, b)
    return y, z


def pell_fundamental(d: int) -> tuple[int, int]:
    """u² - d·v² = 1 的最小正解。"""

    if d < 2:
        raise DomainError(f"Pell 方程要求 d ≥ 2，收到 {d}")
    if gmpy2.is_square(d):
        raise DomainError(f"d={d} 是完全平方数，Pell 方程无非平凡解")
    u, v = diop_DN(d, 1)[0]
    return int(u), int(v)


def sqrt_2adic(a: int, k: int) -> int:
    """Hensel 提升求 2-adic 平方根 mod 2^k，固定取 ≡ 1 mod 4 的分支。"""

    if k < 3:
        raise DomainError(f"2-adic 精度要求 k ≥ 3，收到 {k}")
    if a % 8 != 1:
        raise DomainError(f"a={a} 不满足 a ≡ 1 mod 8，不存在 2-adic 平方根")
    # 不变量: 第 i 步开始时 s² ≡ a mod 2^i；提升到 2^(k+1) 后 s mod 2^k 才与精度无关
    s = 1
    for i in range(3, k + 1):
        if (s * s - a) % (1 << (i + 1)) != 0:
            s += 1 << (i - 1)
    return s % (1 << k)


def two_adic_split(n: int) -> tuple[int, int]:
    """n = 2^v · u，u 为奇数；返回 (v, u)。"""

    if n == 0:
        raise DomainError("0 没有 2-adic 分解")
    v = (n & -n).bit_length() - 1
    return v, n >> v


def iter_primes(limit: int, residue: int = 1, modulus: int = 1, start: int = 2) -> Iterator[int]:
    """按升序枚举 start ≤ p ≤ limit 且 p ≡ residue mod modulus 的素数。"""

    for p in primerange(max(start, 2), limit + 1):
        if (p - residue) % modulus == 0:
            yield int(p)
