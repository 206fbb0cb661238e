"""截断 Magnus 展开。

x_i ↦ 1 + X_i 把自由群嵌入 F₂⟨⟨X_0, ..., X_{d-1}⟩⟩，本模块在次数 D 处截断:
- `expand` / `epsilon` / `filtration_degree` 计算展开式、ε 系数和 Zassenhaus 滤过次数；
- `express_mod_F4` 把三次系数表写成三次基本换位子的乘积（模 F_(4)）；
- `tensor_roundtrip` 检查迹张量与关系子三次系数之间的往返一致性。

基本换位子约定: [[x_a, x_b], x_c]，a < b 且 c ≤ b；其三次部分为 X_aX_bX_c + X_bX_aX_c + X_cX_aX_b + X_cX_bX_a。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence, Union

import numpy as np

from .config import settings
from .errors import CapacityError, DomainError, InconsistencyError, TruncationError

if TYPE_CHECKING:
    from .massey import MasseyTensor

Monomial = tuple[int, ...]


# ---------------------------------------------------------------------------
# 群元素的符号表示
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Letter:
    gen: int
    exp: int = 1

    def __post_init__(self) -> None:
        if self.exp == 0:
            raise DomainError("字母的指数不能为 0")
        if self.gen < 0:
            raise DomainError(f"生成元下标 {self.gen} 不能为负")


@dataclass(frozen=True)
class Commutator:
    """结构化换位子 [u, v]^exp = (u⁻¹v⁻¹uv)^exp，不预先展开。"""

    left: GroupWord
    right: GroupWord
    exp: int = 1

    def __post_init__(self) -> None:
        if self.exp == 0:
            raise DomainError("换位子的指数不能为 0")


@dataclass(frozen=True)
class Power:
    base: GroupWord
    exp: int

    def __post_init__(self) -> None:
        if self.exp == 0:
            raise DomainError("幂的指数不能为 0")


Factor = Union[Letter, Commutator, Power]


@dataclass(frozen=True)
class GroupWord:
    """因子的乘积；空乘积是单位元。"""

    factors: tuple[Factor, ...] = ()

    def __mul__(self, other: GroupWord) -> GroupWord:
        factors = list(self.factors)
        for factor in other.factors:
            # 相邻同一生成元的字母合并
            if factors and isinstance(factor, Letter) and isinstance(factors[-1], Letter) and factors[-1].gen == factor.gen:
                exp = factors[-1].exp + factor.exp
                factors.pop()
                if exp:
                    factors.append(Letter(factor.gen, exp))
            else:
                factors.append(factor)
        return GroupWord(tuple(factors))

    def __invert__(self) -> GroupWord:
        return GroupWord(tuple(_invert_factor(f) for f in reversed(self.factors)))

    def __pow__(self, n: int) -> GroupWord:
        if n == 0 or not self.factors:
            return GroupWord()
        if len(self.factors) == 1:
            f = self.factors[0]
            if isinstance(f, Letter):
                return GroupWord((Letter(f.gen, f.exp * n),))
            if isinstance(f, Commutator):
                return GroupWord((Commutator(f.left, f.right, f.exp * n),))
            return GroupWord((Power(f.base, f.exp * n),))
        return GroupWord((Power(self, n),))

    def is_identity(self) -> bool:
        return not self.factors

    def generators(self) -> set[int]:
        found: set[int] = set()
        for f in self.factors:
            if isinstance(f, Letter):
                found.add(f.gen)
            elif isinstance(f, Commutator):
                found |= f.left.generators() | f.right.generators()
            else:
                found |= f.base.generators()
        return found

    def substitute(self, mapping: dict[int, GroupWord]) -> GroupWord:
        """把生成元 x_i 替换为 mapping[i]（未出现的保持不变）。"""

        result = GroupWord()
        for f in self.factors:
            if isinstance(f, Letter):
                image = mapping.get(f.gen, letter(f.gen))
                result = result * (image ** f.exp)
            elif isinstance(f, Commutator):
                result = result * GroupWord(
                    (Commutator(f.left.substitute(mapping), f.right.substitute(mapping), f.exp),)
                )
            else:
                result = result * (f.base.substitute(mapping) ** f.exp)
        return result

    def __str__(self) -> str:
        return format_word(self)


def _invert_factor(f: Factor) -> Factor:
    if isinstance(f, Letter):
        return Letter(f.gen, -f.exp)
    if isinstance(f, Commutator):
        return Commutator(f.left, f.right, -f.exp)
    return Power(f.base, -f.exp)


def letter(gen: int, exp: int = 1) -> GroupWord:
    return GroupWord((Letter(gen, exp),))


def commutator(u: GroupWord, v: GroupWord, exp: int = 1) -> GroupWord:
    return GroupWord((Commutator(u, v, exp),))


def inverse_word(w: GroupWord) -> GroupWord:
    return ~w


def power(w: GroupWord, n: int) -> GroupWord:
    return w ** n


def basic_commutator(a: int, b: int, c: int) -> GroupWord:
    """[[x_a, x_b], x_c]。"""

    return commutator(commutator(letter(a), letter(b)), letter(c))


def _format_factor(f: Factor, symbol: str) -> str:
    if isinstance(f, Letter):
        text = f"{symbol}{f.gen}"
    elif isinstance(f, Commutator):
        text = f"[{format_word(f.left, symbol)}, {format_word(f.right, symbol)}]"
    else:
        text = f"({format_word(f.base, symbol)})"
    exp = f.exp
    return text if exp == 1 else f"{text}^{exp}"


def format_word(w: GroupWord, symbol: str = "x") -> str:
    if not w.factors:
        return "1"
    return "·".join(_format_factor(f, symbol) for f in w.factors)


# ---------------------------------------------------------------------------
# 截断幂级数
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncatedSeries:
    """F₂ 系数的非交换截断幂级数，只存系数为 1 的单项式。"""

    d: int
    D: int
    terms: frozenset[Monomial]

    @classmethod
    def one(cls, d: int, D: int) -> TruncatedSeries:
        return cls(d, D, frozenset({()}))

    @classmethod
    def variable(cls, i: int, d: int, D: int) -> TruncatedSeries:
        return cls(d, D, frozenset({(), (i,)}))

    def _same_ring(self, other: TruncatedSeries) -> None:
        if (self.d, self.D) != (other.d, other.D):
            raise DomainError(f"截断参数不一致: (d={self.d}, D={self.D}) 与 (d={other.d}, D={other.D})")

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._same_ring(other)
        return TruncatedSeries(self.d, self.D, self.terms ^ other.terms)

    def __mul__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._same_ring(other)
        acc: set[Monomial] = set()
        for s in self.terms:
            room = self.D - len(s)
            for t in other.terms:
                if len(t) <= room:
                    mono = s + t
                    if mono in acc:
                        acc.remove(mono)
                    else:
                        acc.add(mono)
        return TruncatedSeries(self.d, self.D, frozenset(acc))

    def is_unit(self) -> bool:
        return () in self.terms

    def inverse(self) -> TruncatedSeries:
        """(1 + A)⁻¹ = Σ_{k ≤ D} A^k（特征 2 下减号即加号）。"""

        if not self.is_unit():
            raise DomainError("常数项为 0 的级数不可逆")
        one = TruncatedSeries.one(self.d, self.D)
        a = self + one
        result, acc = one, one
        for _ in range(self.D):
            acc = acc * a
            if not acc.terms:
                break
            result = result + acc
        return result

    def power(self, n: int) -> TruncatedSeries:
        if n < 0:
            return self.inverse().power(-n)
        result = TruncatedSeries.one(self.d, self.D)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def coefficient(self, index: Sequence[int]) -> int:
        index = tuple(index)
        if len(index) > self.D:
            raise TruncationError(f"多重指标 {index} 的长度 {len(index)} 超过截断次数 D={self.D}")
        return int(index in self.terms)

    def degree_part(self, k: int) -> frozenset[Monomial]:
        return frozenset(t for t in self.terms if len(t) == k)

    def low_degree(self) -> int | None:
        """最小的非常数项次数；除常数外全为 0 时返回 None。"""

        degrees = [len(t) for t in self.terms if t]
        return min(degrees) if degrees else None

    def degree3_table(self) -> np.ndarray:
        table = np.zeros((self.d, self.d, self.d), dtype=np.uint8)
        for t in self.degree_part(3):
            table[t] = 1
        return table


def _letter_power(gen: int, n: int, d: int, D: int) -> TruncatedSeries:
    """(1 + X)^n 按 Lucas 定理取二项式系数的奇偶；n < 0 时系数为 C(|n|+k−1, k)。"""

    if n >= 0:
        ks = [k for k in range(D + 1) if k & n == k]
    else:
        m = -n
        ks = [k for k in range(D + 1) if k & (m + k - 1) == k]
    return TruncatedSeries(d, D, frozenset((gen,) * k for k in ks))


def _check_degree(D: int) -> None:
    if D < 1:
        raise DomainError(f"截断次数 D={D} 必须 ≥ 1")
    if D > settings.magnus_degree_max:
        raise CapacityError(f"截断次数 D={D} 超过上限 {settings.magnus_degree_max}")


def expand(w: GroupWord, d: int | None = None, D: int | None = None) -> TruncatedSeries:
    """ψ(w)，截断到次数 D。"""

    D = settings.magnus_degree if D is None else D
    _check_degree(D)
    gens = w.generators()
    if d is None:
        d = max(gens, default=0) + 1
    if gens and max(gens) >= d:
        raise DomainError(f"生成元下标 {max(gens)} 超出字母表大小 d={d}")
    return _expand(w, d, D)


def _expand(w: GroupWord, d: int, D: int) -> TruncatedSeries:
    result = TruncatedSeries.one(d, D)
    for f in w.factors:
        if isinstance(f, Letter):
            part = _letter_power(f.gen, f.exp, d, D)
        elif isinstance(f, Commutator):
            u, v = _expand(f.left, d, D), _expand(f.right, d, D)
            part = (u.inverse() * v.inverse() * u * v).power(f.exp)
        else:
            part = _expand(f.base, d, D).power(f.exp)
        result = result * part
    return result


def epsilon(w: GroupWord, index: Sequence[int], d: int | None = None, D: int | None = None) -> int:
    """ε_I(w): X_I 在 ψ(w) 中的系数。"""

    D = settings.magnus_degree if D is None else D
    index = tuple(index)
    if len(index) > D:
        raise TruncationError(f"多重指标 {index} 的长度 {len(index)} 超过截断次数 D={D}")
    if d is None:
        d = max([*w.generators(), *index], default=0) + 1
    return expand(w, d, D).coefficient(index)


def filtration_degree(w: GroupWord, D: int | None = None, d: int | None = None) -> int | None:
    """使 ε_I(w) = 1 的最小 |I|；截断范围内没有时返回 None（表示 "> D"）。"""

    return expand(w, d, D).low_degree()


def format_filtration(degree: int | None, D: int) -> str:
    return f"> {D}" if degree is None else str(degree)


# ---------------------------------------------------------------------------
# 模 F_(4) 的基本换位子表示
# ---------------------------------------------------------------------------


def basic_triples(g: int) -> list[tuple[int, int, int]]:
    """位置 0..g-1 上的三次基本换位子 (a, b, c)，按字典序排列；个数为 (g³ − g) / 3。"""

    return [(a, b, c) for a in range(g) for b in range(a + 1, g) for c in range(b + 1)]


def _position(i: int, j: int, k: int, g: int) -> int:
    return (i * g + j) * g + k


def bracket_support(a: int, b: int, c: int, g: int) -> int:
    """[[x_a, x_b], x_c] 的三次系数，编码为 g³ 位的位集。"""

    bits = 0
    for i, j, k in ((a, b, c), (b, a, c), (c, a, b), (c, b, a)):
        bits ^= 1 << _position(i, j, k, g)
    return bits


def _table_bits(table: np.ndarray) -> int:
    bits = 0
    for i, j, k in zip(*np.nonzero(table)):
        bits |= 1 << _position(int(i), int(j), int(k), table.shape[0])
    return bits


def express_mod_F4(coeffs: np.ndarray | Sequence, labels: Sequence[int] | None = None) -> GroupWord:
    """三次系数表 → 基本换位子乘积（GF(2) 消元求解）。

    coeffs 的形状为 (g, g, g)，按位置索引；labels[p] 是位置 p 对应的生成元下标（缺省为 p）。
    """

    table = np.asarray(coeffs, dtype=np.int64) % 2
    if table.ndim != 3 or len(set(table.shape)) != 1:
        raise DomainError(f"三次系数表的形状必须是 (g, g, g)，收到 {table.shape}")
    g = table.shape[0]
    labels = list(range(g)) if labels is None else list(labels)
    if len(labels) != g:
        raise DomainError(f"标签个数 {len(labels)} 与表的维数 {g} 不一致")

    basis = basic_triples(g)
    # 主元位 -> (向量, 所用基本换位子的组合)
    pivots: dict[int, tuple[int, int]] = {}
    for idx, triple in enumerate(basis):
        vec, combo = bracket_support(*triple, g), 1 << idx
        while vec:
            lead = vec.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = (vec, combo)
                break
            pv, pc = pivots[lead]
            vec ^= pv
            combo ^= pc
        else:
            raise InconsistencyError(f"基本换位子 {triple} 与前面的基线性相关")

    target = _table_bits(table)
    chosen = 0
    while target:
        lead = target.bit_length() - 1
        if lead not in pivots:
            raise InconsistencyError("三次系数表不在基本换位子张成的空间内（不满足 shuffle 关系）")
        pv, pc = pivots[lead]
        target ^= pv
        chosen ^= pc

    word = GroupWord()
    for idx, (a, b, c) in enumerate(basis):
        if chosen >> idx & 1:
            word = word * basic_commutator(labels[a], labels[b], labels[c])
    return word


def express_word_mod_F4(w: GroupWord, d: int | None = None) -> GroupWord:
    """w ∈ F_(3) 时返回与 w 模 F_(4) 同余的基本换位子乘积。"""

    series = expand(w, d, 3)
    low = series.low_degree()
    if low is not None and low < 3:
        raise DomainError(f"{format_word(w)} 不在 F_(3) 中（滤过次数 {low}）")
    return express_mod_F4(series.degree3_table())


def tensor_roundtrip(tensor: MasseyTensor, m: int) -> bool:
    """关系子 r_m 的三次系数表 → 基本换位子 → 重新展开，检查三次系数一致。"""

    table = tensor.relator_table(m)
    labels = list(tensor.gen_labels)
    word = express_mod_F4(table, labels)
    d = max(labels) + 1
    series = expand(word, d, 3)
    if series.low_degree() is not None and series.low_degree() < 3:
        return False
    rebuilt = series.degree3_table()[np.ix_(labels, labels, labels)]
    return bool(np.array_equal(rebuilt, table % 2))


def relator_words(tensor: MasseyTensor) -> dict[int, GroupWord]:
    """每个关系子模 F_(4) 的基本换位子表示。"""

    labels = list(tensor.gen_labels)
    return {m: express_mod_F4(tensor.relator_table(m), labels) for m in tensor.relator_labels}
