"""三重 Massey 积迹张量与温和性判据。

张量 T[m, i, j, k] = tr_{r_m}⟨χ_i, χ_j, χ_k⟩ ∈ F₂ 存为 numpy uint8 数组，形状 (n, g, g, g):
- 第 0 维是关系子 r_1..r_n；
- 后三维是生成元位置，`gen_labels[p]` 给出位置 p 对应的特征标下标（G_S(2) 为 0..n，G_S^T(2) 为 1..n）。

F₂ 向量（特征标空间中的元素、迹向量）用整数位集表示: 第 p 位是位置 p 的坐标。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

import numpy as np
from tqdm import tqdm

from logger import logger

from .config import settings as default_settings
from .errors import CapacityError, DomainError, InternalContradictionError
from .presentation import GstPresentation, PrimeSet, gst_presentation_data, zassenhaus_ge3
from .redei import RedeiEngine, redei_engine

Index4 = tuple[int, int, int, int]
Triple = tuple[int, int, int]


def gf2_rank(rows: Iterable[int]) -> int:
    """位集表示的向量组在 GF(2) 上的秩。"""

    pivots: dict[int, int] = {}
    for row in rows:
        while row:
            lead = row.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = row
                break
            row ^= pivots[lead]
    return len(pivots)


def bits_to_vector(bits: int, g: int) -> np.ndarray:
    return np.array([(bits >> p) & 1 for p in range(g)], dtype=np.int64)


def vector_to_bits(vector: Iterable[int]) -> int:
    return sum(1 << p for p, v in enumerate(vector) if int(v) % 2)


def shuffle_defect(data: np.ndarray) -> np.ndarray:
    """entry(m,a,b,c) + entry(m,b,a,c) + entry(m,b,c,a) mod 2，逐项。"""

    swapped = np.einsum("mbac->mabc", data)
    rotated = np.einsum("mbca->mabc", data)
    return (data.astype(np.int64) + swapped + rotated) % 2


@dataclass(frozen=True, eq=False)
class MasseyTensor:
    data: np.ndarray
    gen_labels: tuple[int, ...]
    consulted: tuple[Triple, ...] = ()
    warnings: tuple[str, ...] = ()
    checked: bool = field(default=True, repr=False)

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.uint8) % 2
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "gen_labels", tuple(self.gen_labels))
        g = len(self.gen_labels)
        if data.ndim != 4 or data.shape[1:] != (g, g, g):
            raise DomainError(f"张量形状 {data.shape} 与生成元个数 {g} 不一致")
        if self.checked:
            violations = self.shuffle_violations()
            if violations:
                raise InternalContradictionError(f"张量不满足 shuffle 关系，例如 {violations[0]}")

    @classmethod
    def zeros(cls, n: int, gen_labels: Sequence[int]) -> MasseyTensor:
        g = len(gen_labels)
        return cls(np.zeros((n, g, g, g), dtype=np.uint8), tuple(gen_labels))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def g(self) -> int:
        return len(self.gen_labels)

    @property
    def relator_labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    def position(self, label: int) -> int:
        try:
            return self.gen_labels.index(label)
        except ValueError:
            raise DomainError(f"特征标下标 {label} 不在 {list(self.gen_labels)} 中") from None

    def entry(self, m: int, i: int, j: int, k: int) -> int:
        if not 1 <= m <= self.n:
            raise DomainError(f"关系子下标 m={m} 不在 1..{self.n} 中")
        return int(self.data[m - 1, self.position(i), self.position(j), self.position(k)])

    def relator_table(self, m: int) -> np.ndarray:
        if not 1 <= m <= self.n:
            raise DomainError(f"关系子下标 m={m} 不在 1..{self.n} 中")
        return self.data[m - 1]

    def nonzero(self) -> list[Index4]:
        labels = self.gen_labels
        return sorted(
            (int(m) + 1, labels[i], labels[j], labels[k]) for m, i, j, k in zip(*np.nonzero(self.data))
        )

    def support(self, m: int) -> list[Triple]:
        return [(i, j, k) for mm, i, j, k in self.nonzero() if mm == m]

    def is_zero(self) -> bool:
        return not self.data.any()

    def shuffle_violations(self) -> list[Index4]:
        labels = self.gen_labels
        defect = shuffle_defect(self.data)
        return sorted(
            (int(m) + 1, labels[a], labels[b], labels[c]) for m, a, b, c in zip(*np.nonzero(defect))
        )

    def trace_vector(self, u: int, v: int, w: int) -> int:
        """tr⟨u, v, w⟩ 在 F₂^n 中的位集（按三线性展开）。"""

        g = self.g
        traces = np.einsum(
            "mabc,a,b,c->m", self.data.astype(np.int64), bits_to_vector(u, g), bits_to_vector(v, g), bits_to_vector(w, g)
        )
        return vector_to_bits(traces % 2)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MasseyTensor):
            return NotImplemented
        return self.gen_labels == other.gen_labels and np.array_equal(self.data, other.data)

    __hash__ = None  # type: ignore[assignment]


def z_lower_bound(tensor: MasseyTensor) -> int:
    """z ≥ 3 的前提下，三重 Massey 积恒为 0 时 z ≥ 4。"""

    return 4 if tensor.is_zero() else 3


# ---------------------------------------------------------------------------
# 由 Rédei 符号组装
# ---------------------------------------------------------------------------


def _ensure_pairs(pairs: Iterable[tuple[int, int]], engine: RedeiEngine) -> tuple[str, ...]:
    warnings = []
    for a, b in sorted(set(pairs)):
        message = engine.ensure_totally_real(a, b)
        if message:
            warnings.append(message)
    return tuple(warnings)


def _consulted_symbol(m: int, i: int, j: int, k: int) -> Triple | None:
    """T[m,i,j,k] 取决于哪个下标三元组的符号（第三位总是 m）；不取决于符号时返回 None。"""

    if m == k and m != i:
        return i, j, k
    if m == i and m != k:
        return j, k, i
    return None


def build_tensor(S: PrimeSet, engine: RedeiEngine | None = None) -> MasseyTensor:
    """G_S(2) 的迹张量，生成元下标 0..n。"""

    engine = engine or redei_engine
    if not zassenhaus_ge3(S):
        raise DomainError(f"S={list(S.primes)} 不满足 z(G_S(2)) ≥ 3，三重 Massey 积没有定义")
    n, l = S.n, S.primes
    g = n + 1

    cells: dict[Index4, Triple] = {}
    pairs: set[tuple[int, int]] = set()
    for m in range(1, n + 1):
        for i, j, k in product(range(g), repeat=3):
            idx = _consulted_symbol(m, i, j, k)
            if idx is None:
                continue
            if l[idx[2]] == 2:
                raise InternalContradictionError(f"求值位置出现了 2: 下标 {idx}")
            cells[(m, i, j, k)] = idx
            a, b, c = (l[t] for t in idx)
            pairs.add((min(a, b), max(a, b)))
            pairs.add((min(b, c), max(b, c)))

    warnings = _ensure_pairs(pairs, engine)
    data = np.zeros((n, g, g, g), dtype=np.uint8)
    consulted: set[Triple] = set()
    for (m, i, j, k), idx in cells.items():
        a, b, c = (l[t] for t in idx)
        value = engine.symbol(a, b, c)
        if m == i and value != engine.symbol(l[i], l[j], l[k]):
            raise InternalContradictionError(f"[{b}, {c}, {a}] 与 [{a}, {b}, {c}] 不相等")
        data[m - 1, i, j, k] = value == -1
        consulted.add(tuple(sorted((a, b, c))))  # type: ignore[arg-type]
    logger.debug("built tensor for S=%s from %d symbols", list(l), len(consulted))
    return MasseyTensor(data, tuple(range(g)), tuple(sorted(consulted)), warnings)


def inflate_tensor(tensor: MasseyTensor, presentation: GstPresentation) -> MasseyTensor:
    """沿膨胀映射 χ̄_i ↦ χ_i (i < n)、χ̄_n ↦ χ_0 + χ_n 三线性拉回。"""

    n = presentation.n
    if tensor.gen_labels != tuple(range(n + 1)) or tensor.n != n:
        raise DomainError(f"膨胀需要下标 0..{n} 上的 G_S(2) 张量，收到下标 {list(tensor.gen_labels)}")
    P = presentation.inflation_matrix().astype(np.int64)
    data = np.einsum("mabc,ai,bj,ck->mijk", tensor.data.astype(np.int64), P, P, P) % 2
    return MasseyTensor(data, tuple(range(1, n + 1)), tensor.consulted, tensor.warnings)


# ---------------------------------------------------------------------------
# 商群的分情形公式
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _log_case_table_corrections() -> None:
    logger.info(
        "case table for m < n uses corrected lines: "
        "(m=k, j=n) adds [l_i,l_0,l_k]; (m=k, i=j=n) adds [l_0,l_0,l_k]; "
        "(m=i, j,k != n) reads [l_j,l_k,l_i]; (m=i, k=n) adds [l_j,l_0,l_i]"
    )


def _case_value(m: int, i: int, j: int, k: int, n: int, rho) -> int:
    if m < n:
        if m == k and m != i:
            if i != n and j != n:
                return rho(i, j, k)
            if i == n and j != n:
                return rho(i, j, k) ^ rho(0, j, k)
            if i != n and j == n:
                return rho(i, j, k) ^ rho(i, 0, k)
            return rho(i, j, k) ^ rho(0, 0, k)
        if m == i and m != k:
            if j != n and k != n:
                return rho(j, k, i)
            if k == n and j != n:
                return rho(j, k, i) ^ rho(j, 0, i)
            if j == n and k != n:
                return rho(j, k, i) ^ rho(0, k, i)
            return rho(j, k, i) ^ rho(0, 0, i)
        return 0
    # m == n
    if k == n and i != n:
        if j != n:
            return rho(i, j, n)
        return rho(i, j, n) ^ rho(i, 0, n)
    if i == n and k != n:
        if j != n:
            return rho(j, k, n)
        return rho(j, k, n) ^ rho(0, k, n)
    return 0


def gst_case_table_tensor(S: PrimeSet, q: int, engine: RedeiEngine | None = None) -> MasseyTensor:
    """按分情形公式直接由符号写出 G_S^T(2) 的迹张量（与膨胀结果互相校验）。"""

    engine = engine or redei_engine
    presentation = gst_presentation_data(S, q)
    base = presentation.base
    n, l = base.n, base.primes
    pairs = [(l[a], l[b]) for a, b in combinations(range(n + 1), 2)]
    warnings = _ensure_pairs(pairs, engine)
    _log_case_table_corrections()

    consulted: set[Triple] = set()

    def rho(a: int, b: int, c: int) -> int:
        triple = (l[a], l[b], l[c])
        consulted.add(tuple(sorted(triple)))  # type: ignore[arg-type]
        return int(engine.symbol(*triple) == -1)

    data = np.zeros((n, n, n, n), dtype=np.uint8)
    for m, i, j, k in product(range(1, n + 1), repeat=4):
        data[m - 1, i - 1, j - 1, k - 1] = _case_value(m, i, j, k, n, rho)
    return MasseyTensor(data, tuple(range(1, n + 1)), tuple(sorted(consulted)), warnings)


# ---------------------------------------------------------------------------
# 温和性判据
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """H¹ = U ⊕ V（基向量为位集）与参数 e。"""

    U: tuple[int, ...]
    V: tuple[int, ...]
    e: int

    def check(self, g: int) -> None:
        if self.e not in (1, 2):
            raise DomainError(f"e={self.e} 必须是 1 或 2")
        vectors = [*self.U, *self.V]
        if any(v <= 0 or v >> g for v in vectors):
            raise DomainError(f"基向量必须是 F₂^{g} 中的非零向量")
        if len(vectors) != g or gf2_rank(vectors) != g:
            raise DomainError(f"U 与 V 的基合起来不是 F₂^{g} 的基，不构成直和分解")

    @classmethod
    def from_labels(
        cls, U: Sequence[Sequence[int]], V: Sequence[Sequence[int]], e: int, gen_labels: Sequence[int]
    ) -> Decomposition:
        """每个基向量给成特征标下标的列表（表示它们的和）。"""

        labels = list(gen_labels)

        def to_bits(vector: Sequence[int]) -> int:
            bits = 0
            for label in vector:
                if label not in labels:
                    raise DomainError(f"特征标下标 {label} 不在 {labels} 中")
                bits ^= 1 << labels.index(label)
            return bits

        return cls(tuple(to_bits(v) for v in U), tuple(to_bits(v) for v in V), e)

    def coordinates(self, g: int) -> tuple[list[list[int]], list[list[int]]]:
        return (
            [bits_to_vector(v, g).tolist() for v in self.U],
            [bits_to_vector(v, g).tolist() for v in self.V],
        )


@dataclass(frozen=True)
class MildCertificate:
    ok: bool
    condition_a: bool
    condition_b: bool
    decomposition: Decomposition
    witness: tuple[tuple[int, int, int], ...] = ()
    diagnostic: str = ""

    def __bool__(self) -> bool:
        return self.ok


def mild_certificate(tensor: MasseyTensor, decomposition: Decomposition) -> MildCertificate:
    """在基三元组上检查判据的条件 (a) 与 (b)。"""

    g, n, e = tensor.g, tensor.n, decomposition.e
    decomposition.check(g)
    if tensor.shuffle_violations():
        raise DomainError("张量不满足 shuffle 关系，不能用于温和性判据")

    tagged = [(u, False) for u in decomposition.U] + [(v, True) for v in decomposition.V]
    for triple in product(tagged, repeat=3):
        if sum(in_v for _, in_v in triple) >= 3 - e + 1:
            u, v, w = (vec for vec, _ in triple)
            if tensor.trace_vector(u, v, w):
                return MildCertificate(
                    False, False, False, decomposition, diagnostic=f"条件 (a) 不成立: 三元组 {(u, v, w)} 的迹非零"
                )

    slots = [decomposition.U] * e + [decomposition.V] * (3 - e)
    pivots: dict[int, int] = {}
    witness: list[tuple[int, int, int]] = []
    for u, v, w in product(*slots):
        trace = tensor.trace_vector(u, v, w)
        reduced = trace
        while reduced:
            lead = reduced.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = reduced
                witness.append((u, v, w))
                break
            reduced ^= pivots[lead]
        if len(pivots) == n:
            break
    if len(pivots) < n:
        return MildCertificate(
            False, True, False, decomposition, diagnostic=f"条件 (b) 不成立: 像的秩 {len(pivots)} < {n}"
        )
    return MildCertificate(True, True, True, decomposition, tuple(witness))


def subspaces(g: int, k: int) -> Iterator[tuple[int, ...]]:
    """F₂^g 的全部 k 维子空间，以行简化阶梯形的基给出（每个子空间恰好一次）。"""

    for pivots in combinations(range(g), k):
        pivot_set = set(pivots)
        free = [[c for c in range(p) if c not in pivot_set] for p in pivots]
        for choice in product(*[product((0, 1), repeat=len(cols)) for cols in free]):
            rows = []
            for p, cols, bits in zip(pivots, free, choice):
                row = 1 << p
                for c, b in zip(cols, bits):
                    if b:
                        row |= 1 << c
                rows.append(row)
            yield tuple(rows)


def _decompositions(g: int) -> Iterator[Decomposition]:
    for dim_u in range(1, g):
        for U in subspaces(g, dim_u):
            for V in subspaces(g, g - dim_u):
                if gf2_rank([*U, *V]) != g:
                    continue
                for e in (1, 2):
                    yield Decomposition(U, V, e)


def mild_search(tensor: MasseyTensor, progress: bool = False) -> MildCertificate | None:
    """穷举所有直和分解与 e ∈ {1, 2}，返回第一个通过判据的证书。"""

    g = tensor.g
    if g > default_settings.mild_search_max_dim:
        raise CapacityError(f"特征标空间维数 {g} 超过穷举上限 {default_settings.mild_search_max_dim}")
    if tensor.is_zero():
        return None
    for decomposition in tqdm(_decompositions(g), desc="decompositions", disable=not progress, leave=False):
        certificate = mild_certificate(tensor, decomposition)
        if certificate:
            logger.debug("mild certificate found: U=%s V=%s e=%d", decomposition.U, decomposition.V, decomposition.e)
            return certificate
    return None
