"""CLI 输出与缓存文件的数据模型。"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, field_validator


class CacheLine(BaseModel):
    """符号缓存文件中的一行。"""

    triple: list[int] = Field(..., min_length=3, max_length=3)
    value: Literal[-1, 1]

    @field_validator("triple")
    @classmethod
    def _positive(cls, value: list[int]) -> list[int]:
        if any(v < 2 for v in value):
            raise ValueError("三元组的分量必须是素数")
        return value


class SymbolRecord(BaseModel):
    """一次 Rédei 符号查询的结果。"""

    triple: list[int] = Field(..., min_length=3, max_length=3)
    value: Literal[-1, 1]
    provenance: str | None = None


class TensorEntry(BaseModel):
    """迹张量的一个非零项 tr_{r_m}⟨χ_i, χ_j, χ_k⟩ = 1。"""

    m: int = Field(..., ge=1)
    i: int = Field(..., ge=0)
    j: int = Field(..., ge=0)
    k: int = Field(..., ge=0)


class WitnessModel(BaseModel):
    """温和性判据的分解 H¹ = U ⊕ V 与参数 e；向量按生成元顺序给出 0/1 分量。"""

    U: list[list[int]]
    V: list[list[int]]
    e: int = Field(..., ge=1, le=2)
    triples: list[list[list[int]]] = Field(default_factory=list)


class CertificateReport(BaseModel):
    """`certify` 的完整报告。"""

    set: list[int]
    q: int | None = None
    ordering: list[int] = Field(default_factory=list)
    admissible: bool
    diagnostics: list[str] = Field(default_factory=list)
    symbols: list[SymbolRecord] = Field(default_factory=list)
    tensor: list[TensorEntry] = Field(default_factory=list)
    z_lower_bound: int | None = None
    mild: bool = False
    witness: WitnessModel | None = None
    total_realness_warnings: list[str] = Field(default_factory=list)
    timing_ms: int = Field(default=0, ge=0)


class CrossCheckReport(BaseModel):
    """`symbol --cross-check` 的报告。"""

    triple: list[int] = Field(..., min_length=3, max_length=3)
    value: Literal[-1, 1]
    permutations: dict[str, int] = Field(default_factory=dict)
    permutations_agree: bool
    choice_values: list[int] = Field(default_factory=list)
    choices_agree: bool
    quartic_oracle: int | None = None
    oracle_agrees: bool


class SearchResult(BaseModel):
    """`search` 输出流中的一行。"""

    index: int = Field(..., ge=0)
    set: list[int]
    q: int | None = None


class VerifyItem(BaseModel):
    """已知算例校验中的一项。"""

    example: str
    check: str
    passed: bool
    detail: str = ""


class VerifyReport(BaseModel):
    """`verify-examples` 的汇总。"""

    passed: bool
    items: list[VerifyItem] = Field(default_factory=list)

    @property
    def first_failure(self) -> VerifyItem | None:
        return next((item for item in self.items if not item.passed), None)
