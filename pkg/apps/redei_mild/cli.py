"""命令行入口。

用法:
    python -m apps.redei_mild symbol 313 457 521 --cross-check
    python -m apps.redei_mild certify 2,313,457,521 --json
    python -m apps.redei_mild certify 2,17,7489,15809 --decomposed 5 --total-realness warn
    python -m apps.redei_mild search --count 3 --mod16 9 --max 600
    python -m apps.redei_mild verify-examples --only zero-113

退出码: 0 成功，1 校验失败或没有找到证书，2 输入非法，3 容量或搜索上限耗尽。
"""

from __future__ import annotations

import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from itertools import combinations
import logging
from pathlib import Path
import sys
import time
from typing import Iterator, Sequence

from tqdm import tqdm

from logger import logger, set_console_level

from .config import TOTAL_REALNESS_POLICIES, Settings, settings as default_settings
from .errors import DomainError, RedeiError, VerificationError
from .massey import (
    Decomposition,
    MildCertificate,
    bits_to_vector,
    build_tensor,
    inflate_tensor,
    mild_certificate,
    mild_search,
    z_lower_bound,
)
from .modarith import iter_primes, legendre
from .presentation import PrimeSet, gst_admissible, gst_presentation_data, zassenhaus_ge3
from .redei import RedeiEngine, admissible
from .schemas import (
    CertificateReport,
    CrossCheckReport,
    SearchResult,
    SymbolRecord,
    TensorEntry,
    WitnessModel,
)
from .verify import parse_only, verify_examples


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------


def _set_diagnostics(S: PrimeSet) -> list[str]:
    problems = [f"{l} ≢ 1 mod 8" for l in S.odd_primes if l % 8 != 1]
    for idx, p in enumerate(S.odd_primes):
        for q in S.odd_primes[idx + 1:]:
            if legendre(p, q) != 1:
                problems.append(f"({p}/{q}) = -1")
    return problems


def parse_witness(text: str, e: int, gen_labels: Sequence[int]) -> Decomposition:
    """"1/2,3" 表示 U = ⟨χ_1⟩、V = ⟨χ_2, χ_3⟩；基向量之间用逗号，和用加号（如 0+3）。"""

    try:
        u_text, v_text = text.split("/")
        U = [[int(t) for t in vec.split("+")] for vec in u_text.split(",") if vec]
        V = [[int(t) for t in vec.split("+")] for vec in v_text.split(",") if vec]
    except ValueError as exc:
        raise DomainError(f"无法解析分解 {text!r}，格式为 U/V，例如 1/2,3") from exc
    return Decomposition.from_labels(U, V, e, gen_labels)


def _witness_model(certificate: MildCertificate, g: int) -> WitnessModel:
    U, V = certificate.decomposition.coordinates(g)
    triples = [[bits_to_vector(vec, g).tolist() for vec in triple] for triple in certificate.witness]
    return WitnessModel(U=U, V=V, e=certificate.decomposition.e, triples=triples)


def certify(
    S: PrimeSet,
    q: int | None,
    engine: RedeiEngine,
    witness: str | None = None,
    e: int = 1,
    progress: bool = False,
) -> CertificateReport:
    """z ≥ 3 判据 → 迹张量（给定 q 时膨胀到商群）→ 温和性证书。"""

    started = time.perf_counter()
    report = CertificateReport(set=list(S.primes), q=q, admissible=False)
    if not zassenhaus_ge3(S):
        report.diagnostics = _set_diagnostics(S)
        return report

    if q is None:
        tensor = build_tensor(S, engine)
        report.ordering = list(S.primes)
    else:
        verdict = gst_admissible(S, q)
        if not verdict:
            report.diagnostics = [verdict.diagnostic]
            return report
        presentation = gst_presentation_data(S, q)
        if not presentation.relators_in_F3():
            raise RedeiError(f"商群关系子不在 F_(3) 中: {[str(r) for r in presentation.relators]}")
        report.ordering = list(presentation.base.primes)
        tensor = inflate_tensor(build_tensor(presentation.base, engine), presentation)
    report.admissible = True
    report.total_realness_warnings = list(tensor.warnings)
    report.z_lower_bound = z_lower_bound(tensor)

    for triple in tensor.consulted:
        evaluation = engine.evaluation(*triple)
        if evaluation.value != engine.symbol(*triple):
            raise RedeiError(f"符号 {triple} 的报告值与缓存值不一致")
        report.symbols.append(SymbolRecord(triple=list(triple), value=evaluation.value, provenance=evaluation.provenance))
    report.tensor = [TensorEntry(m=m, i=i, j=j, k=k) for m, i, j, k in tensor.nonzero()]

    if witness:
        certificate: MildCertificate | None = mild_certificate(tensor, parse_witness(witness, e, tensor.gen_labels))
        if certificate is not None and not certificate.ok:
            report.diagnostics.append(certificate.diagnostic)
            certificate = None
    else:
        certificate = mild_search(tensor, progress=progress)
    if certificate is not None:
        report.mild = True
        report.witness = _witness_model(certificate, tensor.g)
    report.timing_ms = int((time.perf_counter() - started) * 1000)
    return report


def _print_certificate(report: CertificateReport) -> None:
    print(f"S = {report.set}" if report.q is None else f"S = {report.set}, q = {report.q}")
    if not report.admissible:
        print("admissible: no")
        for line in report.diagnostics:
            print(f"  {line}")
        return
    print(f"ordering: {report.ordering}")
    print(f"z >= {report.z_lower_bound}")
    for warning in report.total_realness_warnings:
        print(f"warning: {warning}")
    print(f"symbols ({len(report.symbols)}):")
    for record in report.symbols:
        print(f"  {record.triple}  {record.value:+d}  {record.provenance}")
    print(f"tensor: {len(report.tensor)} nonzero entries")
    for entry in report.tensor:
        print(f"  tr_r{entry.m}<chi{entry.i}, chi{entry.j}, chi{entry.k}> = 1")
    if report.mild and report.witness is not None:
        print(f"mild: yes (U={report.witness.U}, V={report.witness.V}, e={report.witness.e})")
    else:
        print("mild: no certificate found")
    print(f"time: {report.timing_ms} ms")


def cmd_certify(args: argparse.Namespace, engine: RedeiEngine) -> int:
    S = PrimeSet.parse(args.primes)
    report = certify(S, args.decomposed, engine, args.witness, args.e, progress=not args.quiet)
    if args.json:
        print(report.model_dump_json())
    else:
        _print_certificate(report)
    if not report.admissible:
        return DomainError.exit_code
    return 0 if report.mild else 1


# ---------------------------------------------------------------------------
# symbol
# ---------------------------------------------------------------------------


def cmd_symbol(args: argparse.Namespace, engine: RedeiEngine) -> int:
    a, b, c = args.a, args.b, args.c
    verdict = admissible(a, b, c)
    if not verdict:
        raise DomainError(f"[{a}, {b}, {c}] 不可容许: {verdict.diagnostic}")
    evaluation = engine.evaluation(a, b, c)
    if not args.cross_check:
        if args.json:
            record = SymbolRecord(triple=[a, b, c], value=evaluation.value, provenance=evaluation.provenance)
            print(record.model_dump_json())
        else:
            print(evaluation.value)
        return 0

    check = engine.cross_check(a, b, c)
    if args.json:
        report = CrossCheckReport(
            triple=[a, b, c],
            value=check.value,
            permutations={",".join(map(str, perm)): value for perm, value in check.permutations.items()},
            permutations_agree=check.permutations_agree,
            choice_values=check.choice_values,
            choices_agree=check.choices_agree,
            quartic_oracle=check.quartic_oracle,
            oracle_agrees=check.oracle_agrees,
        )
        print(report.model_dump_json())
    else:
        agree = sum(v == check.value for v in check.permutations.values())
        print(check.value)
        print(f"permutations: {agree}/{len(check.permutations)} agree")
        print(f"choices: {sum(v == check.value for v in check.choice_values)}/{len(check.choice_values)} agree")
        if check.quartic_oracle is not None:
            print(f"quartic oracle: {check.quartic_oracle} ({'agrees' if check.oracle_agrees else 'DISAGREES'})")
    return 0 if check.ok else 1


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------


def _companion_q(primes: tuple[int, ...], q_limit: int) -> int | None:
    S = PrimeSet(primes)
    for q in iter_primes(q_limit, 5, 8):
        if q not in primes and gst_admissible(S, q):
            return q
    return None


def _check_candidate(primes: tuple[int, ...], companion: bool, q_limit: int) -> tuple[bool, int | None]:
    for idx, p in enumerate(primes):
        for q in primes[idx + 1:]:
            if legendre(p, q) != 1:
                return False, None
    if not companion:
        return True, None
    q = _companion_q(primes, q_limit)
    return q is not None, q


def search_sets(
    count: int,
    residue: int,
    limit: int,
    companion: bool = False,
    q_limit: int = 1000,
    workers: int = 1,
    progress: bool = False,
) -> Iterator[SearchResult]:
    """按候选下标顺序产出 l_i ≡ residue mod 16、两两 Legendre 符号为 1 的 count 元组。"""

    if count < 1:
        raise DomainError(f"--count 必须 ≥ 1，收到 {count}")
    if residue not in (1, 9):
        raise DomainError(f"--mod16 只能是 1 或 9，收到 {residue}")
    primes = list(iter_primes(limit, residue, 16))
    candidates = list(combinations(primes, count))
    logger.info("search: %d primes, %d candidate sets", len(primes), len(candidates))

    def work(candidate: tuple[int, ...]) -> tuple[bool, int | None]:
        return _check_candidate(candidate, companion, q_limit)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = pool.map(work, candidates)
        for index, (candidate, (ok, q)) in enumerate(
            tqdm(zip(candidates, results), total=len(candidates), desc="search", disable=not progress, leave=False)
        ):
            if ok:
                yield SearchResult(index=index, set=[2, *candidate], q=q)


def cmd_search(args: argparse.Namespace, engine: RedeiEngine) -> int:
    companion = args.decomposed_mod8 is not None
    for result in search_sets(
        args.count,
        args.mod16,
        args.max,
        companion=companion,
        q_limit=args.q_max,
        workers=args.workers or engine.settings.search_workers,
        progress=not args.quiet,
    ):
        print(result.model_dump_json(), flush=True)
    return 0


# ---------------------------------------------------------------------------
# verify-examples
# ---------------------------------------------------------------------------


def cmd_verify_examples(args: argparse.Namespace, engine: RedeiEngine) -> int:
    report = verify_examples(engine, parse_only(args.only))
    if args.json:
        print(report.model_dump_json())
    else:
        for item in report.items:
            status = "PASS" if item.passed else "FAIL"
            detail = f"  {item.detail}" if item.detail else ""
            print(f"{status}  {item.example}/{item.check}{detail}")
        failure = report.first_failure
        if failure is not None:
            print(f"first divergence: {failure.example}/{failure.check}: {failure.detail}")
        print("all examples passed" if report.passed else "verification failed")
    failure = report.first_failure
    if failure is not None:
        raise VerificationError(f"{failure.example}/{failure.check}: {failure.detail}")
    return 0


# ---------------------------------------------------------------------------
# 入口
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="以 JSON 输出结果")
    common.add_argument("--bound-cap", type=int, default=None, help="三元方程搜索放大因子 C 的上限")
    common.add_argument("--total-realness", choices=TOTAL_REALNESS_POLICIES, default=None, help="全实性策略")
    common.add_argument("--cache", type=Path, default=None, help="符号缓存文件（JSON lines）")
    common.add_argument("--verbose", action="store_true", help="控制台输出 DEBUG 日志")
    common.add_argument("--quiet", action="store_true", help="关闭进度条，控制台只输出错误")

    parser = argparse.ArgumentParser(prog="redei-mild", description="Rédei 符号、三重 Massey 积与温和性证书")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("symbol", parents=[common], help="计算 Rédei 符号 [a, b, c]")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("c", type=int)
    p.add_argument("--cross-check", action="store_true", help="排列、证书选择与四次剩余交叉检验")
    p.set_defaults(handler=cmd_symbol)

    p = sub.add_parser(
        "certify",
        parents=[common],
        help="计算迹张量并寻找温和性证书",
        epilog="例: certify 2,17,7489,15809 --decomposed 5 --total-realness warn（(2, 17) 没有构造性全实见证）",
    )
    p.add_argument("primes", help="逗号分隔的素数集合，例如 2,313,457,521")
    p.add_argument(
        "--decomposed",
        type=int,
        default=None,
        metavar="Q",
        help="商群 G_S^T(2) 的分解素数 q；含 2 的素数对可能没有构造性全实见证，strict 策略下退出码为 3，可加 --total-realness warn",
    )
    p.add_argument("--witness", default=None, metavar="U/V", help="只检验给定分解，例如 1/2,3")
    p.add_argument("--e", type=int, choices=(1, 2), default=1, help="判据中的 e")
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("search", parents=[common], help="搜索可容许的素数集合")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--mod16", type=int, choices=(1, 9), required=True)
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--decomposed-mod8", type=int, choices=(5,), default=None, help="同时寻找 q ≡ 5 mod 8 的分解素数")
    p.add_argument("--q-max", type=int, default=1000, help="分解素数 q 的搜索上限")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(handler=cmd_search)

    p = sub.add_parser("verify-examples", parents=[common], help="校验已知算例")
    p.add_argument("--only", default=None, help="逗号分隔的算例 ID: redei-313, zero-113, gst-17")
    p.set_defaults(handler=cmd_verify_examples)
    return parser


def _settings_for(args: argparse.Namespace) -> Settings:
    overrides = {}
    if args.bound_cap is not None:
        if args.bound_cap < 1:
            raise DomainError(f"--bound-cap 必须 ≥ 1，收到 {args.bound_cap}")
        overrides["solver_bound_cap"] = args.bound_cap
    if args.total_realness is not None:
        overrides["total_realness_policy"] = args.total_realness
    if getattr(args, "workers", None):
        overrides["search_workers"] = args.workers
    return replace(default_settings, **overrides) if overrides else default_settings


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        set_console_level(logging.DEBUG)
    elif args.quiet:
        set_console_level(logging.ERROR)

    try:
        engine = RedeiEngine(_settings_for(args))
        if args.cache is not None:
            engine.load_cache(args.cache)
        code = args.handler(args, engine)
        if args.cache is not None:
            saved = engine.save_cache(args.cache)
            logger.info("saved %d symbols to %s", saved, args.cache)
        return code
    except RedeiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
