from itertools import product

import pytest

from apps.redei_mild.errors import CapacityError, DomainError, TotalRealnessUnknownError
from apps.redei_mild.redei import (
    RedeiEngine,
    Verdict,
    admissible,
    evaluate_ordered,
    orient,
    symbol_quartic_oracle,
    totally_real,
    two_two_symbol,
)

from conftest import EXAMPLE_SET

PRIMES = (2,) + EXAMPLE_SET


@pytest.mark.parametrize("l, expected", [(313, -1), (457, -1), (521, -1), (17, 1), (113, 1), (41, -1)])
def test_two_two_symbol(l, expected):
    assert two_two_symbol(l) == expected


def test_two_two_through_engine(engine):
    assert engine.symbol(2, 2, 313) == -1
    assert engine.symbol(313, 2, 2) == -1
    assert engine.symbol(2, 17, 2) == 1


@pytest.mark.parametrize(
    "triple",
    [(5, 13, 17), (313, 313, 313), (2, 2, 2), (313, 457, 15), (17, 313, 457), (2, 2, 9)],
)
def test_inadmissible(triple, engine):
    assert not admissible(*triple)
    assert admissible(*triple).diagnostic
    with pytest.raises(DomainError):
        engine.symbol(*triple)


def test_orientation_puts_two_in_norm_slot():
    assert orient(313, 2, 457).canonical_order == (313, 2, 457)
    assert orient(2, 313, 313).canonical_order == (313, 2, 313)
    assert orient(457, 313, 313).canonical_order == (313, 313, 457)
    assert orient(2, 2, 521).kind == "two-two"


def test_permutation_symmetry(shared_engine, rng):
    ordered = [t for t in product(PRIMES, repeat=3) if len(set(t)) > 1]
    for _ in range(200):
        a, b, c = rng.choice(ordered)
        assert evaluate_ordered(a, b, c) == shared_engine.symbol(a, b, c), (a, b, c)


@pytest.mark.parametrize("l, k", [(313, 457), (457, 313), (313, 521), (521, 457)])
def test_equal_pair_matches_quartic_oracle(l, k, shared_engine):
    assert shared_engine.symbol(l, l, k) == symbol_quartic_oracle(l, k)


def test_quartic_oracle_domain():
    with pytest.raises(DomainError):
        symbol_quartic_oracle(2, 313)
    with pytest.raises(DomainError):
        symbol_quartic_oracle(13, 17)


@pytest.mark.slow
@pytest.mark.parametrize("triple", [(313, 457, 521), (2, 313, 457), (313, 313, 457), (2, 2, 521)])
def test_cross_check(triple, shared_engine):
    report = shared_engine.cross_check(*triple)
    assert report.permutations_agree, report.permutations
    assert report.choices_agree, report.choice_values
    assert report.oracle_agrees
    assert report.ok


def test_odd_pairs_are_totally_real():
    for a, b in ((313, 457), (313, 521), (457, 521)):
        assert totally_real(a, b) is Verdict.TRUE
    assert totally_real(313, 313) is Verdict.TRUE
    assert totally_real(2, 2) is Verdict.TRUE


def test_odd_pair_not_residue():
    with pytest.raises(DomainError):
        totally_real(313, 17)


def test_pair_with_two_and_seventeen_has_no_witness(engine, warn_engine):
    assert totally_real(2, 17) is not Verdict.TRUE
    with pytest.raises(TotalRealnessUnknownError):
        engine.ensure_totally_real(2, 17)
    with pytest.raises(CapacityError):
        engine.ensure_totally_real(17, 2)
    message = warn_engine.ensure_totally_real(2, 17)
    assert message and "17" in message


def test_verdicts_are_cached(engine):
    engine.totally_real(313, 457)
    assert engine._verdicts[(313, 457)] is Verdict.TRUE


def test_cache_round_trip(tmp_path, engine):
    engine.symbol(2, 2, 313)
    engine.symbol(2, 313, 313)
    engine.symbol(313, 457, 457)
    path = tmp_path / "nested" / "symbols.jsonl"
    assert engine.save_cache(path) == 3

    fresh = RedeiEngine()
    assert fresh.load_cache(path) == 3
    for triple in ((2, 2, 313), (2, 313, 313), (313, 457, 457)):
        assert fresh.evaluation(*triple).provenance == "cache"
        assert fresh.symbol(*triple) == engine.symbol(*triple)


def test_cache_skips_corrupt_lines(tmp_path):
    path = tmp_path / "symbols.jsonl"
    path.write_text(
        "\n".join(
            [
                "not json",
                '{"triple": [1, 2, 3], "value": 1}',
                '{"triple": [2, 2, 313], "value": 0}',
                '{"triple": [5, 13, 17], "value": 1}',
                '{"triple": [2, 2, 313], "value": -1}',
                "",
            ]
        ),
        encoding="utf-8",
    )
    engine = RedeiEngine()
    assert engine.load_cache(path) == 1
    assert engine.symbol(2, 2, 313) == -1


def test_missing_cache_file(tmp_path):
    assert RedeiEngine().load_cache(tmp_path / "absent.jsonl") == 0


def test_overrides_take_precedence(engine):
    engine.overrides[(2, 2, 313)] = 1
    assert engine.symbol(313, 2, 2) == 1
    assert engine.evaluation(2, 313, 2).provenance == "override"


def test_with_settings_shares_state(engine):
    engine.symbol(2, 2, 313)
    other = engine.with_settings(engine.settings)
    assert other.evaluations() == engine.evaluations()
    other.overrides[(2, 2, 17)] = -1
    assert engine.symbol(2, 2, 17) == -1


def test_minus_one_triples_use_index_triples(shared_engine):
    table = shared_engine.symbol_table((2, 313))
    assert set(table) == {(0, 0, 1), (0, 1, 1)}
    assert shared_engine.minus_one_triples((2, 313)) == {(0, 0, 1), (0, 1, 1)}
