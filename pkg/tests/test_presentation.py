import numpy as np
import pytest
from sympy import isprime
from sympy.ntheory import legendre_symbol

from apps.redei_mild.errors import DomainError
from apps.redei_mild.magnus import format_word
from apps.redei_mild.presentation import (
    PrimeSet,
    gst_admissible,
    gst_presentation_data,
    koch_relators,
    linking_data,
    ranks,
    zassenhaus_ge3,
    zassenhaus_ge3_via_relators,
)

from conftest import EXAMPLE_SET, GST_SET, ZERO_SET


def test_prime_set_parse_drops_two():
    S = PrimeSet.parse("2, 313,457,521")
    assert S.odd_primes == EXAMPLE_SET
    assert S.primes == (2, 313, 457, 521)
    assert S.n == 3
    assert S.prime(2) == 457


@pytest.mark.parametrize("odd", [(), (313, 313), (9,), (313, 15)])
def test_prime_set_validation(odd):
    with pytest.raises(DomainError):
        PrimeSet(odd)


def test_prime_set_parse_garbage():
    with pytest.raises(DomainError):
        PrimeSet.parse("2,abc")


def test_linking_data_two_primes():
    data = linking_data(PrimeSet((3, 5)))
    assert data.a_i0.tolist() == [0, 1, 1]
    assert data.atilde_i0.tolist() == [0, 1, 0]
    assert data.aprime.tolist() == [[0, 0, 0], [1, 0, 1], [1, 1, 0]]
    assert not data.is_trivial()


def test_linking_data_trivial_for_example():
    assert linking_data(PrimeSet(EXAMPLE_SET)).is_trivial()


@pytest.mark.parametrize(
    "odd, expected",
    [
        ((5,), ["x1^4·[x1, x0]"]),
        ((7,), ["x1^6"]),
        ((3,), ["x1^2·[x1, x0]"]),
        ((3, 5), ["x1^2·[x1, x0]·[x1, x2]", "x2^4·[x2, x0]·[x2, x1]"]),
        ((7, 3), ["x1^6·[x1, x2]", "x2^2·[x2, x0]"]),
        (EXAMPLE_SET, ["x1^312", "x2^456", "x3^520"]),
    ],
)
def test_koch_relators(odd, expected):
    assert [format_word(r) for r in koch_relators(PrimeSet(odd))] == expected


@pytest.mark.parametrize(
    "odd, expected",
    [(EXAMPLE_SET, True), (ZERO_SET, True), (GST_SET, True), ((17,), True), ((41,), True), ((5,), False), ((313, 17), False)],
)
def test_zassenhaus_examples(odd, expected):
    assert zassenhaus_ge3(PrimeSet(odd)) is expected


def test_zassenhaus_random_agreement(rng):
    odd_primes = [p for p in range(3, 700) if isprime(p)]
    one_mod_8 = [p for p in odd_primes if p % 8 == 1]
    for _ in range(200):
        pool = one_mod_8 if rng.random() < 0.7 else odd_primes
        odd = tuple(rng.sample(pool, rng.randint(1, 3)))
        S = PrimeSet(odd)
        expected = all(p % 8 == 1 for p in odd) and all(
            legendre_symbol(p, q) == 1 for i, p in enumerate(odd) for q in odd[i + 1:]
        )
        assert zassenhaus_ge3_via_relators(S) is expected, odd
        assert zassenhaus_ge3(S) is expected


def test_ranks():
    assert ranks(PrimeSet(EXAMPLE_SET)) == (4, 3)
    assert ranks(PrimeSet((17,))) == (2, 1)


def test_gst_admissible_reorders():
    verdict = gst_admissible(PrimeSet(GST_SET), 5)
    assert verdict.ok
    assert verdict.ordering == (7489, 15809, 17)
    assert verdict.designated == 17


def test_gst_admissible_other_example():
    verdict = gst_admissible(PrimeSet(EXAMPLE_SET), 13)
    assert verdict.ordering == (313, 521, 457)


@pytest.mark.parametrize(
    "odd, q",
    [(GST_SET, 17), (GST_SET, 41), (GST_SET, 4), ((5,), 13), (EXAMPLE_SET, 5 * 8 + 5), (EXAMPLE_SET, 2)],
)
def test_gst_inadmissible(odd, q):
    verdict = gst_admissible(PrimeSet(odd), q)
    assert not verdict
    assert verdict.diagnostic
    with pytest.raises(DomainError):
        gst_presentation_data(PrimeSet(odd), q)


def test_prime_set_with_q_checks_ordering():
    assert PrimeSet((313, 521, 457), 13).q == 13
    with pytest.raises(DomainError):
        PrimeSet(EXAMPLE_SET, 13)


def test_gst_presentation():
    presentation = gst_presentation_data(PrimeSet(GST_SET), 5)
    assert presentation.base.odd_primes == (7489, 15809, 17)
    assert presentation.generator_count == 3
    assert presentation.eliminated == (0, 3)
    assert presentation.inflation == {1: (1,), 2: (2,), 3: (0, 3)}
    expected = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=np.uint8)
    assert np.array_equal(presentation.inflation_matrix(), expected)
    assert [format_word(r) for r in presentation.relators] == ["x1^7488", "x2^15808", "x3^16"]
    assert presentation.relators_in_F3()
