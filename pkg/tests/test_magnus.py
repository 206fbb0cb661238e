from itertools import product

import numpy as np
import pytest
from sympy import Integer, Pow, expand as sympy_expand, symbols

from apps.redei_mild.errors import CapacityError, DomainError, InconsistencyError, TruncationError
from apps.redei_mild.magnus import (
    GroupWord,
    TruncatedSeries,
    basic_commutator,
    basic_triples,
    bracket_support,
    commutator,
    epsilon,
    expand,
    express_mod_F4,
    express_word_mod_F4,
    filtration_degree,
    format_filtration,
    format_word,
    inverse_word,
    letter,
    power,
    tensor_roundtrip,
)
from apps.redei_mild.massey import MasseyTensor
from apps.redei_mild.verify import GST_17_RELATORS, GST_17_SUPPORT

ALL_WORDS_4 = frozenset(product((0, 1), repeat=4))


def _random_word(rng, d: int, depth: int = 1) -> GroupWord:
    word = GroupWord()
    for _ in range(rng.randint(1, 4)):
        if depth and rng.random() < 0.3:
            word = word * commutator(_random_word(rng, d, depth - 1), _random_word(rng, d, depth - 1))
        else:
            word = word * letter(rng.randrange(d), rng.choice([-3, -2, -1, 1, 2, 3, 4, 5]))
    return word


def test_square_and_fourth_power():
    assert expand(letter(0, 2), 1, 4).terms == frozenset({(), (0, 0)})
    assert expand(letter(0, 4), 1, 4).terms == frozenset({(), (0, 0, 0, 0)})
    assert expand(letter(0, 3), 1, 4).terms == frozenset({(), (0,), (0, 0), (0, 0, 0)})


def test_negative_powers():
    assert expand(letter(0, -1), 1, 4).terms == frozenset({(0,) * k for k in range(5)})
    assert expand(letter(0, -2), 1, 4).terms == frozenset({(), (0, 0), (0, 0, 0, 0)})


def test_fourth_power_of_product():
    w = (letter(1) * letter(0)) ** 4
    assert expand(w, 2, 4).terms == frozenset({()}) | ALL_WORDS_4


def _sympy_series(word_expr, X, D):
    coefficients = sympy_expand(word_expr).as_coefficients_dict()
    terms = set()
    for term, coeff in coefficients.items():
        if term == 1:
            mono = ()
        else:
            mono = []
            for f in term.args if term.is_Mul else (term,):
                if isinstance(f, Pow):
                    mono.extend([X.index(f.base)] * int(f.exp))
                else:
                    mono.append(X.index(f))
            mono = tuple(mono)
        if len(mono) <= D and int(coeff) % 2:
            terms.add(mono)
    return frozenset(terms)


def test_commutator_against_noncommutative_algebra():
    D = 4
    X = list(symbols("X0:3", commutative=False))

    def inv(y):
        return sum((Integer(-1) ** k * y**k for k in range(D + 1)), Integer(0))

    x1, x2 = 1 + X[1], 1 + X[2]
    expected = _sympy_series(inv(X[1]) * inv(X[2]) * x1 * x2, X, D)
    assert expand(commutator(letter(1), letter(2)), 3, D).terms == expected


def test_epsilon():
    assert epsilon(letter(0, 2), (0, 0)) == 1
    assert epsilon(letter(0, 2), (0,)) == 0
    c = commutator(letter(1), letter(2))
    assert epsilon(c, (1, 2)) == epsilon(c, (2, 1)) == 1
    with pytest.raises(TruncationError):
        epsilon(c, (1, 2, 1, 2, 1), D=4)
    with pytest.raises(TruncationError):
        expand(c, 3, 2).coefficient((1, 2, 1))


def test_filtration_degrees():
    assert filtration_degree(letter(1, 312), D=4) is None
    assert format_filtration(filtration_degree(letter(1, 312), D=4), 4) == "> 4"
    assert filtration_degree(letter(1, 4), D=4) == 4
    assert filtration_degree(letter(1, 6), D=4) == 2
    assert filtration_degree(commutator(letter(0), letter(1))) == 2
    assert filtration_degree(basic_commutator(0, 1, 0)) == 3
    assert filtration_degree(GroupWord()) is None
    assert format_filtration(3, 4) == "3"


def test_degree_limits():
    with pytest.raises(CapacityError):
        expand(letter(0), 1, 7)
    with pytest.raises(DomainError):
        expand(letter(0), 1, 0)
    with pytest.raises(DomainError):
        expand(letter(3), 2, 3)


def test_series_ring_mismatch():
    with pytest.raises(DomainError):
        TruncatedSeries.one(2, 3) * TruncatedSeries.one(2, 4)
    with pytest.raises(DomainError):
        TruncatedSeries(1, 3, frozenset({(0,)})).inverse()


def test_word_algebra():
    w = letter(0, 2) * letter(0, -2)
    assert w.is_identity()
    assert format_word(letter(1) * letter(1)) == "x1^2"
    assert format_word(~(letter(0) * letter(1))) == "x1^-1·x0^-1"
    assert format_word(commutator(letter(1), letter(3)) ** 2) == "[x1, x3]^2"
    assert format_word((letter(0) * letter(1)) ** 3) == "(x0·x1)^3"
    assert (letter(0) * commutator(letter(0), letter(2))).generators() == {0, 2}
    with pytest.raises(DomainError):
        letter(0, 0)


def test_substitute():
    w = letter(1, 4) * commutator(letter(1), letter(0))
    assert format_word(w.substitute({0: letter(3)})) == "x1^4·[x1, x3]"


def test_expansion_is_multiplicative(rng):
    d, D = 3, 4
    for _ in range(200):
        u, v = _random_word(rng, d), _random_word(rng, d)
        assert expand(u * v, d, D) == expand(u, d, D) * expand(v, d, D)
        assert expand(~u, d, D) * expand(u, d, D) == TruncatedSeries.one(d, D)


def test_inverse_and_power_builders(rng):
    d, D = 3, 4
    one = TruncatedSeries.one(d, D)
    for _ in range(100):
        w = _random_word(rng, d)
        series = expand(w, d, D)
        assert expand(inverse_word(w), d, D) * series == one
        for n in (-2, 0, 1, 3):
            assert expand(power(w, n), d, D) == series.power(n)
    assert power(letter(0), 4) == letter(0, 4)
    assert inverse_word(letter(1) * letter(2)) == letter(2, -1) * letter(1, -1)


def test_commutators_raise_filtration(rng):
    d, D = 3, 4
    for _ in range(200):
        u = commutator(letter(rng.randrange(d)), letter(rng.randrange(d)))
        v = letter(rng.randrange(d), rng.choice([-1, 1, 3]))
        low = filtration_degree(commutator(u, v), D, d)
        assert low is None or low >= 3
        low = filtration_degree(commutator(u, u * v), D, d)
        assert low is None or low >= 3
        w = commutator(letter(rng.randrange(d)), letter(rng.randrange(d)))
        low = filtration_degree(commutator(u, w), D, d)
        assert low is None or low >= 4


@pytest.mark.parametrize("g", [1, 2, 3, 4, 5])
def test_basic_triple_count(g):
    triples = basic_triples(g)
    assert len(triples) == (g**3 - g) // 3
    assert triples == sorted(triples)
    assert all(a < b and c <= b for a, b, c in triples)


def test_bracket_support_matches_expansion():
    g = 3
    for a, b, c in basic_triples(g):
        bits = bracket_support(a, b, c, g)
        support = {(p // (g * g), p // g % g, p % g) for p in range(g**3) if bits >> p & 1}
        table = expand(basic_commutator(a, b, c), g, 3).degree3_table()
        assert support == {tuple(int(t) for t in idx) for idx in zip(*np.nonzero(table))}


def test_express_zero_table():
    assert express_mod_F4(np.zeros((3, 3, 3), dtype=np.uint8)).is_identity()


def test_express_rejects_non_lie_table():
    table = np.zeros((3, 3, 3), dtype=np.uint8)
    table[0, 1, 2] = 1
    with pytest.raises(InconsistencyError):
        express_mod_F4(table)


def test_express_shape_checks():
    with pytest.raises(DomainError):
        express_mod_F4(np.zeros((2, 3, 3)))
    with pytest.raises(DomainError):
        express_mod_F4(np.zeros((2, 2, 2)), labels=[1, 2, 3])


def test_express_random_round_trip(rng):
    g = 3
    basis = basic_triples(g)
    for _ in range(100):
        chosen = sorted(rng.sample(basis, rng.randint(0, len(basis))))
        word = GroupWord()
        for triple in rng.sample(chosen, len(chosen)):
            word = word * basic_commutator(*triple)
        table = expand(word, g, 3).degree3_table()
        rebuilt = express_mod_F4(table)
        expected = GroupWord()
        for triple in chosen:
            expected = expected * basic_commutator(*triple)
        assert format_word(rebuilt) == format_word(expected)
        assert np.array_equal(expand(rebuilt, g, 3).degree3_table(), table)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_express_relator_supports(m):
    table = np.zeros((3, 3, 3), dtype=np.uint8)
    for i, j, k in GST_17_SUPPORT[m]:
        table[i - 1, j - 1, k - 1] = 1
    assert format_word(express_mod_F4(table, [1, 2, 3])) == GST_17_RELATORS[m]


def test_express_word_outside_F3():
    with pytest.raises(DomainError):
        express_word_mod_F4(commutator(letter(0), letter(1)), 2)
    w = basic_commutator(0, 1, 1) * letter(0, 8)
    assert format_word(express_word_mod_F4(w, 2)) == "[[x0, x1], x1]"


def test_roundtrip_on_zero_tensor():
    assert tensor_roundtrip(MasseyTensor.zeros(2, (0, 1, 2)), 1)


def test_roundtrip_on_corrupted_tensor():
    data = np.zeros((1, 3, 3, 3), dtype=np.uint8)
    data[0, 0, 1, 2] = 1
    tensor = MasseyTensor(data, (0, 1, 2), checked=False)
    with pytest.raises(InconsistencyError):
        tensor_roundtrip(tensor, 1)
