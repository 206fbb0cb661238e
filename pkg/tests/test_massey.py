from functools import reduce
from itertools import combinations, combinations_with_replacement, product
from operator import xor

import numpy as np
import pytest

from apps.redei_mild.errors import CapacityError, DomainError, InternalContradictionError
from apps.redei_mild.massey import (
    Decomposition,
    MasseyTensor,
    _decompositions,
    build_tensor,
    gf2_rank,
    gst_case_table_tensor,
    inflate_tensor,
    mild_certificate,
    mild_search,
    subspaces,
    z_lower_bound,
)
from apps.redei_mild.modarith import iter_primes, legendre
from apps.redei_mild.presentation import PrimeSet, gst_admissible, gst_presentation_data
from apps.redei_mild.verify import REDEI_313_MINUS_ONE

from conftest import EXAMPLE_SET, GST_SET, ZERO_SET


def _random_values(primes, rng):
    return {t: rng.choice((-1, 1)) for t in combinations_with_replacement(primes, 3)}


def _gst_instances(count: int) -> list[tuple[PrimeSet, int]]:
    found = [(PrimeSet(GST_SET), 5), (PrimeSet(EXAMPLE_SET), 13)]
    candidates = list(iter_primes(400, 1, 8))
    for pair in combinations(candidates, 2):
        if len(found) >= count:
            break
        if legendre(pair[0], pair[1]) != 1:
            continue
        for q in (5, 13, 29, 37, 53):
            S = PrimeSet(pair)
            if gst_admissible(S, q):
                found.append((S, q))
                break
    assert len(found) >= count
    return found[:count]


def test_built_tensor_satisfies_shuffle_relations(table_engine_factory, rng):
    S = PrimeSet(EXAMPLE_SET)
    for _ in range(20):
        engine = table_engine_factory(_random_values(S.primes, rng))
        tensor = build_tensor(S, engine)
        assert not tensor.shuffle_violations()
        for m, k in product(range(1, 4), range(4)):
            assert tensor.entry(m, 0, 0, k) == tensor.entry(m, k, 0, 0)
        for m, i, j, k in tensor.nonzero():
            assert m in (i, k) and i != k


def test_tensor_consults_symbols_with_evaluation_prime(table_engine_factory):
    engine = table_engine_factory({})
    tensor = build_tensor(PrimeSet(EXAMPLE_SET), engine)
    assert tensor.is_zero()
    assert z_lower_bound(tensor) == 4
    assert (2, 2, 313) in tensor.consulted


def test_delta_structure_is_mild(table_engine_factory):
    primes = PrimeSet(EXAMPLE_SET).primes
    engine = table_engine_factory({tuple(primes[t] for t in idx): -1 for idx in REDEI_313_MINUS_ONE})
    tensor = build_tensor(PrimeSet(EXAMPLE_SET), engine)
    assert z_lower_bound(tensor) == 3
    assert all(tensor.entry(m, 0, 0, k) == int(m == k) for m in range(1, 4) for k in range(1, 4))

    decomposition = Decomposition.from_labels([[1], [2], [3]], [[0]], 1, tensor.gen_labels)
    certificate = mild_certificate(tensor, decomposition)
    assert certificate.ok and certificate.condition_a and certificate.condition_b
    assert len(certificate.witness) == 3

    found = mild_search(tensor)
    assert found is not None
    assert mild_certificate(tensor, found.decomposition).ok


@pytest.mark.parametrize("index", range(5))
def test_case_table_matches_inflation(index, table_engine_factory, rng):
    S, q = _gst_instances(5)[index]
    presentation = gst_presentation_data(S, q)
    for _ in range(10):
        engine = table_engine_factory(_random_values(presentation.base.primes, rng))
        inflated = inflate_tensor(build_tensor(presentation.base, engine), presentation)
        table = gst_case_table_tensor(S, q, engine)
        assert table == inflated, sorted(set(table.nonzero()) ^ set(inflated.nonzero()))


def test_inflation_slot_formula(table_engine_factory, rng):
    presentation = gst_presentation_data(PrimeSet(GST_SET), 5)
    engine = table_engine_factory(_random_values(presentation.base.primes, rng))
    base = build_tensor(presentation.base, engine)
    inflated = inflate_tensor(base, presentation)
    targets = presentation.inflation
    assert inflated.gen_labels == (1, 2, 3)
    for m, i, j, k in product(range(1, 4), repeat=4):
        total = sum(base.entry(m, a, b, c) for a in targets[i] for b in targets[j] for c in targets[k])
        assert inflated.entry(m, i, j, k) == total % 2


def test_inflate_requires_full_tensor():
    presentation = gst_presentation_data(PrimeSet(GST_SET), 5)
    with pytest.raises(DomainError):
        inflate_tensor(MasseyTensor.zeros(3, (1, 2, 3)), presentation)


def test_zero_tensor_has_no_certificate():
    tensor = MasseyTensor.zeros(2, (0, 1, 2))
    assert mild_search(tensor) is None
    certificate = mild_certificate(tensor, Decomposition((1, 2), (4,), 1))
    assert not certificate
    assert certificate.condition_a and not certificate.condition_b
    assert certificate.diagnostic


def test_found_certificates_are_valid(table_engine_factory, rng):
    for S in (PrimeSet((17,)), PrimeSet(ZERO_SET)):
        for _ in range(10):
            tensor = build_tensor(S, table_engine_factory(_random_values(S.primes, rng)))
            found = mild_search(tensor)
            if found is not None:
                assert mild_certificate(tensor, found.decomposition).ok
                assert len(found.witness) == S.n


@pytest.mark.parametrize(
    "decomposition",
    [
        Decomposition((1,), (1,), 1),
        Decomposition((1,), (2,), 3),
        Decomposition((0,), (3,), 1),
        Decomposition((1,), (8,), 1),
        Decomposition((1, 2), (3,), 1),
    ],
)
def test_invalid_decomposition(decomposition):
    with pytest.raises(DomainError):
        mild_certificate(MasseyTensor.zeros(1, (0, 1)), decomposition)


def test_decomposition_from_labels():
    d = Decomposition.from_labels([[1, 3]], [[2], [3]], 2, (1, 2, 3))
    assert d.U == (0b101,) and d.V == (0b010, 0b100)
    assert d.coordinates(3) == ([[1, 0, 1]], [[0, 1, 0], [0, 0, 1]])
    with pytest.raises(DomainError):
        Decomposition.from_labels([[0]], [[1]], 1, (1, 2))


def test_search_capacity():
    with pytest.raises(CapacityError):
        mild_search(MasseyTensor.zeros(1, tuple(range(7))))


@pytest.mark.parametrize("g, k, expected", [(3, 1, 7), (3, 2, 7), (4, 2, 35), (4, 1, 15), (2, 1, 3)])
def test_subspace_counts(g, k, expected):
    found = list(subspaces(g, k))
    assert len(found) == expected
    spans = set()
    for basis in found:
        assert gf2_rank(basis) == k
        span = frozenset(
            reduce(xor, (v for v, c in zip(basis, coeffs) if c), 0)
            for coeffs in product((0, 1), repeat=k)
        )
        spans.add(span)
    assert len(spans) == expected


@pytest.mark.parametrize("g, expected", [(2, 12), (3, 112)])
def test_decomposition_count(g, expected):
    assert len(list(_decompositions(g))) == expected


def test_gf2_rank():
    assert gf2_rank([]) == 0
    assert gf2_rank([1, 2, 3]) == 2
    assert gf2_rank([0b1010, 0b0110, 0b1100, 0b0001]) == 3


def test_trace_vector_is_trilinear(table_engine_factory, rng):
    S = PrimeSet(EXAMPLE_SET)
    tensor = build_tensor(S, table_engine_factory(_random_values(S.primes, rng)))
    for _ in range(50):
        u1, u2, v, w = (rng.randrange(1, 16) for _ in range(4))
        assert tensor.trace_vector(u1 ^ u2, v, w) == tensor.trace_vector(u1, v, w) ^ tensor.trace_vector(u2, v, w)


def test_shuffle_violation_is_rejected():
    data = np.zeros((1, 3, 3, 3), dtype=np.uint8)
    data[0, 0, 1, 2] = 1
    with pytest.raises(InternalContradictionError):
        MasseyTensor(data, (0, 1, 2))
    tensor = MasseyTensor(data, (0, 1, 2), checked=False)
    assert tensor.shuffle_violations()
    with pytest.raises(DomainError):
        mild_certificate(tensor, Decomposition((1,), (2, 4), 1))


def test_tensor_accessors():
    tensor = MasseyTensor.zeros(2, (1, 2, 3))
    with pytest.raises(DomainError):
        tensor.entry(3, 1, 1, 1)
    with pytest.raises(DomainError):
        tensor.entry(1, 0, 1, 1)
    with pytest.raises(DomainError):
        MasseyTensor(np.zeros((1, 2, 2, 2)), (1, 2, 3))
    assert tensor.relator_labels == (1, 2)


def test_build_tensor_needs_zassenhaus_three(table_engine_factory):
    with pytest.raises(DomainError):
        build_tensor(PrimeSet((17, 313)), table_engine_factory({}))
