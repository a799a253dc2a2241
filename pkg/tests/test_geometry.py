import itertools

import pytest
from hypothesis import given

from specsite.algebra import Homomorphism, identity, principal_congruence, quotient
from specsite.errors import NotLocalInput
from specsite.geometry import (
    admissible_factorize,
    diers_local_status,
    etale_maps_under,
    failing_cover,
    generalized_covers,
    is_local_map,
    is_local_object,
    is_local_object_by_injectivity,
    localizing_topology,
)
from specsite.spectrum import points
from specsite.theories import dlat

from strategies import lattice_homs, lattices

ONE, TWO, THREE, SQ = dlat.trivial(), dlat.chain(2), dlat.chain(3), dlat.square()
Z = dlat.zariski()


def _direct_covers(B, max_arity=2):
    # families {B -> B/θ(b_i, 1)} over all tuples with b_1 ∨ ... ∨ b_r = 1
    out = set()
    top = B.constant("one")
    for r in range(max_arity + 1):
        for bs in itertools.product(range(B.size), repeat=r):
            acc = B.constant("zero")
            for b in bs:
                acc = B.op("join", acc, b)
            if acc == top:
                out.add(frozenset(quotient(B, principal_congruence(B, b, top))[1].map for b in bs))
    return out


def test_square_covers_contain_the_atom_pair():
    keys = [c.key() for c in generalized_covers(SQ, Z)]
    assert frozenset({(0, 0, 1, 1), (0, 1, 0, 1)}) in keys
    assert frozenset({(0, 1, 2, 3)}) in keys


def test_minimal_covers_of_two_chain():
    covers = generalized_covers(TWO, Z, minimal=True)
    assert [c.key() for c in covers] == [frozenset({(0, 1)})]
    # without minimality the family padded with the collapse is also listed
    assert len(generalized_covers(TWO, Z)) == 2


def test_trivial_lattice_has_the_empty_cover():
    assert frozenset() in [c.key() for c in generalized_covers(ONE, Z)]


@given(lattices(6))
def test_generalized_covers_are_joins_to_one(B):
    assert {c.key() for c in generalized_covers(B, Z)} == _direct_covers(B)


@pytest.mark.parametrize("A,local", [(ONE, False), (TWO, True), (THREE, True), (SQ, False), (dlat.chain(4), True)])
def test_local_object_examples(A, local):
    assert is_local_object(A, Z) == local
    assert is_local_object_by_injectivity(A, Z) == local
    assert (failing_cover(A, Z) is None) == local


@given(lattices(7))
def test_local_objects_have_top_join_irreducible(B):
    # local iff 1 is join-prime: x ∨ y = 1 forces x = 1 or y = 1
    top = B.constant("one")
    prime = B.size > 1 and all(x == top or y == top for x in range(B.size) for y in range(B.size)
                               if B.op("join", x, y) == top)
    assert is_local_object(B, Z) == prime == Z.local_object_oracle(B)


def test_local_map_examples():
    assert is_local_map(identity(SQ), Z)
    assert not is_local_map(Homomorphism(SQ, TWO, (0, 1, 0, 1)), Z)
    assert is_local_map(Homomorphism(THREE, TWO, (0, 0, 1)), Z)
    assert not is_local_map(Homomorphism(THREE, TWO, (0, 1, 1)), Z)


@given(lattice_homs(max_size=5))
def test_local_map_agrees_with_orthogonality(u):
    # raises OracleDisagreement if the syntactic test and orthogonality differ
    is_local_map(u, Z, oracle=True)


def test_admissible_factorize_examples():
    w, middle, u = admissible_factorize(Homomorphism(SQ, TWO, (0, 1, 0, 1)), Z)
    assert middle == TWO and u.is_bijective()
    with pytest.raises(NotLocalInput):
        admissible_factorize(identity(SQ), Z)


@given(lattice_homs(max_size=6))
def test_gliding_middle_objects_of_maps_into_local_objects_are_local(f):
    if not is_local_object(f.cod, Z):
        return
    _, middle, _ = admissible_factorize(f, Z)
    assert is_local_object(middle, Z)


def test_etale_maps_under_square():
    maps = [n.map for n in etale_maps_under(SQ, Z)]
    assert maps[0] == (0, 1, 2, 3)
    assert set(maps) == {(0, 1, 2, 3), (0, 0, 1, 1), (0, 1, 0, 1), (0, 0, 0, 0)}


@pytest.mark.parametrize("A,local", [(TWO, True), (THREE, True), (SQ, False), (ONE, False)])
def test_diers_status_examples(A, local):
    sample = [L for L in dlat.distributive_lattices_up_to(4) if is_local_object(L, Z)]
    status = diers_local_status(A, Z, sample)
    assert status["u_local"] == status["retract"] == status["cone_injective"] == local


def test_localizing_topology_of_square():
    objs = etale_maps_under(SQ, Z)
    fams = localizing_topology(SQ, Z)
    # every localizing family reaches both points, so the identity alone localizes
    assert (0,) in fams
    pair = tuple(sorted(i for i, n in enumerate(objs) if n.map in {(0, 0, 1, 1), (0, 1, 0, 1)}))
    assert pair in fams
    assert () not in fams
    assert len(points(SQ, Z)) == 2


def test_localizing_topology_of_trivial_lattice():
    assert () in localizing_topology(ONE, Z)
