import pytest
from hypothesis import given
from hypothesis import strategies as st

from specsite.algebra import (
    FiniteAlgebra,
    Homomorphism,
    check_homomorphism,
    descend,
    diagonal,
    enumerate_homs,
    find_isomorphism,
    generated_congruence,
    identity,
    is_congruence,
    kernel,
    principal_congruence,
    product,
    pullback,
    pushout_surjection,
    quotient,
)
from specsite.errors import BudgetExceeded, LawViolation, NotSurjective, SignatureMismatch
from specsite.theories import dlat, slat

from strategies import DLAT_TINY, lattice_elements, lattice_homs, lattices

TWO, THREE, SQ = dlat.chain(2), dlat.chain(3), dlat.square()
A, B = 1, 2  # atoms of the square
M = 1        # middle of the 3-chain


def test_check_homomorphism_examples():
    assert check_homomorphism(identity(TWO))
    assert check_homomorphism(Homomorphism(SQ, TWO, (0, 1, 0, 1)))
    # a∧b = 0 would have to go to 1∧1 = 1
    assert not check_homomorphism(Homomorphism(SQ, TWO, (0, 1, 1, 1)))


def test_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        check_homomorphism(Homomorphism(slat.chain(2), TWO, (0, 1)))


def test_enumerate_homs_examples():
    assert [h.map for h in enumerate_homs(TWO, TWO)] == [(0, 1)]
    assert [h.map for h in enumerate_homs(THREE, TWO)] == [(0, 0, 1), (0, 1, 1)]
    assert [h.map for h in enumerate_homs(SQ, TWO)] == [(0, 0, 1, 1), (0, 1, 0, 1)]


def test_enumerate_homs_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_homs(SQ, dlat.chain(4), budget=2)


def test_principal_congruence_examples():
    assert principal_congruence(SQ, A, 3).classes == ((0, B), (A, 3))
    assert principal_congruence(THREE, 1, 1) == diagonal(THREE)
    assert principal_congruence(THREE, 0, 2).classes == ((0, 1, 2),)


def test_quotient_examples():
    Q, q = quotient(SQ, principal_congruence(SQ, A, 3))
    assert Q == TWO and q.map == (0, 1, 0, 1)
    Q, q = quotient(SQ, diagonal(SQ))
    assert q.is_bijective() and find_isomorphism(Q, SQ) is not None
    Q, q = quotient(THREE, principal_congruence(THREE, M, 2))
    assert Q == TWO and q.map == (0, 1, 1)


def test_pushout_examples():
    _, k = quotient(THREE, principal_congruence(THREE, M, 2))
    h = Homomorphism(THREE, SQ, (0, A, 3))
    q2, h2 = pushout_surjection(k, h)
    assert q2.cod == TWO and q2.map == (0, 1, 0, 1)
    assert k.then(h2).map == h.then(q2).map

    g = Homomorphism(SQ, TWO, (0, 1, 0, 1))
    q2, _ = pushout_surjection(identity(SQ), g)
    assert q2.is_bijective() and q2.dom == TWO

    _, qa = quotient(SQ, principal_congruence(SQ, A, 3))
    q2, _ = pushout_surjection(qa, g)
    assert q2.map == (0, 1)


def test_pushout_needs_surjection():
    with pytest.raises(NotSurjective):
        pushout_surjection(Homomorphism(TWO, THREE, (0, 2)), identity(TWO))


def test_find_isomorphism_examples():
    assert find_isomorphism(TWO, TWO).map == (0, 1)
    relabelled = SQ.relabel((3, 1, 2, 0))
    iso = find_isomorphism(SQ, relabelled)
    assert iso is not None and check_homomorphism(iso)
    assert find_isomorphism(TWO, THREE) is None


def _m3_tables():
    # 0 < a, b, c < 1 with pairwise joins 1 and meets 0
    def meet(x, y):
        if x == y or y == 4:
            return x
        if x == 4:
            return y
        return 0

    def join(x, y):
        if x == y or y == 0:
            return x
        if x == 0:
            return y
        return 4

    return meet, join


def test_law_checker_rejects_m3_with_witness():
    meet, join = _m3_tables()
    with pytest.raises(LawViolation) as exc:
        dlat.lattice(5, meet, join, 0, 4)
    assert "distributive" in str(exc.value)
    assert exc.value.witness is not None


def test_law_checker_rejects_n5():
    # 0 < a < c < 1 and 0 < b < 1
    order = {(0, 1), (0, 2), (0, 3), (0, 4), (1, 3), (1, 4), (2, 4), (3, 4)}
    le = lambda x, y: x == y or (x, y) in order
    meet = lambda x, y: max(z for z in range(5) if le(z, x) and le(z, y))
    join = lambda x, y: min(z for z in range(5) if le(x, z) and le(y, z))
    with pytest.raises(LawViolation):
        dlat.lattice(5, meet, join, 0, 4)


def test_product_and_pullback():
    P, p1, p2 = product(TWO, TWO)
    assert find_isomorphism(P, SQ) is not None
    one = dlat.trivial()
    S, r1, r2 = pullback(Homomorphism(TWO, one, (0, 0)), Homomorphism(TWO, one, (0, 0)))
    assert S.size == 4
    S, r1, r2 = pullback(identity(TWO), identity(TWO))
    assert S.size == 2


# --------------------------------------------------------------------------
# properties


@given(lattice_elements())
def test_generated_congruence_is_compatible(case):
    L, a, b = case
    theta = principal_congruence(L, a, b)
    assert theta.same(a, b)
    assert is_congruence(L, theta.blocks)


@given(lattice_elements(max_size=5))
def test_quotient_universal_property(case):
    L, a, b = case
    Q, q = quotient(L, principal_congruence(L, a, b))
    assert q.is_surjective() and check_homomorphism(q)
    assert q(a) == q(b)
    for T in DLAT_TINY:
        for f in enumerate_homs(L, T):
            if f(a) == f(b):
                g = descend(f, q)
                assert q.then(g).map == f.map
                assert check_homomorphism(g)


@given(lattice_homs(max_size=4), st.data())
def test_pushout_universal_property(h, data):
    L = h.dom
    a = data.draw(st.integers(0, L.size - 1))
    _, q = quotient(L, principal_congruence(L, a, L.constant("one")))
    q2, h2 = pushout_surjection(q, h)
    assert q.then(h2).map == h.then(q2).map
    for X in DLAT_TINY:
        for k1 in enumerate_homs(h.cod, X):
            for k2 in enumerate_homs(q.cod, X):
                if q.then(k2).map != h.then(k1).map:
                    continue
                fillers = [m for m in enumerate_homs(q2.cod, X)
                           if q2.then(m).map == k1.map and h2.then(m).map == k2.map]
                assert len(fillers) == 1


@given(lattices(6), lattices(6))
def test_enumerate_homs_is_deterministic_and_sorted(L, T):
    first = [h.map for h in enumerate_homs(L, T)]
    assert first == [h.map for h in enumerate_homs(L, T)]
    assert first == sorted(first)
    assert all(check_homomorphism(Homomorphism(L, T, m)) for m in first)


@given(lattice_homs())
def test_kernel_quotient_factorization(f):
    Q, q = quotient(f.dom, kernel(f))
    g = descend(f, q)
    assert g.is_injective()


@given(lattices(6))
def test_relabel_gives_isomorphic_copy(L):
    perm = tuple(reversed(range(L.size)))
    R = L.relabel(perm)
    iso = find_isomorphism(L, R)
    assert iso is not None and iso.is_bijective()


def test_from_ops_roundtrip():
    T = FiniteAlgebra.from_ops(dlat.SIGNATURE, 3, {op: THREE.nested(op) for op, _ in dlat.SIGNATURE.operations})
    assert T == THREE


def test_generated_congruence_of_pairs():
    theta = generated_congruence(SQ, [(A, 3)])
    assert theta == principal_congruence(SQ, A, 3)
