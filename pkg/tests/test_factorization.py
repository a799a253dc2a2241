import pytest
from hypothesis import given

from specsite.algebra import Homomorphism, enumerate_homs, identity, principal_congruence, quotient
from specsite.errors import InputError
from specsite.factorization import (
    LiftingProblem,
    anel_refinement_check,
    diagonal_fillers,
    factorize,
    is_orthogonal,
    middle_iso,
    pushout_functoriality,
    verify_saturated,
)
from specsite.geometry import is_local_map
from specsite.theories import dlat

from strategies import lattice_homs

ONE, TWO, THREE, SQ = dlat.trivial(), dlat.chain(2), dlat.chain(3), dlat.square()
Z = dlat.zariski()
Q = Homomorphism(SQ, TWO, (0, 1, 0, 1))   # quotient of the square by θ(a, 1)


def test_fillers_for_identity_left_map():
    r = Q
    top = identity(SQ)
    fillers = diagonal_fillers(LiftingProblem(identity(SQ), r, top, r))
    assert [d.map for d in fillers] == [top.map]


def test_unique_filler_against_identity():
    p = LiftingProblem(Q, identity(TWO), Q, identity(TWO))
    assert [d.map for d in diagonal_fillers(p)] == [(0, 1)]


def test_no_filler_for_quotient_against_itself():
    # a section of a non-injective quotient would be needed
    p = LiftingProblem(Q, Q, identity(SQ), identity(TWO))
    assert diagonal_fillers(p) == []


def test_noncommuting_square_rejected():
    with pytest.raises(InputError):
        LiftingProblem(Q, identity(TWO), Homomorphism(SQ, TWO, (0, 0, 1, 1)), identity(TWO))


def test_orthogonality_examples():
    assert not is_orthogonal(Q, Q)
    assert is_orthogonal(identity(SQ), Q)
    assert is_orthogonal(Q, identity(TWO))
    # the generator quotient is orthogonal to every local map between small lattices
    small = dlat.distributive_lattices_up_to(4)
    for A in small:
        for B in small:
            for u in enumerate_homs(A, B):
                if is_local_map(u, Z, oracle=False):
                    assert is_orthogonal(Q, u)


@pytest.mark.parametrize("f,middle_size,steps", [
    (Q, 2, 1),
    (identity(SQ), 4, 0),
    (Homomorphism(THREE, TWO, (0, 1, 1)), 2, 1),
    (Homomorphism(THREE, TWO, (0, 0, 1)), 3, 0),
    (Homomorphism(SQ, ONE, (0, 0, 0, 0)), 1, 1),
])
def test_factorize_examples(f, middle_size, steps):
    w, u = factorize(f, Z)
    e = w.map
    assert e.then(u).map == f.map
    assert e.cod.size == middle_size and len(w.steps) == steps
    assert w.replay(Z).map == e.map
    assert is_local_map(u, Z)


def test_factorize_quotient_matches_closed_form():
    w, u = factorize(Q, Z)
    q, u2 = dlat.closed_form_factorization(Q)
    assert w.map.map == q.map == (0, 1, 0, 1)
    assert u.is_bijective()


def test_factorize_rejects_other_theory():
    from specsite.theories import slat

    with pytest.raises(InputError):
        factorize(identity(slat.chain(2)), Z)


@given(lattice_homs(max_size=5))
def test_factorization_is_unique_up_to_unique_iso(f):
    w, u = factorize(f, Z)
    q, u2 = dlat.closed_form_factorization(f)
    isos = middle_iso(w.map, u, q, u2)
    assert len(isos) == 1


@given(lattice_homs(max_size=5))
def test_factorization_legs_are_etale_and_local(f):
    w, u = factorize(f, Z)
    assert Z.etale_test(w.map)
    assert is_local_map(u, Z, oracle=False)
    assert is_local_map(u, Z, oracle=True)


def test_verify_saturated_on_small_lattices():
    report = verify_saturated(Z, dlat.distributive_lattices_up_to(4))
    assert report["passed"], report


def test_verify_saturated_empty_sample():
    report = verify_saturated(Z, [])
    assert report["passed"] and report["maps"] == 0


def test_verify_saturated_names_the_broken_triangle():
    sample = [THREE, TWO, ONE]
    # pretend the collapse of the 2-chain is not etale
    broken = lambda f: Z.etale_test(f) and not (f.dom == TWO and f.cod.size == 1)
    report = verify_saturated(Z, sample, etale_test=broken)
    assert not report["passed"]
    bad = report["checks"]["right_cancellation"]
    assert not bad["passed"]
    assert bad["counterexample"]["triangle"] == [0, 1, 2]


def test_pushout_functoriality_examples():
    _, k = quotient(THREE, principal_congruence(THREE, 1, 2))
    h = Homomorphism(THREE, SQ, (0, 1, 3))
    assert pushout_functoriality(k, h, Q)
    assert pushout_functoriality(k, identity(THREE), identity(THREE))


@given(lattice_homs(max_size=4), lattice_homs(max_size=4))
def test_pushout_functoriality_property(h, g):
    if h.cod != g.dom:
        return
    for gi, att, k in Z.generator_instances(h.dom):
        assert pushout_functoriality(k, h, g)


def test_anel_refinement_examples():
    _, k = quotient(THREE, principal_congruence(THREE, 1, 2))
    a0 = Homomorphism(THREE, SQ, (0, 1, 3))
    # the pushout of k along a0 is Q; a lands there through Q itself
    assert anel_refinement_check(k, a0, Q)
    assert anel_refinement_check(k, a0, identity(TWO))
    with pytest.raises(InputError):
        anel_refinement_check(k, a0, identity(SQ))
