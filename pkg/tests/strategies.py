"""Hypothesis strategies over the small finite algebras used throughout the tests."""

from hypothesis import strategies as st

from specsite.algebra import enumerate_homs
from specsite.theories import dlat, slat

DLAT_SMALL = dlat.distributive_lattices_up_to(6)
DLAT_TINY = dlat.distributive_lattices_up_to(4)
SLAT_SMALL = slat.semilattices_up_to(5)


def lattices(max_size=6):
    return st.sampled_from([L for L in DLAT_SMALL if L.size <= max_size])


@st.composite
def lattice_homs(draw, max_size=5):
    pool = [L for L in DLAT_SMALL if L.size <= max_size]
    A = draw(st.sampled_from(pool))
    B = draw(st.sampled_from(pool))
    homs = enumerate_homs(A, B)
    if not homs:
        # the one-element lattice only maps to itself; fall back to an identity
        return enumerate_homs(A, A)[0]
    return draw(st.sampled_from(homs))


@st.composite
def lattice_elements(draw, max_size=6):
    L = draw(lattices(max_size))
    return L, draw(st.integers(0, L.size - 1)), draw(st.integers(0, L.size - 1))
