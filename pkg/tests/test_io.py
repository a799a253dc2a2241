import json

import pytest
from hypothesis import given

from specsite import io
from specsite.errors import InputError, SignatureMismatch
from specsite.theories import dlat, slat

from strategies import lattice_homs, lattices


@given(lattices(7))
def test_algebra_roundtrip(L):
    assert io.loads_algebra(io.dumps_algebra(L)) == L


def test_semilattice_roundtrip():
    for S in slat.semilattices(4):
        assert io.loads_algebra(io.dumps_algebra(S)) == S


@given(lattice_homs(max_size=5))
def test_hom_roundtrip(f):
    g = io.hom_from_json(json.loads(io.dumps(io.hom_to_json(f))))
    assert g.dom == f.dom and g.cod == f.cod and g.map == f.map


def test_parse_error_reports_byte_offset():
    with pytest.raises(InputError) as exc:
        io.parse_json('{"carrier": 2,, }', "x.json")
    assert "byte 14" in str(exc.value) and "x.json" in str(exc.value)


def test_byte_offset_counts_utf8():
    # "é" is two bytes, so the offset exceeds the character index
    with pytest.raises(InputError) as exc:
        io.parse_json('{"é": 1,, }')
    assert "byte 9" in str(exc.value)


def test_wrong_theory_rejected():
    data = io.algebra_to_json(dlat.chain(2))
    with pytest.raises(SignatureMismatch):
        io.algebra_from_json(data, theory="slat")


def test_bad_table_shape_rejected():
    data = io.algebra_to_json(dlat.chain(2))
    data["ops"]["meet"] = [[0, 0]]
    with pytest.raises((InputError, SignatureMismatch)):
        io.algebra_from_json(data)


def test_non_homomorphism_rejected():
    data = {"dom": io.algebra_to_json(dlat.square()), "cod": io.algebra_to_json(dlat.chain(2)),
            "map": [0, 1, 1, 1]}
    with pytest.raises(InputError):
        io.hom_from_json(data)


def test_missing_file():
    with pytest.raises(InputError):
        io.read_json("/nonexistent/file.json")


def test_shipped_examples_load():
    assert io.load_algebra("data/three_chain.json") == dlat.chain(3)
    assert io.load_algebra("data/square.json") == dlat.square()
    f = io.load_hom("data/square_to_two.json")
    assert f.map == (0, 1, 0, 1)


def test_dumps_is_deterministic():
    L = dlat.square()
    assert io.dumps_algebra(L) == io.dumps_algebra(L)
    assert io.dumps_algebra(L).endswith("\n")
