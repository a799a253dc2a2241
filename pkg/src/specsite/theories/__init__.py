"""Registry of theory plugins and their geometries."""

from __future__ import annotations

from ..errors import InputError
from . import dlat, slat

THEORIES = ("dlat", "slat", "cring")
GEOMETRIES = {
    ("dlat", "zariski"): dlat.zariski,
    ("dlat", "cozariski"): dlat.cozariski,
    ("slat", "jm"): slat.jm,
}


def _cring_geometry(*args, **kwargs):
    from . import cring

    return cring.ring_zariski(*args, **kwargs)


GEOMETRIES[("cring", "ring-zariski")] = _cring_geometry


def signature(theory: str):
    if theory == "dlat":
        return dlat.SIGNATURE
    if theory == "slat":
        return slat.SIGNATURE
    if theory == "cring":
        from . import cring

        return cring.SIGNATURE
    raise InputError(f"unknown theory {theory!r}; known: {', '.join(THEORIES)}")


def geometry(theory: str, name: str, **options):
    if theory not in THEORIES:
        raise InputError(f"unknown theory {theory!r}; known: {', '.join(THEORIES)}")
    factory = GEOMETRIES.get((theory, name))
    if factory is None:
        known = sorted(g for t, g in GEOMETRIES if t == theory)
        raise InputError(f"unknown geometry {name!r} for theory {theory}; known: {', '.join(known)}")
    return factory(**options)
