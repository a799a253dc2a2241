"""Finite universal algebra over carriers ``{0, ..., n-1}``.

Algebras are immutable; every operation here is a pure function.  Tables are
stored flat: the entry for arguments ``(a_1, ..., a_k)`` of an operation of
arity ``k`` lives at index ``a_1 * n**(k-1) + ... + a_k``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

from .errors import BudgetExceeded, InputError, NotSurjective, SignatureMismatch

DEFAULT_BUDGET = 10**6


def default_budget() -> int:
    value = os.environ.get("SPECSITE_BUDGET")
    return int(value) if value else DEFAULT_BUDGET


@dataclass(frozen=True)
class Signature:
    name: str
    operations: tuple  # ((name, arity), ...)
    laws: Optional[Callable] = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        names = [op for op, _ in self.operations]
        if len(set(names)) != len(names):
            raise InputError(f"duplicate operation names in signature {self.name}")
        for op, arity in self.operations:
            if not isinstance(arity, int) or arity < 0:
                raise InputError(f"operation {op} has invalid arity {arity!r}")

    def arity(self, op: str) -> int:
        for name, arity in self.operations:
            if name == op:
                return arity
        raise KeyError(op)

    def index(self, op: str) -> int:
        for i, (name, _) in enumerate(self.operations):
            if name == op:
                return i
        raise KeyError(op)


@dataclass(frozen=True)
class FiniteAlgebra:
    signature: Signature
    size: int
    tables: tuple  # one flat tuple per operation, in signature order

    def __post_init__(self):
        if self.size < 1:
            raise InputError("carrier must be non-empty")
        if len(self.tables) != len(self.signature.operations):
            raise InputError("one table per operation required")
        for (op, arity), table in zip(self.signature.operations, self.tables):
            if len(table) != self.size**arity:
                raise InputError(f"table for {op} has {len(table)} entries, expected {self.size ** arity}")
            if any(not (0 <= v < self.size) for v in table):
                raise InputError(f"table for {op} has entries outside [0, {self.size})")
        if self.signature.laws is not None:
            self.signature.laws(self)

    @classmethod
    def from_ops(cls, signature: Signature, size: int, ops: dict) -> "FiniteAlgebra":
        """Build from nested tables (``ops[name][a][b]``) or callables."""
        tables = []
        for op, arity in signature.operations:
            spec = ops[op]
            flat = []
            for args in itertools.product(range(size), repeat=arity):
                if callable(spec):
                    flat.append(spec(*args))
                else:
                    v = spec
                    for a in args:
                        v = v[a]
                    flat.append(v)
            tables.append(tuple(int(v) for v in flat))
        return cls(signature, size, tuple(tables))

    @property
    def elements(self) -> range:
        return range(self.size)

    def table(self, op: str) -> tuple:
        return self.tables[self.signature.index(op)]

    def op(self, name: str, *args: int) -> int:
        return self.tables[self.signature.index(name)][_flat_index(args, self.size)]

    def constant(self, name: str) -> int:
        return self.tables[self.signature.index(name)][0]

    def nested(self, op: str):
        """Table of ``op`` as nested lists (a bare int for constants)."""
        arity = self.signature.arity(op)
        table = self.table(op)
        if arity == 0:
            return table[0]

        def build(prefix, depth):
            if depth == arity:
                return table[_flat_index(prefix, self.size)]
            return [build(prefix + (a,), depth + 1) for a in range(self.size)]

        return build((), 0)

    def relabel(self, perm: Sequence[int]) -> "FiniteAlgebra":
        """The isomorphic copy in which element ``x`` is renamed ``perm[x]``."""
        inv = [0] * self.size
        for x, y in enumerate(perm):
            inv[y] = x
        tables = []
        for (op, arity), table in zip(self.signature.operations, self.tables):
            flat = []
            for args in itertools.product(range(self.size), repeat=arity):
                pre = tuple(inv[a] for a in args)
                flat.append(perm[table[_flat_index(pre, self.size)]])
            tables.append(tuple(flat))
        return FiniteAlgebra(self.signature, self.size, tuple(tables))

    def __repr__(self):
        return f"FiniteAlgebra({self.signature.name}, size={self.size})"


def _flat_index(args, n):
    i = 0
    for a in args:
        i = i * n + a
    return i


def _entries(algebra: FiniteAlgebra):
    """All table entries as ``(op_index, args, result)``."""
    out = []
    for k, ((_, arity), table) in enumerate(zip(algebra.signature.operations, algebra.tables)):
        for i, args in enumerate(itertools.product(range(algebra.size), repeat=arity)):
            out.append((k, args, table[i]))
    return out


@dataclass(frozen=True)
class Homomorphism:
    dom: FiniteAlgebra
    cod: FiniteAlgebra
    map: tuple

    def __post_init__(self):
        if len(self.map) != self.dom.size:
            raise InputError("homomorphism map must have one entry per domain element")
        if any(not (0 <= v < self.cod.size) for v in self.map):
            raise InputError("homomorphism map leaves the codomain")

    def __call__(self, x: int) -> int:
        return self.map[x]

    def then(self, other: "Homomorphism") -> "Homomorphism":
        """``other ∘ self``."""
        if other.dom != self.cod:
            raise InputError("cannot compose: codomain and domain differ")
        return Homomorphism(self.dom, other.cod, tuple(other.map[v] for v in self.map))

    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.cod.size

    def is_injective(self) -> bool:
        return len(set(self.map)) == self.dom.size

    def is_bijective(self) -> bool:
        return self.dom.size == self.cod.size and self.is_injective()

    def preimage(self, y: int) -> tuple:
        return tuple(x for x, v in enumerate(self.map) if v == y)

    def __repr__(self):
        return f"Homomorphism({self.dom.size}->{self.cod.size}, {list(self.map)})"


def identity(algebra: FiniteAlgebra) -> Homomorphism:
    return Homomorphism(algebra, algebra, tuple(range(algebra.size)))


def compose(g: Homomorphism, f: Homomorphism) -> Homomorphism:
    return f.then(g)


def check_homomorphism(f: Homomorphism) -> bool:
    if f.dom.signature != f.cod.signature:
        raise SignatureMismatch(f"{f.dom.signature.name} vs {f.cod.signature.name}")
    n, m = f.dom.size, f.cod.size
    for table_a, table_b, (_, arity) in zip(f.dom.tables, f.cod.tables, f.dom.signature.operations):
        for i, args in enumerate(itertools.product(range(n), repeat=arity)):
            image = tuple(f.map[a] for a in args)
            if f.map[table_a[i]] != table_b[_flat_index(image, m)]:
                return False
    return True


def hom(dom: FiniteAlgebra, cod: FiniteAlgebra, mapping: Iterable[int]) -> Homomorphism:
    """Construct a homomorphism, rejecting maps that do not commute."""
    f = Homomorphism(dom, cod, tuple(mapping))
    if not check_homomorphism(f):
        raise InputError(f"map {list(f.map)} is not a homomorphism")
    return f


# --------------------------------------------------------------------------
# homomorphism search


@lru_cache(maxsize=512)
def _watch_lists(algebra: FiniteAlgebra):
    entries = _entries(algebra)
    watch = [[] for _ in range(algebra.size)]
    constants = []
    for e in entries:
        _, args, _ = e
        if not args:
            constants.append(e)
        for a in set(args):
            watch[a].append(e)
    return constants, watch, _generation_order(algebra)


def _generation_order(algebra: FiniteAlgebra):
    """Elements ordered so that each is a free choice or derivable from earlier ones."""
    known = set()
    order = []

    def close():
        changed = True
        while changed:
            changed = False
            for (_, arity), table in zip(algebra.signature.operations, algebra.tables):
                for args in itertools.product(sorted(known), repeat=arity):
                    r = table[_flat_index(args, algebra.size)]
                    if r not in known:
                        known.add(r)
                        order.append(r)
                        changed = True

    close()
    for x in range(algebra.size):
        if x not in known:
            known.add(x)
            order.append(x)
            close()
    return tuple(order)


def iter_homs(
    A: FiniteAlgebra,
    B: FiniteAlgebra,
    budget: Optional[int] = None,
    fixed: Optional[dict] = None,
    injective: bool = False,
):
    """Yield every homomorphism ``A -> B`` (search order, not canonical order)."""
    if A.signature != B.signature:
        raise SignatureMismatch(f"{A.signature.name} vs {B.signature.name}")
    budget = default_budget() if budget is None else budget
    if injective and A.size > B.size:
        return
    constants, watch, order = _watch_lists(A)
    n_b = B.size
    nodes = [0]

    def assign(m, x, v, used):
        # assign and propagate; returns list of assigned keys or None on conflict
        stack = [(x, v)]
        added = []
        while stack:
            x, v = stack.pop()
            if x in m:
                if m[x] != v:
                    return added, False
                continue
            if injective and v in used:
                return added, False
            m[x] = v
            if injective:
                used.add(v)
            added.append(x)
            for k, args, r in watch[x]:
                if all(a in m for a in args):
                    w = B.tables[k][_flat_index([m[a] for a in args], n_b)]
                    stack.append((r, w))
        return added, True

    def undo(m, added, used):
        for x in added:
            v = m.pop(x)
            if injective:
                used.discard(v)

    m, used = {}, set()
    ok = True
    for k, _, r in constants:
        _, ok = assign(m, r, B.tables[k][0], used)
        if not ok:
            return
    for x, v in (fixed or {}).items():
        _, ok = assign(m, x, v, used)
        if not ok:
            return

    def search():
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded(f"hom search {A.signature.name} {A.size}->{B.size}", budget)
        free = next((x for x in order if x not in m), None)
        if free is None:
            yield Homomorphism(A, B, tuple(m[x] for x in range(A.size)))
            return
        for v in range(n_b):
            added, ok = assign(m, free, v, used)
            if ok:
                yield from search()
            undo(m, added, used)

    yield from search()


def enumerate_homs(A, B, budget=None, fixed=None, injective=False) -> list:
    """All homomorphisms ``A -> B`` in lexicographic order of their maps."""
    return sorted(iter_homs(A, B, budget, fixed, injective), key=lambda f: f.map)


def find_isomorphism(A: FiniteAlgebra, B: FiniteAlgebra, budget=None) -> Optional[Homomorphism]:
    if A.signature != B.signature:
        raise SignatureMismatch(f"{A.signature.name} vs {B.signature.name}")
    if A.size != B.size or _invariant(A) != _invariant(B):
        return None
    isos = enumerate_homs(A, B, budget, injective=True)
    return isos[0] if isos else None


def isomorphisms(A, B, budget=None) -> list:
    if A.size != B.size:
        return []
    return enumerate_homs(A, B, budget, injective=True)


@lru_cache(maxsize=4096)
def _invariant(A: FiniteAlgebra):
    # cheap isomorphism invariant: per binary op, sorted idempotent / image counts
    inv = []
    for (_, arity), table in zip(A.signature.operations, A.tables):
        if arity == 2:
            idem = sum(1 for x in range(A.size) if table[x * A.size + x] == x)
            counts = sorted(table.count(v) for v in range(A.size))
            inv.append((idem, tuple(counts)))
        elif arity == 1:
            inv.append(tuple(sorted(table.count(v) for v in range(A.size))))
    return tuple(inv)


# --------------------------------------------------------------------------
# congruences and quotients


@dataclass(frozen=True)
class Congruence:
    algebra: FiniteAlgebra
    blocks: tuple  # canonical block id per element (first-occurrence order)

    def same(self, x: int, y: int) -> bool:
        return self.blocks[x] == self.blocks[y]

    @property
    def classes(self) -> tuple:
        out = {}
        for x, b in enumerate(self.blocks):
            out.setdefault(b, []).append(x)
        return tuple(tuple(out[b]) for b in sorted(out))

    def class_of(self, x: int) -> tuple:
        b = self.blocks[x]
        return tuple(y for y, c in enumerate(self.blocks) if c == b)

    def __le__(self, other: "Congruence") -> bool:
        return all(other.same(x, y) for x, y in self.pairs())

    def pairs(self):
        for cls in self.classes:
            for x in cls:
                for y in cls:
                    yield x, y

    def meet(self, other: "Congruence") -> "Congruence":
        return _canonical(self.algebra, list(zip(self.blocks, other.blocks)))

    def is_diagonal(self) -> bool:
        return len(set(self.blocks)) == self.algebra.size


def _canonical(algebra, labels) -> Congruence:
    ids = {}
    return Congruence(algebra, tuple(ids.setdefault(lab, len(ids)) for lab in labels))


def _is_compatible(algebra: FiniteAlgebra, blocks) -> bool:
    n = algebra.size
    for (_, arity), table in zip(algebra.signature.operations, algebra.tables):
        for args in itertools.product(range(n), repeat=arity):
            r = blocks[table[_flat_index(args, n)]]
            for i, a in enumerate(args):
                for b in range(n):
                    if b != a and blocks[b] == blocks[a]:
                        alt = args[:i] + (b,) + args[i + 1:]
                        if blocks[table[_flat_index(alt, n)]] != r:
                            return False
    return True


def is_congruence(algebra: FiniteAlgebra, blocks: Sequence[int]) -> bool:
    return len(blocks) == algebra.size and _is_compatible(algebra, blocks)


def generated_congruence(algebra: FiniteAlgebra, pairs: Iterable) -> Congruence:
    """Smallest congruence containing ``pairs`` (fixpoint closure)."""
    n = algebra.size
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        if rx < ry:
            parent[ry] = rx
        else:
            parent[rx] = ry
        return True

    for x, y in pairs:
        union(x, y)
    changed = True
    while changed:
        changed = False
        for (_, arity), table in zip(algebra.signature.operations, algebra.tables):
            if arity == 0:
                continue
            for args in itertools.product(range(n), repeat=arity):
                r = table[_flat_index(args, n)]
                for i, a in enumerate(args):
                    ra = find(a)
                    if ra != a:
                        alt = args[:i] + (ra,) + args[i + 1:]
                        if union(r, table[_flat_index(alt, n)]):
                            changed = True
    return _canonical(algebra, [find(x) for x in range(n)])


def principal_congruence(algebra: FiniteAlgebra, a: int, b: int) -> Congruence:
    return generated_congruence(algebra, [(a, b)])


def diagonal(algebra: FiniteAlgebra) -> Congruence:
    return Congruence(algebra, tuple(range(algebra.size)))


def kernel(f: Homomorphism) -> Congruence:
    return _canonical(f.dom, f.map)


def quotient(algebra: FiniteAlgebra, theta: Congruence):
    """``(A/θ, projection)``; block of the least element gets the least id."""
    if theta.algebra != algebra:
        raise InputError("congruence belongs to a different algebra")
    k = len(set(theta.blocks))
    reps = [None] * k
    for x, b in enumerate(theta.blocks):
        if reps[b] is None:
            reps[b] = x
    n = algebra.size
    tables = []
    for (_, arity), table in zip(algebra.signature.operations, algebra.tables):
        flat = []
        for args in itertools.product(range(k), repeat=arity):
            rep_args = tuple(reps[a] for a in args)
            flat.append(theta.blocks[table[_flat_index(rep_args, n)]])
        tables.append(tuple(flat))
    q = FiniteAlgebra(algebra.signature, k, tuple(tables))
    return q, Homomorphism(algebra, q, theta.blocks)


def all_congruences(algebra: FiniteAlgebra) -> list:
    """Every congruence, as joins of principal ones (canonical order)."""
    principals = {principal_congruence(algebra, a, b)
                  for a in range(algebra.size) for b in range(a + 1, algebra.size)}
    found = {diagonal(algebra)}
    frontier = list(found)
    while frontier:
        nxt = []
        for theta in frontier:
            for p in principals:
                joined = join_congruences(theta, p)
                if joined not in found:
                    found.add(joined)
                    nxt.append(joined)
        frontier = nxt
    return sorted(found, key=lambda t: (-len(set(t.blocks)), t.blocks))


def join_congruences(s: Congruence, t: Congruence) -> Congruence:
    pairs = [(x, y) for x, y in s.pairs()] + [(x, y) for x, y in t.pairs()]
    return generated_congruence(s.algebra, pairs)


def descend(f: Homomorphism, q: Homomorphism) -> Homomorphism:
    """The unique ``g`` with ``g ∘ q = f`` for surjective ``q``; raises if ``f`` does not factor."""
    if q.dom != f.dom:
        raise InputError("descend: maps must share a domain")
    image = [None] * q.cod.size
    for x, b in enumerate(q.map):
        if image[b] is None:
            image[b] = f.map[x]
        elif image[b] != f.map[x]:
            raise InputError("descend: map is not constant on the fibres of the quotient")
    if any(v is None for v in image):
        raise NotSurjective("descend needs a surjective quotient map")
    return Homomorphism(q.cod, f.cod, tuple(image))


def pushout_surjection(q: Homomorphism, h: Homomorphism):
    """Pushout of a surjection ``q: A ->> A/θ`` along ``h: A -> B``.

    Returns ``(q', h')`` with ``q': B ->> B/h_*θ`` and ``h': A/θ -> B/h_*θ``.
    """
    if q.dom.signature != h.dom.signature:
        raise SignatureMismatch("pushout legs have different signatures")
    if q.dom != h.dom:
        raise InputError("pushout legs must share a domain")
    if not q.is_surjective():
        raise NotSurjective(f"pushout along non-surjective {q!r}")
    first = {}
    pairs = []
    for x, b in enumerate(q.map):
        if b in first:
            pairs.append((h.map[first[b]], h.map[x]))
        else:
            first[b] = x
    theta = generated_congruence(h.cod, pairs)
    target, q_prime = quotient(h.cod, theta)
    h_prime = Homomorphism(q.cod, target, tuple(q_prime.map[h.map[first[b]]] for b in range(q.cod.size)))
    return q_prime, h_prime


# --------------------------------------------------------------------------
# limits used by the fibered constructions


def subalgebra(algebra: FiniteAlgebra, elements: Iterable[int]):
    """Subalgebra on a closed subset, relabeled in increasing order, with its inclusion."""
    elems = sorted(set(elements))
    index = {x: i for i, x in enumerate(elems)}
    k = len(elems)
    tables = []
    for (op, arity), table in zip(algebra.signature.operations, algebra.tables):
        flat = []
        for args in itertools.product(range(k), repeat=arity):
            r = table[_flat_index([elems[a] for a in args], algebra.size)]
            if r not in index:
                raise InputError(f"subset not closed under {op}")
            flat.append(index[r])
        tables.append(tuple(flat))
    sub = FiniteAlgebra(algebra.signature, k, tuple(tables))
    return sub, Homomorphism(sub, algebra, tuple(elems))


def product(A: FiniteAlgebra, B: FiniteAlgebra):
    """``A × B`` with element ``(a, b)`` numbered ``a * |B| + b``, plus projections."""
    if A.signature != B.signature:
        raise SignatureMismatch("product of different signatures")
    m = B.size
    size = A.size * m
    tables = []
    for (_, arity), ta, tb in zip(A.signature.operations, A.tables, B.tables):
        flat = []
        for args in itertools.product(range(size), repeat=arity):
            ra = ta[_flat_index([x // m for x in args], A.size)]
            rb = tb[_flat_index([x % m for x in args], m)]
            flat.append(ra * m + rb)
        tables.append(tuple(flat))
    P = FiniteAlgebra(A.signature, size, tuple(tables))
    p1 = Homomorphism(P, A, tuple(x // m for x in range(size)))
    p2 = Homomorphism(P, B, tuple(x % m for x in range(size)))
    return P, p1, p2


def pullback(f: Homomorphism, g: Homomorphism):
    """``A ×_C B`` for ``f: A -> C``, ``g: B -> C``, with its two projections."""
    if f.cod != g.cod:
        raise InputError("pullback legs must share a codomain")
    P, p1, p2 = product(f.dom, g.dom)
    keep = [x for x in range(P.size) if f.map[p1.map[x]] == g.map[p2.map[x]]]
    S, inc = subalgebra(P, keep)
    return S, inc.then(p1), inc.then(p2)


def image_algebra(f: Homomorphism):
    return subalgebra(f.cod, set(f.map))
