"""Print, per distributive lattice, its points, join-irreducibles and downset reconstruction."""

import argparse

from specsite.algebra import find_isomorphism
from specsite.spectrum import points, specialization
from specsite.theories import dlat
from specsite.theories.lattices import join_irreducibles, meet_all
from specsite.verify import downset_lattice


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-size", type=int, default=6)
    args = parser.parse_args()
    G = dlat.zariski()
    print(f"{'lattice':>10} {'points':>6} {'join-irr':>8} {'downsets':>8}")
    for n in range(1, args.max_size + 1):
        for k, D in enumerate(dlat.distributive_lattices(n)):
            pts = points(D, G)
            order = specialization(pts)
            # i <= j in the point poset when x_j specializes to x_i
            Dn = downset_lattice(len(pts), lambda i, j: order[j][i])
            gens = sorted(meet_all(D, p.label) for p in pts)
            ok = gens == sorted(join_irreducibles(D)) and find_isomorphism(D, Dn) is not None
            print(f"{f'{n}#{k}':>10} {len(pts):>6} {len(gens):>8} {'ok' if ok else 'MISMATCH':>8}")


if __name__ == "__main__":
    main()
