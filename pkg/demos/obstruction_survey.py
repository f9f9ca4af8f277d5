"""Survey W3 over every homomorphism from a small orientifold group into signed-permutation rotations.

Usage: python demos/obstruction_survey.py [z2|h4-q] [n]
"""

import itertools
import sys

import numpy as np

from orientifold import EquivariantCover, SpinkProblem, compute_w3, find_spinc_lift, preset_group


def rotations(n):
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            M = np.zeros((n, n), dtype=np.int64)
            for i, j in enumerate(perm):
                M[j, i] = signs[i]
            if round(np.linalg.det(M)) == 1:
                yield M


def main(group="z2", n=2):
    G = preset_group(group)
    gen = next(g for g in G.elements if G.element_order(g) == G.order)
    cover = EquivariantCover.point(G)
    seen = set()
    for A in rotations(n):
        if not np.array_equal(np.linalg.matrix_power(A, G.order), np.eye(n, dtype=np.int64)):
            continue
        table, g, P = {}, G.identity, np.eye(n, dtype=np.int64)
        for _ in range(G.order):
            table[g] = P
            g, P = G.mul(gen, g), A @ P
        key = A.tobytes()
        if key in seen:
            continue
        seen.add(key)
        problem = SpinkProblem.from_table(cover, n, table)
        rep = compute_w3(problem)
        lift = find_spinc_lift(problem)
        print(f"{A.tolist()!s:40}  W3 in {rep.w3.group.describe():4}  coords {rep.w3.coords}  exists {rep.exists}  search {lift is not None}")


if __name__ == "__main__":
    args = sys.argv[1:]
    main(args[0] if args else "z2", int(args[1]) if len(args) > 1 else 2)
