"""Independent geometry oracle for the catalog games.

Cells are enumerated through vertices found by scipy's linprog with random
objectives; dimensions come from the affine rank of those vertices.
Observability uses numpy least squares on the linear system of the
loss-difference identity.  Prints C++ initializers for tests/frozen_oracle.hpp.
"""
import itertools
import json
import sys

import numpy as np
from scipy.optimize import linprog

rng = np.random.default_rng(7)


def cell_vertices(L, actions, trials=300):
    k, d = L.shape
    rows, rhs = [], []
    for a in actions:
        for b in range(k):
            rows.append(L[a] - L[b])
            rhs.append(0.0)
    A_ub = np.array(rows)
    b_ub = np.array(rhs)
    A_eq = np.ones((1, d))
    verts = []
    for _ in range(trials):
        c = rng.normal(size=d)
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                      bounds=[(0, None)] * d, method="highs")
        if res.status == 2:
            return []
        if res.status == 0:
            verts.append(res.x)
    return verts


def affine_dim(verts):
    if not verts:
        return -1
    V = np.array(verts)
    return int(np.linalg.matrix_rank(V[1:] - V[0], tol=1e-8)) if len(V) > 1 else 0


def witness(L, F, a, b, local):
    k, d = L.shape
    S = int(F.max()) + 1
    cols = [(c, s) for c in range(k) for s in range(S) if (not local or c in (a, b))]
    M = np.zeros((d, len(cols)))
    for x in range(d):
        for j, (c, s) in enumerate(cols):
            if F[c, x] == s:
                M[x, j] = 1.0
    target = L[a] - L[b]
    w, *_ = np.linalg.lstsq(M, target, rcond=None)
    return float(np.abs(M @ w - target).max())


def analyse(doc):
    L = np.array(doc["loss"], dtype=float)
    F = np.array(doc["feedback"], dtype=int)
    k, d = L.shape
    dims = [affine_dim(cell_vertices(L, [a])) for a in range(k)]
    pareto = [a for a in range(k) if dims[a] == d - 1]
    edges = []
    for a, b in itertools.combinations(pareto, 2):
        if np.allclose(L[a], L[b]):
            continue
        if affine_dim(cell_vertices(L, [a, b])) == d - 2:
            edges.append((a, b))
    distinct = {tuple(L[a]) for a in pareto}
    if len(distinct) <= 1:
        cls = "trivial"
    else:
        loc = all(witness(L, F, a, b, True) < 1e-9 for a, b in edges)
        glo = all(witness(L, F, a, b, False) < 1e-9 for a, b in edges)
        cls = "locally_observable" if loc else "globally_observable" if glo else "hopeless"
    return dims, pareto, edges, cls


def main(paths):
    for path in paths:
        doc = json.load(open(path))
        dims, pareto, edges, cls = analyse(doc)
        e = ", ".join("{%d, %d}" % ab for ab in edges)
        print('    {"%s", {%s}, {%s}, {%s}, "%s"},' % (
            doc["name"], ", ".join(map(str, dims)), ", ".join(map(str, pareto)), e, cls))


if __name__ == "__main__":
    main(sys.argv[1:])
