"""Independent brute-force oracles. Nothing here calls library algorithms."""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, product

from multicomm.category import free_diagram
from multicomm.spaces import FiniteSpace, TableMap


def gauss_solve(A, b):
    """Unique solution of a square system over the rationals, or None if singular."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return None
        M[c], M[p] = M[p], M[c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                k = M[r][c] / M[c][c]
                M[r] = [x - k * y for x, y in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def rank(rows):
    M = [[Fraction(x) for x in r] for r in rows]
    rk = 0
    cols = len(M[0]) if M else 0
    for c in range(cols):
        p = next((r for r in range(rk, len(M)) if M[r][c] != 0), None)
        if p is None:
            continue
        M[rk], M[p] = M[p], M[rk]
        for r in range(len(M)):
            if r != rk and M[r][c] != 0:
                k = M[r][c] / M[rk][c]
                M[r] = [x - k * y for x, y in zip(M[r], M[rk])]
        rk += 1
    return rk


def in_hull(p, pts) -> bool:
    """Carathéodory scan: p is a convex combination of some affinely independent subset."""
    p = tuple(Fraction(x) for x in p)
    d = len(p)
    for k in range(1, min(len(pts), d + 1) + 1):
        for S in combinations(pts, k):
            # solve sum w_i s_i = p, sum w_i = 1 in least-squares-free form: pick k independent rows
            rows = [[Fraction(s[j]) for s in S] for j in range(d)] + [[Fraction(1)] * k]
            rhs = list(p) + [Fraction(1)]
            for idx in combinations(range(d + 1), k):
                A = [rows[i] for i in idx]
                w = gauss_solve(A, [rhs[i] for i in idx])
                if w is None:
                    continue
                if all(x >= 0 for x in w) and all(
                        sum(wi * row_i for wi, row_i in zip(w, rows[j])) == rhs[j] for j in range(d + 1)):
                    return True
    return False


def extreme_points(pts):
    pts = sorted(set(tuple(Fraction(x) for x in p) for p in pts))
    return [p for p in pts if not in_hull(p, [q for q in pts if q != p])]


def basic_solutions(A_eq, b_eq, n):
    """Vertices of {x >= 0 : A x = b} by scanning every basis."""
    r = rank(A_eq)
    # drop dependent rows
    rows, rhs = [], []
    for a, b in zip(A_eq, b_eq):
        if rank(rows + [a]) > len(rows):
            rows.append(a)
            rhs.append(b)
    out = set()
    for basis in combinations(range(n), r):
        A = [[row[j] for j in basis] for row in rows]
        xb = gauss_solve(A, rhs)
        if xb is None or any(v < 0 for v in xb):
            continue
        x = [Fraction(0)] * n
        for j, v in zip(basis, xb):
            x[j] = v
        if all(sum(Fraction(a_) * x_ for a_, x_ in zip(row, x)) == b for row, b in zip(rows, rhs)):
            out.add(tuple(x))
    return sorted(out)


def brute_limit(d):
    """Filter the full product; maps are read through their tables directly."""
    objs = list(d.objects)
    out = []
    for combo in product(*(range(len(d.spaces[o])) for o in objs)):
        pos = dict(zip(objs, combo))
        if all(d.maps[m].table[pos[a]] == pos[b] for m, (a, b) in d.shape.morphisms.items()):
            out.append(tuple(d.spaces[o].points[i] for o, i in zip(objs, combo)))
    return out


def random_finite_diagram(rng: random.Random, max_objects=4, max_points=5, edge_prob=0.5):
    """Random functorial diagram: random DAG (edges go from lower to higher index)."""
    k = rng.randint(1, max_objects)
    names = [f"O{i}" for i in range(k)]
    spaces = {o: FiniteSpace.of_size(rng.randint(1, max_points), o) for o in names}
    edges = {}
    for i in range(k):
        for j in range(i + 1, k):
            if rng.random() < edge_prob:
                S, T = spaces[names[i]], spaces[names[j]]
                edges[f"e{i}{j}"] = (names[i], names[j],
                                     TableMap(S, T, tuple(rng.randrange(len(T)) for _ in range(len(S)))))
    return free_diagram(spaces, edges)


def all_families(n):
    """All up-closed nonempty families of nonempty subsets of range(n), as frozensets of masks."""
    subsets = list(range(1, 1 << n))
    out = []
    for bits in range(1, 1 << len(subsets)):
        fam = frozenset(s for i, s in enumerate(subsets) if bits >> i & 1)
        if all(t in fam for s in fam for t in subsets if t & s == s):
            out.append(fam)
    return out


def is_linked(fam) -> bool:
    return all(a & b for a in fam for b in fam)


def up_closure(n, sets):
    return frozenset(t for t in range(1, 1 << n) if any(t & s == s for s in sets))


def maximal_linked_families(n):
    """Linked up-families that no single added set (with its up-closure) keeps linked."""
    out = []
    for fam in all_families(n):
        if not is_linked(fam):
            continue
        if all(not is_linked(fam | up_closure(n, [s])) for s in range(1, 1 << n) if s not in fam):
            out.append(fam)
    return out


def image_mask(table, mask):
    out = 0
    for i, t in enumerate(table):
        if mask >> i & 1:
            out |= 1 << t
    return out
