"""Exact Gaussian elimination over the rationals (mpq kernels)."""
from __future__ import annotations

from .rational import to_mpq


def _mat(rows):
    return [[to_mpq(v) for v in row] for row in rows]


def rref(rows, ncols):
    """Reduced row echelon form. Returns ``(R, pivots)``; zero rows dropped."""
    M = _mat(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(M)):
            if M[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][c]
        M[r] = [v / p for v in M[r]]
        prow = M[r]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(rows, ncols) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols):
    """Basis of ``{x : rows @ x = 0}`` as a list of mpq vectors."""
    R, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [to_mpq(0)] * ncols
        v[f] = to_mpq(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def solve_affine(A, b, ncols):
    """Solve ``A x = b``.

    Returns ``(x0, N)`` with ``x0`` a particular solution and ``N`` a
    nullspace basis, or ``None`` when the system is inconsistent.
    """
    if not A:
        zero = to_mpq(0)
        return [zero] * ncols, nullspace([], ncols)
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    R, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x0 = [to_mpq(0)] * ncols
    for row, pc in zip(R, pivots):
        x0[pc] = row[ncols]
    coeff_rows = [row[:ncols] for row in R]
    return x0, nullspace(coeff_rows, ncols) if coeff_rows else nullspace([], ncols)


def solve_square(A, b):
    """Unique solution of a square system, or ``None`` if singular."""
    n = len(A)
    sol = solve_affine(A, b, n)
    if sol is None or sol[1]:
        return None
    return sol[0]
