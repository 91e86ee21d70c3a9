"""A small exact two-phase simplex solver.

Pivoting follows Bland's rule (smallest eligible column enters, smallest basic
index leaves on ratio ties), which terminates without cycling and makes every
run reproducible. The objective may be a list of cost vectors, in which case
the solver minimizes them lexicographically in a single run; this is how
callers obtain canonical optimal vertices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .rational import from_mpq, to_mpq

__all__ = ["LPError", "Infeasible", "Unbounded", "LPResult", "solve_lp", "is_feasible"]


class LPError(Exception):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


@dataclass(frozen=True)
class LPResult:
    values: tuple[Fraction, ...]
    x: tuple[Fraction, ...]

    @property
    def value(self) -> Fraction:
        return self.values[0]


def _pivot(T, objs, r, c):
    prow = T[r]
    p = prow[c]
    if p != 1:
        prow = [v / p for v in prow]
        T[r] = prow
    nz = [k for k, v in enumerate(prow) if v]
    for i, row in enumerate(T):
        if i != r:
            f = row[c]
            if f:
                for k in nz:
                    row[k] -= f * prow[k]
    for o in objs:
        f = o[c]
        if f:
            for k in nz:
                o[k] -= f * prow[k]


def _run(T, basis, objs, allowed):
    while True:
        enter = None
        for j in allowed:
            for o in objs:
                v = o[j]
                if v:
                    if v < 0:
                        enter = j
                    break
            if enter is not None:
                break
        if enter is None:
            return
        leave = None
        best = None
        for i, row in enumerate(T):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise Unbounded("objective unbounded below")
        _pivot(T, objs, leave, enter)
        basis[leave] = enter


def _is_lex(c) -> bool:
    return len(c) > 0 and isinstance(c[0], (list, tuple))


def solve_lp(
    c,
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    *,
    free: Sequence[int] = (),
    nvars: int | None = None,
) -> LPResult:
    """Minimize ``c @ x`` subject to ``A_eq x = b_eq``, ``A_ub x <= b_ub``.

    Variables are nonnegative unless listed in ``free``. ``c`` may be a list
    of cost vectors, minimized lexicographically. Raises :class:`Infeasible`
    or :class:`Unbounded`; otherwise returns the exact optimum and an optimal
    basic solution.
    """
    objectives = [list(v) for v in c] if _is_lex(c) else [list(c)]
    if nvars is None:
        nvars = len(objectives[0])
    for o in objectives:
        if len(o) != nvars:
            raise ValueError("objective length does not match variable count")
    free = sorted(set(free))
    free_set = set(free)

    # column layout: one column per variable, an extra (negative part) column per free variable
    col_of = []
    ncol = 0
    neg_col = {}
    for i in range(nvars):
        col_of.append(ncol)
        ncol += 1
    for i in free:
        neg_col[i] = ncol
        ncol += 1
    n_struct = ncol

    def expand(row):
        out = [to_mpq(0)] * n_struct
        for i, v in enumerate(row):
            if v:
                q = to_mpq(v)
                out[col_of[i]] = q
                if i in free_set:
                    out[neg_col[i]] = -q
        return out

    rows = []
    rhs = []
    kinds = []
    for row, b in zip(A_ub, b_ub):
        rows.append(expand(row))
        rhs.append(to_mpq(b))
        kinds.append("ub")
    for row, b in zip(A_eq, b_eq):
        rows.append(expand(row))
        rhs.append(to_mpq(b))
        kinds.append("eq")
    m = len(rows)
    n_slack = sum(1 for k in kinds if k == "ub")

    # slack columns follow the structural columns, artificials follow the slacks
    art_start = n_struct + n_slack
    T = []
    basis = []
    n_art = 0
    art_rows = []
    slack_idx = n_struct
    for i in range(m):
        row = rows[i] + [to_mpq(0)] * n_slack
        b = rhs[i]
        slack_col = None
        if kinds[i] == "ub":
            slack_col = slack_idx
            row[slack_col] = to_mpq(1)
            slack_idx += 1
        if b < 0:
            row = [-v for v in row]
            b = -b
        if slack_col is not None and row[slack_col] == 1:
            basis.append(slack_col)
        else:
            basis.append(None)
            art_rows.append(i)
            n_art += 1
        T.append(row + [b])
    total = art_start + n_art
    for i in range(m):
        T[i] = T[i][:-1] + [to_mpq(0)] * n_art + [T[i][-1]]
    for k, i in enumerate(art_rows):
        T[i][art_start + k] = to_mpq(1)
        basis[i] = art_start + k

    if n_art:
        o = [to_mpq(0)] * (total + 1)
        for i in art_rows:
            for k, v in enumerate(T[i]):
                if v:
                    o[k] -= v
        for i in art_rows:
            o[basis[i]] = to_mpq(0)
        _run(T, basis, [o], range(total))
        if -o[-1] > 0:
            raise Infeasible("no feasible point")
        drop = []
        for i in range(len(T)):
            if basis[i] >= art_start:
                for j in range(art_start):
                    if T[i][j] != 0:
                        _pivot(T, [], i, j)
                        basis[i] = j
                        break
                else:
                    drop.append(i)
        for i in reversed(drop):
            del T[i]
            del basis[i]

    objs = []
    for cvec in objectives:
        cost = expand(cvec) + [to_mpq(0)] * (total - n_struct)
        o = cost + [to_mpq(0)]
        for i, bj in enumerate(basis):
            cb = cost[bj]
            if cb:
                for k, v in enumerate(T[i]):
                    if v:
                        o[k] -= cb * v
        objs.append(o)
    _run(T, basis, objs, range(art_start))

    colval = [to_mpq(0)] * total
    for i, bj in enumerate(basis):
        colval[bj] = T[i][-1]
    x = []
    for i in range(nvars):
        v = colval[col_of[i]]
        if i in free_set:
            v = v - colval[neg_col[i]]
        x.append(from_mpq(v))
    values = tuple(from_mpq(-o[-1]) for o in objs)
    return LPResult(values=values, x=tuple(x))


def is_feasible(A_eq=(), b_eq=(), A_ub=(), b_ub=(), *, nvars: int, free=()) -> bool:
    try:
        solve_lp([0] * nvars, A_eq, b_eq, A_ub, b_ub, free=free, nvars=nvars)
    except Infeasible:
        return False
    return True
