"""The hyperspace functors exp, G and lambda on finite discrete spaces.

Subsets of an ``n``-point space are bitmasks over point indices. Families of
subsets are stored by their minimal generators (an antichain); the family
itself is the up-closure of the generators among nonempty subsets.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .spaces import TableMap

__all__ = [
    "EnumerationTooLarge",
    "DiscreteSubset",
    "UpFamily",
    "exp_space",
    "exp_map",
    "G_space",
    "lambda_space",
    "G_map",
    "ENUMERATION_BOUND",
    "preimage_exp",
    "preimage_G",
    "preimage_lambda",
]

ENUMERATION_BOUND = 5


class EnumerationTooLarge(ValueError):
    pass


def _elements(mask: int) -> tuple:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _key(mask: int):
    return (bin(mask).count("1"), _elements(mask))


@dataclass(frozen=True, order=False)
class DiscreteSubset:
    n: int
    mask: int

    def __post_init__(self):
        if self.mask <= 0 or self.mask >= 1 << self.n:
            raise ValueError("subset must be nonempty and inside the base")

    @classmethod
    def of(cls, n: int, elements: Iterable[int]) -> "DiscreteSubset":
        m = 0
        for e in elements:
            m |= 1 << e
        return cls(n, m)

    @property
    def elements(self) -> tuple:
        return _elements(self.mask)

    def __lt__(self, other):
        return _key(self.mask) < _key(other.mask)

    def __str__(self):
        return "{" + ",".join(str(e + 1) for e in self.elements) + "}"


def _minimal(masks: Iterable[int]) -> tuple:
    ms = sorted(set(masks), key=_key)
    keep = []
    for m in ms:
        if not any(k & m == k for k in keep):
            keep.append(m)
    return tuple(keep)


@dataclass(frozen=True)
class UpFamily:
    """Up-closed family of nonempty subsets, given by minimal generators."""

    n: int
    generators: tuple

    def __post_init__(self):
        gens = _minimal(self.generators)
        if not gens:
            raise ValueError("families must be nonempty")
        if any(g <= 0 or g >= 1 << self.n for g in gens):
            raise ValueError("generator outside the base")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def of(cls, n: int, sets: Iterable[Iterable[int]]) -> "UpFamily":
        return cls(n, tuple(DiscreteSubset.of(n, s).mask for s in sets))

    @classmethod
    def principal(cls, n: int, elements: Iterable[int]) -> "UpFamily":
        return cls.of(n, [elements])

    def contains(self, mask: int) -> bool:
        return any(g & mask == g for g in self.generators)

    def members(self) -> list[int]:
        return [m for m in range(1, 1 << self.n) if self.contains(m)]

    @cached_property
    def is_linked(self) -> bool:
        gs = self.generators
        return all(a & b for i, a in enumerate(gs) for b in gs[i:])

    @cached_property
    def is_maximal_linked(self) -> bool:
        """Exhaustive check: no subset outside the family meets every generator."""
        if not self.is_linked:
            return False
        for m in range(1, 1 << self.n):
            if not self.contains(m) and all(m & g for g in self.generators):
                return False
        return True

    def __lt__(self, other):
        return [_key(g) for g in self.generators] < [_key(g) for g in other.generators]

    def __str__(self):
        return "<" + " ".join(str(DiscreteSubset(self.n, g)) for g in self.generators) + ">"


def _check_bound(n, bound):
    if n < 1:
        raise ValueError("n must be positive")
    if n > bound:
        raise EnumerationTooLarge(f"n={n} exceeds enumeration bound {bound}")


def exp_space(n: int) -> list[DiscreteSubset]:
    """All ``2**n - 1`` nonempty subsets in canonical (size, lexicographic) order."""
    if n < 1:
        raise ValueError("n must be positive")
    return sorted(DiscreteSubset(n, m) for m in range(1, 1 << n))


def _image_mask(table: Sequence[int], mask: int) -> int:
    out = 0
    for e in _elements(mask):
        out |= 1 << table[e]
    return out


def exp_map(f: TableMap):
    """Direct-image action of ``f`` on nonempty subsets."""
    n_out = len(f.target)

    def act(S: DiscreteSubset) -> DiscreteSubset:
        return DiscreteSubset(n_out, _image_mask(f.table, S.mask))

    return act


def _antichains(n: int):
    subsets = sorted(range(1, 1 << n), key=_key)
    chosen: list[int] = []

    def rec(start):
        for i in range(start, len(subsets)):
            s = subsets[i]
            # candidates come in nondecreasing size, so only s ⊇ chosen can fail
            if any(c & s == c for c in chosen):
                continue
            chosen.append(s)
            yield tuple(chosen)
            yield from rec(i + 1)
            chosen.pop()

    yield from rec(0)


def G_space(n: int, bound: int = ENUMERATION_BOUND) -> list[UpFamily]:
    """All nonempty up-closed families of nonempty subsets of an ``n``-point space."""
    _check_bound(n, bound)
    return sorted(UpFamily(n, a) for a in _antichains(n))


def lambda_space(n: int, bound: int = ENUMERATION_BOUND) -> list[UpFamily]:
    """All maximal linked systems on an ``n``-point space."""
    return [F for F in G_space(n, bound) if F.is_maximal_linked]


def G_map(f: TableMap):
    """Up-closure of generator images. Sends maximal linked systems to maximal linked systems."""
    n_out = len(f.target)

    def act(F: UpFamily) -> UpFamily:
        return UpFamily(n_out, tuple(_image_mask(f.table, g) for g in F.generators))

    return act


# preimages under characteristic maps; every candidate below is the largest
# possible preimage, so a miss is a proof that none exists


def _pullback_mask(carrier_tables, values_masks, size):
    out = 0
    for k in range(size):
        if all((vm >> t[k]) & 1 for t, vm in zip(carrier_tables, values_masks)):
            out |= 1 << k
    return out


def preimage_exp(projections: Sequence[TableMap], target: Sequence[DiscreteSubset]):
    """A subset of the limit carrier mapping onto ``target``, or ``None``.

    ``S* = {x : x_A in S_A for all A}`` contains every preimage, so a preimage
    exists iff ``S*`` itself projects onto each ``S_A``.
    """
    size = len(projections[0].source)
    tables = [p.table for p in projections]
    star = _pullback_mask(tables, [t.mask for t in target], size)
    if not star:
        return None
    for t, S in zip(tables, target):
        if _image_mask(t, star) != S.mask:
            return None
    return DiscreteSubset(size, star)


def _star_members(projections, target: Sequence[UpFamily]):
    size = len(projections[0].source)
    tables = [p.table for p in projections]
    return size, tables, [m for m in range(1, 1 << size)
                          if all(F.contains(_image_mask(t, m)) for t, F in zip(tables, target))]


def preimage_G(projections: Sequence[TableMap], target: Sequence[UpFamily], max_carrier: int = 16):
    """Largest family ``{B : pi_A(B) in F_A for all A}``; returned iff it maps onto the target."""
    size = len(projections[0].source)
    if size > max_carrier:
        raise EnumerationTooLarge(f"limit carrier of size {size} exceeds {max_carrier}")
    size, tables, members = _star_members(projections, target)
    if not members:
        return None
    fam = UpFamily(size, tuple(members))
    for t, F in zip(tables, target):
        if UpFamily(F.n, tuple(_image_mask(t, g) for g in fam.generators)) != F:
            return None
    return fam


def preimage_lambda(projections: Sequence[TableMap], target: Sequence[UpFamily], max_carrier: int = 10):
    """A maximal linked system on the carrier mapping onto ``target``, or ``None``.

    Images of maximal linked systems are maximal linked, and every preimage
    lies inside the largest candidate family, so it suffices to find any
    maximal linked system inside that family. Maximal linked systems pick
    exactly one set from each complementary pair; the search backtracks over
    those choices with up-closure propagation.
    """
    size = len(projections[0].source)
    if size > max_carrier:
        raise EnumerationTooLarge(f"limit carrier of size {size} exceeds {max_carrier}")
    size, tables, members = _star_members(projections, target)
    allowed = set(members)
    full = (1 << size) - 1
    pairs = sorted({min(m, full ^ m) for m in range(1, full)}, key=_key)
    if size == 1:
        return UpFamily(1, (1,)) if 1 in allowed else None
    chosen: list[int] = []

    def consistent(m):
        return m in allowed and all(m & c for c in chosen)

    def rec(i):
        if i == len(pairs):
            return True
        s = pairs[i]
        for m in (s, full ^ s):
            if consistent(m):
                chosen.append(m)
                if rec(i + 1):
                    return True
                chosen.pop()
        return False

    if full not in allowed or not rec(0):
        return None
    fam = UpFamily(size, tuple(chosen) + (full,))
    return fam if fam.is_maximal_linked else None
