"""Finite discrete spaces, table maps and rational probability measures."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Sequence

from .rational import Q, fmt_vec

__all__ = ["FiniteSpace", "TableMap", "Measure", "BaseMismatch", "l1_distance"]


class BaseMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=True)
class FiniteSpace:
    """A finite discrete space. Points are arbitrary hashable payloads."""

    points: tuple
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise ValueError("finite spaces need at least one point")
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate points in finite space")

    @classmethod
    def of_size(cls, n: int, label: str = "") -> "FiniteSpace":
        return cls(tuple(str(i + 1) for i in range(n)), label)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @cached_property
    def _index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    def index(self, p) -> int:
        return self._index[p]

    def __contains__(self, p) -> bool:
        return p in self._index

    def test_points(self):
        return self.points


@dataclass(frozen=True)
class TableMap:
    """Total function between finite spaces, stored as target indices."""

    source: FiniteSpace
    target: FiniteSpace
    table: tuple

    def __post_init__(self):
        t = tuple(int(v) for v in self.table)
        object.__setattr__(self, "table", t)
        if len(t) != len(self.source):
            raise ValueError("table map must be total on its source")
        if any(not 0 <= v < len(self.target) for v in t):
            raise ValueError("table map value outside target")

    @classmethod
    def from_function(cls, source, target, fn) -> "TableMap":
        return cls(source, target, tuple(target.index(fn(p)) for p in source.points))

    @classmethod
    def identity(cls, space: FiniteSpace) -> "TableMap":
        return cls(space, space, tuple(range(len(space))))

    def __call__(self, p):
        return self.target.points[self.table[self.source.index(p)]]

    def compose(self, inner: "TableMap") -> "TableMap":
        if inner.target != self.source:
            raise ValueError("maps are not composable")
        return TableMap(inner.source, self.target, tuple(self.table[i] for i in inner.table))


@dataclass(frozen=True)
class Measure:
    """Probability vector on a finite space (exact, sums to 1)."""

    base: FiniteSpace
    weights: tuple

    def __post_init__(self):
        w = tuple(Q(v) for v in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) != len(self.base):
            raise BaseMismatch("weight vector length differs from base size")
        if any(v < 0 for v in w):
            raise ValueError("negative weight")
        if sum(w) != 1:
            raise ValueError(f"weights sum to {sum(w)}, not 1")

    @classmethod
    def uniform(cls, base: FiniteSpace) -> "Measure":
        n = len(base)
        return cls(base, (Fraction(1, n),) * n)

    @classmethod
    def point_mass(cls, base: FiniteSpace, p: Any) -> "Measure":
        i = base.index(p)
        return cls(base, tuple(Fraction(int(j == i)) for j in range(len(base))))

    def __getitem__(self, p) -> Fraction:
        return self.weights[self.base.index(p)]

    def support(self) -> list:
        return [p for p, w in zip(self.base.points, self.weights) if w]

    def to_json(self) -> dict:
        return {"points": [str(p) for p in self.base.points], "weights": fmt_vec(self.weights)}


def l1_distance(mu: Measure, nu: Measure) -> Fraction:
    if mu.base != nu.base:
        raise BaseMismatch("measures live on different spaces")
    return sum((abs(a - b) for a, b in zip(mu.weights, nu.weights)), Fraction(0))


def l1(u: Sequence, v: Sequence) -> Fraction:
    return sum((abs(a - b) for a, b in zip(u, v)), Fraction(0))
