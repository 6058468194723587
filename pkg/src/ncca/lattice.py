"""Periodic d-dimensional grids, von Neumann directions and overlap pairs.

Directions are ordered as ``-v_d, ..., -v_1, 0, v_1, ..., v_d``.  Every
neighborhood configuration, lookup table and recipe in the package uses this
order, so a direction's position in it is ``d + sign * axis``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache, total_ordering
from typing import Iterator, Sequence

from .errors import InvalidCell, InvalidDimension, InvalidPair

Cell = tuple[int, ...]

MIN_SIDE = 5


def _check_dim(d: int) -> None:
    if not isinstance(d, int) or d < 1:
        raise InvalidDimension(f"dimension must be a positive integer, got {d!r}")


@total_ordering
@dataclass(frozen=True)
class Direction:
    """A unit step along one axis, or the zero vector (``axis is None``)."""

    axis: int | None
    sign: int = 0

    def __post_init__(self):
        if self.axis is None:
            if self.sign != 0:
                raise ValueError("the zero direction carries no sign")
        elif self.axis < 1 or self.sign not in (1, -1):
            raise ValueError(f"bad direction axis={self.axis} sign={self.sign}")

    @classmethod
    def zero(cls) -> Direction:
        return cls(None, 0)

    @classmethod
    def of(cls, value: int) -> Direction:
        """Build from a signed axis number: ``3 -> v_3``, ``-1 -> -v_1``, ``0 -> 0``."""
        if value == 0:
            return cls.zero()
        return cls(abs(value), 1 if value > 0 else -1)

    @property
    def value(self) -> int:
        return 0 if self.axis is None else self.sign * self.axis

    @property
    def is_zero(self) -> bool:
        return self.axis is None

    def position(self, d: int) -> int:
        """Index of this direction in the canonical order for dimension ``d``."""
        return d + self.value

    def offset(self, d: int) -> Cell:
        vec = [0] * d
        if self.axis is not None:
            vec[self.axis - 1] = self.sign
        return tuple(vec)

    def __neg__(self) -> Direction:
        return Direction.of(-self.value)

    def __lt__(self, other: Direction) -> bool:
        return self.value < other.value

    def __str__(self) -> str:
        if self.axis is None:
            return "0"
        return f"{'+' if self.sign > 0 else '-'}v{self.axis}"


@dataclass(frozen=True)
class DirectionPair:
    """Unordered pair of directions; stored with ``first < second``.

    Valid pairs are those realising a two-cell overlap of neighborhoods: two
    directions on different axes, or the zero vector with one nonzero one.
    """

    first: Direction
    second: Direction

    def __post_init__(self):
        u, w = self.first, self.second
        if u.is_zero and w.is_zero:
            raise InvalidPair("{0, 0} is not an overlap pair")
        if not (u.is_zero or w.is_zero) and u.axis == w.axis:
            raise InvalidPair(f"{{{u}, {w}}} acts twice on axis {u.axis}")
        if not u < w:
            raise InvalidPair("pair must be stored in canonical order, use DirectionPair.of")

    @classmethod
    def of(cls, u: Direction | int, w: Direction | int) -> DirectionPair:
        u = u if isinstance(u, Direction) else Direction.of(u)
        w = w if isinstance(w, Direction) else Direction.of(w)
        if u == w:
            raise InvalidPair(f"{{{u}, {w}}} repeats a direction")
        return cls(*sorted((u, w)))

    @property
    def max_axis(self) -> int:
        return max(x.axis or 0 for x in (self.first, self.second))

    def __iter__(self) -> Iterator[Direction]:
        yield self.first
        yield self.second

    def __str__(self) -> str:
        return f"{{{self.first},{self.second}}}"


@dataclass(frozen=True)
class GridGeometry:
    """Torus with side lengths ``sides``; cells are row-major encoded."""

    sides: tuple[int, ...]

    def __post_init__(self):
        sides = tuple(int(n) for n in self.sides)
        object.__setattr__(self, "sides", sides)
        if not sides:
            raise InvalidDimension("a grid needs at least one axis")
        if any(n < MIN_SIDE for n in sides):
            raise InvalidDimension(f"every side must be at least {MIN_SIDE}, got {sides}")

    @classmethod
    def cube(cls, d: int, n: int) -> GridGeometry:
        _check_dim(d)
        return cls((n,) * d)

    @property
    def d(self) -> int:
        return len(self.sides)

    @property
    def size(self) -> int:
        out = 1
        for n in self.sides:
            out *= n
        return out

    def check(self, cell: Sequence[int]) -> Cell:
        cell = tuple(cell)
        if len(cell) != self.d or any(not 0 <= c < n for c, n in zip(cell, self.sides)):
            raise InvalidCell(f"{cell} is not a cell of a {self.sides} torus")
        return cell

    def encode(self, cell: Sequence[int]) -> int:
        idx = 0
        for c, n in zip(self.check(cell), self.sides):
            idx = idx * n + c
        return idx

    def decode(self, idx: int) -> Cell:
        if not 0 <= idx < self.size:
            raise InvalidCell(f"cell index {idx} out of range")
        out = []
        for n in reversed(self.sides):
            idx, c = divmod(idx, n)
            out.append(c)
        return tuple(reversed(out))

    def cells(self) -> Iterator[Cell]:
        return itertools.product(*(range(n) for n in self.sides))

    def translate(self, cell: Sequence[int], vec: Sequence[int]) -> Cell:
        return tuple((c + v) % n for c, v, n in zip(cell, vec, self.sides))


@dataclass(frozen=True)
class PairCatalog:
    omega: frozenset[DirectionPair]
    lam: frozenset[DirectionPair]


@lru_cache(maxsize=None)
def directions(d: int) -> tuple[Direction, ...]:
    """All ``2d+1`` directions in canonical order."""
    _check_dim(d)
    return tuple(Direction.of(k) for k in range(-d, d + 1))


@lru_cache(maxsize=None)
def omega(d: int) -> frozenset[DirectionPair]:
    """The ``2d^2`` pairs ``{u, w}`` for which ``i+u+w`` shares two cells with ``i``."""
    _check_dim(d)
    dirs = directions(d)
    return frozenset(
        DirectionPair.of(u, w)
        for u, w in itertools.combinations(dirs, 2)
        if (u.is_zero or w.is_zero) or u.axis != w.axis
    )


def matching(p: DirectionPair, d: int | None = None) -> DirectionPair:
    """``{u, w} -> {-u, -w}``."""
    if d is not None and (p.max_axis > d):
        raise InvalidPair(f"{p} is not an overlap pair in dimension {d}")
    return DirectionPair.of(-p.first, -p.second)


def _lowest_axis_positive(p: DirectionPair) -> bool:
    nonzero = sorted((x for x in p if not x.is_zero), key=lambda x: x.axis)
    return nonzero[0].sign > 0


@lru_cache(maxsize=None)
def lambda_canonical(d: int) -> tuple[DirectionPair, ...]:
    """One representative per matching class: the pair whose lowest-axis step is positive.

    For ``d = 1, 2`` this reproduces the usual textbook choice
    (``{0, v1}`` and ``{0,v1}, {0,v2}, {v1,v2}, {v1,-v2}``).  Returned sorted.
    """
    return tuple(sorted((p for p in omega(d) if _lowest_axis_positive(p)), key=pair_key))


def pair_key(p: DirectionPair) -> tuple[int, int]:
    return (p.first.value, p.second.value)


def matching_classes(d: int) -> list[tuple[DirectionPair, DirectionPair]]:
    """``(representative, match)`` for each canonical representative."""
    return [(p, matching(p)) for p in lambda_canonical(d)]


def lambda_selections(d: int) -> Iterator[tuple[DirectionPair, ...]]:
    """Every one of the ``2^(d^2)`` possible selections, canonical one first."""
    classes = matching_classes(d)
    for flips in itertools.product((False, True), repeat=len(classes)):
        yield tuple(sorted((m if f else p for (p, m), f in zip(classes, flips)), key=pair_key))


def pair_catalog(d: int) -> PairCatalog:
    return PairCatalog(omega(d), frozenset(lambda_canonical(d)))


def neighbor(cell: Sequence[int], v: Direction, g: GridGeometry) -> Cell:
    cell = g.check(cell)
    if v.axis is not None and v.axis > g.d:
        raise InvalidCell(f"direction {v} does not exist on a {g.d}-dimensional grid")
    return g.translate(cell, v.offset(g.d))


def neighborhood_cells(cell: Sequence[int], g: GridGeometry) -> frozenset[Cell]:
    """P(i): the cell and its 2d axis-adjacent cells."""
    return frozenset(neighbor(cell, v, g) for v in directions(g.d))


def _displacement(i: Cell, j: Cell, g: GridGeometry) -> list[int]:
    # sides >= 5 make the representative in (-n/2, n/2] unique for |delta| <= 2
    out = []
    for a, b, n in zip(i, j, g.sides):
        delta = (b - a) % n
        if delta > n // 2:
            delta -= n
        out.append(delta)
    return out


def overlap(i: Sequence[int], j: Sequence[int], g: GridGeometry) -> frozenset[Cell]:
    """P(i) & P(j), computed from the displacement ``j - i`` case by case."""
    i, j = g.check(i), g.check(j)
    delta = _displacement(i, j, g)
    support = [(k, s) for k, s in enumerate(delta) if s != 0]
    if not support:
        return neighborhood_cells(i, g)
    if len(support) == 1:
        k, s = support[0]
        step = Direction(k + 1, 1 if s > 0 else -1)
        if abs(s) == 1:
            return frozenset({i, j})
        if abs(s) == 2:
            return frozenset({neighbor(i, step, g)})
        return frozenset()
    if len(support) == 2 and all(abs(s) == 1 for _, s in support):
        (k1, s1), (k2, s2) = support
        return frozenset({neighbor(i, Direction(k1 + 1, s1), g), neighbor(i, Direction(k2 + 1, s2), g)})
    return frozenset()


def overlap_pair(i: Sequence[int], j: Sequence[int], g: GridGeometry) -> DirectionPair | None:
    """The unique ``{u, w}`` in omega with ``j = i + u + w``, if any."""
    i, j = g.check(i), g.check(j)
    delta = _displacement(i, j, g)
    support = [(k, s) for k, s in enumerate(delta) if s != 0]
    if any(abs(s) != 1 for _, s in support):
        return None
    if len(support) == 1:
        (k, s), = support
        return DirectionPair.of(0, s * (k + 1))
    if len(support) == 2:
        (k1, s1), (k2, s2) = support
        return DirectionPair.of(s1 * (k1 + 1), s2 * (k2 + 1))
    return None
