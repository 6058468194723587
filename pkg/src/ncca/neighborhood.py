"""State sets and neighborhood configurations.

A neighborhood configuration is a tuple of ``2d+1`` states in canonical
direction order.  Its lookup-table index is the base-``|Q|`` number whose
digits are the ranks of the states, first direction most significant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidConfig, InvalidPair, InvalidState
from .lattice import Direction, DirectionPair, directions, omega


@dataclass(frozen=True)
class StateSet:
    """Finite set of integer states containing 0 and at least one nonzero state."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(a >= b for a, b in zip(vals, vals[1:])):
            raise InvalidState(f"states must be strictly ascending, got {vals}")
        if 0 not in vals:
            raise InvalidState("the state set must contain 0")
        if len(vals) < 2:
            raise InvalidState("the state set needs a nonzero state")

    @classmethod
    def upto(cls, qstar: int) -> StateSet:
        """``{0, 1, ..., qstar}``."""
        return cls(tuple(range(qstar + 1)))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __contains__(self, q) -> bool:
        return q in self._lookup

    @property
    def _lookup(self) -> dict[int, int]:
        return _rank_map(self.values)

    @property
    def positive(self) -> tuple[int, ...]:
        """Q+ = Q minus {0}, ascending."""
        return tuple(q for q in self.values if q != 0)

    @property
    def is_contiguous(self) -> bool:
        return self.values == tuple(range(self.values[0], self.values[-1] + 1))

    @property
    def low(self) -> int:
        return self.values[0]

    @property
    def high(self) -> int:
        return self.values[-1]

    def rank(self, q: int) -> int:
        try:
            return self._lookup[q]
        except KeyError:
            raise InvalidState(f"{q} is not in {self.values}") from None

    def ranks(self, arr) -> np.ndarray:
        """Vectorised :meth:`rank`; raises on any value outside the set."""
        arr = np.asarray(arr)
        vals = np.asarray(self.values)
        r = np.searchsorted(vals, arr)
        r = np.clip(r, 0, len(vals) - 1)
        if not np.array_equal(vals[r], arr):
            raise InvalidState(f"values outside {self.values}")
        return r

    def contains_all(self, arr) -> bool:
        return bool(np.isin(np.asarray(arr), self.values).all())

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.values)) + "}"


@lru_cache(maxsize=None)
def _rank_map(values: tuple[int, ...]) -> dict[int, int]:
    return {q: r for r, q in enumerate(values)}


@dataclass(frozen=True)
class NeighborhoodConfig:
    states: tuple[int, ...]

    def __post_init__(self):
        states = tuple(int(s) for s in self.states)
        object.__setattr__(self, "states", states)
        if len(states) % 2 != 1:
            raise InvalidConfig("a neighborhood has an odd number (2d+1) of entries")

    @property
    def d(self) -> int:
        return len(self.states) // 2

    def __getitem__(self, v: Direction) -> int:
        return self.states[v.position(self.d)]

    def at(self, v: Direction | int) -> int:
        v = v if isinstance(v, Direction) else Direction.of(v)
        return self[v]

    def support(self) -> tuple[Direction, ...]:
        return tuple(v for v, q in zip(directions(self.d), self.states) if q != 0)

    @property
    def is_trivial(self) -> bool:
        return not any(self.states)

    @property
    def is_monomer(self) -> bool:
        return len(self.support()) <= 1

    @property
    def is_dimer(self) -> bool:
        sup = self.support()
        if len(sup) != 2:
            return False
        try:
            return DirectionPair.of(*sup) in omega(self.d)
        except InvalidPair:
            return False

    @property
    def is_homogeneous(self) -> bool:
        return len(set(self.states)) == 1

    def classify(self) -> str:
        """Most specific of ``trivial``, ``monomer``, ``dimer``, ``other``."""
        if self.is_trivial:
            return "trivial"
        if self.is_monomer:
            return "monomer"
        if self.is_dimer:
            return "dimer"
        return "other"

    def __str__(self) -> str:
        return "".join(map(str, self.states)) if all(0 <= s < 10 for s in self.states) else str(self.states)


def _check_state(q: int, Q: StateSet | None) -> None:
    if Q is not None and q not in Q:
        raise InvalidState(f"{q} is not in {Q}")


def monomer(v: Direction | int, q: int, d: int, Q: StateSet | None = None) -> NeighborhoodConfig:
    """``M_{v:q}``: state ``q`` in direction ``v``, zero elsewhere."""
    v = v if isinstance(v, Direction) else Direction.of(v)
    _check_state(q, Q)
    states = [0] * (2 * d + 1)
    states[v.position(d)] = q
    return NeighborhoodConfig(tuple(states))


def dimer(pair: DirectionPair, p: int, q: int, d: int, Q: StateSet | None = None) -> NeighborhoodConfig:
    """``D_{first:p, second:q}``."""
    if pair not in omega(d):
        raise InvalidPair(f"{pair} is not an overlap pair in dimension {d}")
    _check_state(p, Q)
    _check_state(q, Q)
    states = [0] * (2 * d + 1)
    states[pair.first.position(d)] = p
    states[pair.second.position(d)] = q
    return NeighborhoodConfig(tuple(states))


def placed(assignment: dict[Direction, int], d: int) -> NeighborhoodConfig:
    """Configuration with the given states at the given directions, zero elsewhere."""
    states = [0] * (2 * d + 1)
    for v, q in assignment.items():
        states[v.position(d)] = q
    return NeighborhoodConfig(tuple(states))


def homogeneous(q: int, d: int, Q: StateSet | None = None) -> NeighborhoodConfig:
    _check_state(q, Q)
    return NeighborhoodConfig((q,) * (2 * d + 1))


def n_configs(d: int, Q: StateSet) -> int:
    return len(Q) ** (2 * d + 1)


def index_of(N: NeighborhoodConfig | Sequence[int], Q: StateSet) -> int:
    states = N.states if isinstance(N, NeighborhoodConfig) else tuple(N)
    idx = 0
    base = len(Q)
    for s in states:
        idx = idx * base + Q.rank(s)
    return idx


def config_at(index: int, d: int, Q: StateSet) -> NeighborhoodConfig:
    total = n_configs(d, Q)
    if not 0 <= index < total:
        raise InvalidConfig(f"index {index} outside 0..{total - 1}")
    base = len(Q)
    digits = []
    for _ in range(2 * d + 1):
        index, r = divmod(index, base)
        digits.append(Q.values[r])
    return NeighborhoodConfig(tuple(reversed(digits)))


@lru_cache(maxsize=None)
def config_table(d: int, Q: StateSet) -> np.ndarray:
    """All configurations as an ``(|Q|^(2d+1), 2d+1)`` array; row ``r`` is ``config_at(r)``."""
    base = len(Q)
    width = 2 * d + 1
    idx = np.arange(base**width)
    powers = base ** np.arange(width - 1, -1, -1)
    ranks = (idx[:, None] // powers[None, :]) % base
    table = np.asarray(Q.values)[ranks]
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def place_values(d: int, Q: StateSet) -> np.ndarray:
    """Weight of each canonical position in the lookup index."""
    width = 2 * d + 1
    return len(Q) ** np.arange(width - 1, -1, -1)


def indices_of(rows, Q: StateSet) -> np.ndarray:
    """Vectorised :func:`index_of` over the last axis of ``rows``."""
    ranks = Q.ranks(rows)
    d = (ranks.shape[-1] - 1) // 2
    return ranks @ place_values(d, Q)


def iter_configs(d: int, Q: StateSet) -> Iterable[NeighborhoodConfig]:
    for row in config_table(d, Q):
        yield NeighborhoodConfig(tuple(int(s) for s in row))


def extract(x, i) -> NeighborhoodConfig:
    """Neighborhood of cell ``i`` in configuration ``x``: entry ``v`` is ``x(i+v)``."""
    g = x.geometry
    cell = g.check(i)
    grid = x.grid
    return NeighborhoodConfig(
        tuple(int(grid[g.translate(cell, v.offset(g.d))]) for v in directions(g.d))
    )
