"""Split functions: every state splits among the neighborhood by a fixed recipe.

A split function is stored as one recipe per nonzero state ``q``: the tuple
``(h(M_{v:q}))_v`` in canonical direction order.  Its value on any
neighborhood is the sum of the recipe entries picked out by the neighborhood's
states.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb, prod
from typing import Iterator

import numpy as np

from .errors import InvalidConfig, InvalidState, Unsupported
from .lattice import Direction, directions
from .localfn import LocalFunction
from .neighborhood import NeighborhoodConfig, StateSet, config_table, monomer


@dataclass(frozen=True)
class SplitFunction:
    d: int
    Q: StateSet
    recipes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        recipes = tuple(tuple(int(x) for x in r) for r in self.recipes)
        object.__setattr__(self, "recipes", recipes)
        if len(recipes) != len(self.Q.positive):
            raise InvalidConfig(f"need one recipe per state in {self.Q.positive}")
        for q, r in zip(self.Q.positive, recipes):
            if len(r) != 2 * self.d + 1:
                raise InvalidConfig(f"recipe for {q} must have {2 * self.d + 1} entries")
            if any(x not in self.Q for x in r):
                raise InvalidState(f"recipe {r} for state {q} leaves the state set")
            if sum(r) != q:
                raise InvalidState(f"recipe {r} does not sum to {q}")

    def recipe(self, q: int) -> tuple[int, ...]:
        if q == 0:
            return (0,) * (2 * self.d + 1)
        return self.recipes[self.Q.positive.index(q)]

    def monomer_value(self, v: Direction, q: int) -> int:
        """``h(M_{v:q})``."""
        return self.recipe(q)[v.position(self.d)]

    def __call__(self, N: NeighborhoodConfig) -> int:
        return split_eval(self, N)

    def __str__(self) -> str:
        parts = ["".join(map(str, r)) if max(r) < 10 else str(r) for r in self.recipes]
        return "/".join(parts)


def compositions(q: int, parts: int, Q: StateSet) -> list[tuple[int, ...]]:
    """All ``parts``-tuples over ``Q`` summing to ``q``, in lexicographic order."""
    values = Q.values

    def build(remaining: int, slots: int) -> Iterator[tuple[int, ...]]:
        if slots == 0:
            if remaining == 0:
                yield ()
            return
        for x in values:
            # states may be negative in exotic sets, so no early break on x > remaining
            for rest in build(remaining - x, slots - 1):
                yield (x, *rest)

    if all(v >= 0 for v in values):
        return _nonneg_compositions(q, parts, values)
    return list(build(q, parts))


@lru_cache(maxsize=None)
def _nonneg_compositions(q: int, parts: int, values: tuple[int, ...]) -> list[tuple[int, ...]]:
    if parts == 0:
        return [()] if q == 0 else []
    out = []
    for x in values:
        if x > q:
            break
        out.extend((x, *rest) for rest in _nonneg_compositions(q - x, parts - 1, values))
    return out


def count_splits(d: int, Q: StateSet | int) -> int:
    """Number of split functions; closed form for ``{0..q*}``."""
    if isinstance(Q, int):
        Q = StateSet.upto(Q)
    if Q.is_contiguous and Q.low == 0:
        return prod(comb(2 * d + q, q) for q in Q.positive)
    return prod(len(compositions(q, 2 * d + 1, Q)) for q in Q.positive)


def enumerate_splits(d: int, Q: StateSet) -> Iterator[SplitFunction]:
    """Lexicographic stream over recipes, state ``1``'s recipe varying slowest."""
    per_state = [compositions(q, 2 * d + 1, Q) for q in Q.positive]
    for recipes in itertools.product(*per_state):
        yield SplitFunction(d, Q, recipes)


def split_eval(h: SplitFunction, N: NeighborhoodConfig) -> int:
    if N.d != h.d:
        raise InvalidConfig("dimension mismatch")
    return sum(h.monomer_value(v, q) for v, q in zip(directions(h.d), N.states) if q != 0)


def contribution_matrix(h: SplitFunction) -> np.ndarray:
    """``M[rank(q), position(v)] = h(M_{v:q})``; the zero row is the implicit recipe."""
    return np.array([h.recipe(q) for q in h.Q.values], dtype=np.int64)


def split_to_lut(h: SplitFunction) -> LocalFunction:
    rows = config_table(h.d, h.Q)
    ranks = h.Q.ranks(rows)
    contrib = contribution_matrix(h)
    cols = np.arange(2 * h.d + 1)
    return LocalFunction(h.d, h.Q, contrib[ranks, cols].sum(axis=1))


def split_from_monomers(f: LocalFunction) -> SplitFunction:
    """Read recipes off a local function's monomer values (raises if they are not a split)."""
    recipes = tuple(
        tuple(int(f(monomer(v, q, f.d))) for v in directions(f.d)) for q in f.Q.positive
    )
    return SplitFunction(f.d, f.Q, recipes)


def split_label(h: SplitFunction) -> tuple[str, str]:
    """Digit strings of the recipes for states 1 and 2, canonical slot order."""
    if h.Q.values != (0, 1, 2):
        raise Unsupported("labels are defined for the state set {0,1,2}")
    return tuple("".join(map(str, r)) for r in h.recipes)


def split_from_label(d: int, Q: StateSet, labels) -> SplitFunction:
    return SplitFunction(d, Q, tuple(tuple(int(c) for c in s) for s in labels))
