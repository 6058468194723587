"""Local functions as dense integer lookup tables, and their global action."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InvalidConfig, InvalidRule, Unsupported
from .lattice import Direction, GridGeometry, directions
from .neighborhood import (
    NeighborhoodConfig,
    StateSet,
    config_table,
    homogeneous,
    index_of,
    monomer,
    n_configs,
)


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.int64)
    out.setflags(write=False)
    return out


class LocalFunction:
    """Integer-valued function on all ``|Q|^(2d+1)`` neighborhood configurations."""

    __slots__ = ("d", "Q", "table", "_key")

    def __init__(self, d: int, Q: StateSet, table):
        table = _frozen(table)
        if table.shape != (n_configs(d, Q),):
            raise InvalidConfig(f"table must have {n_configs(d, Q)} entries, got {table.shape}")
        self.d = d
        self.Q = Q
        self.table = table
        self._key = None

    @property
    def is_rule(self) -> bool:
        return within_states(self.Q, self.table)

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.d, self.Q.values, self.table.tobytes())
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalFunction) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __add__(self, other: LocalFunction) -> LocalFunction:
        self._compatible(other)
        return LocalFunction(self.d, self.Q, self.table + other.table)

    def __sub__(self, other: LocalFunction) -> LocalFunction:
        self._compatible(other)
        return LocalFunction(self.d, self.Q, self.table - other.table)

    def __rmul__(self, k: int) -> LocalFunction:
        return LocalFunction(self.d, self.Q, int(k) * self.table)

    def __neg__(self) -> LocalFunction:
        return LocalFunction(self.d, self.Q, -self.table)

    def _compatible(self, other: LocalFunction) -> None:
        if (self.d, self.Q) != (other.d, other.Q):
            raise InvalidConfig("local functions live on different neighborhoods")

    def __call__(self, N: NeighborhoodConfig | Sequence[int]) -> int:
        return eval_local(self, N)

    def __repr__(self) -> str:
        return f"LocalFunction(d={self.d}, Q={self.Q}, table=[{len(self.table)} entries])"


def within_states(Q: StateSet, arr) -> bool:
    arr = np.asarray(arr)
    if Q.is_contiguous:
        return bool(arr.size == 0 or (arr.min() >= Q.low and arr.max() <= Q.high))
    return Q.contains_all(arr)


def eval_local(f: LocalFunction, N: NeighborhoodConfig | Sequence[int]) -> int:
    states = N.states if isinstance(N, NeighborhoodConfig) else tuple(N)
    if len(states) != 2 * f.d + 1:
        raise InvalidConfig(f"expected {2 * f.d + 1} entries, got {len(states)}")
    try:
        return int(f.table[index_of(states, f.Q)])
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from None


def from_function(d: int, Q: StateSet, fn) -> LocalFunction:
    """Tabulate ``fn(NeighborhoodConfig) -> int`` over every configuration."""
    rows = config_table(d, Q)
    return LocalFunction(d, Q, [fn(NeighborhoodConfig(tuple(int(s) for s in r))) for r in rows])


def identity_rule(d: int, Q: StateSet) -> LocalFunction:
    return LocalFunction(d, Q, config_table(d, Q)[:, d])


def shift_rule(v: Direction | int, d: int, Q: StateSet) -> LocalFunction:
    """``f(N) = N(v)``: every state moves one cell along ``-v``."""
    v = v if isinstance(v, Direction) else Direction.of(v)
    return LocalFunction(d, Q, config_table(d, Q)[:, v.position(d)])


class Configuration:
    """Assignment of an integer to every cell of a torus (row-major)."""

    __slots__ = ("geometry", "cells")

    def __init__(self, geometry: GridGeometry, cells):
        cells = _frozen(np.asarray(cells).reshape(-1))
        if cells.shape != (geometry.size,):
            raise InvalidConfig(f"expected {geometry.size} cells, got {cells.size}")
        self.geometry = geometry
        self.cells = cells

    @property
    def grid(self) -> np.ndarray:
        return self.cells.reshape(self.geometry.sides)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Configuration)
            and self.geometry == other.geometry
            and np.array_equal(self.cells, other.cells)
        )

    def __hash__(self) -> int:
        return hash((self.geometry, self.cells.tobytes()))

    def __repr__(self) -> str:
        return f"Configuration(sides={self.geometry.sides}, cells={self.cells.tolist()})"

    def shifted(self, vec: Sequence[int]) -> Configuration:
        """Cyclic translation: the result at ``i + vec`` equals this at ``i``."""
        return Configuration(self.geometry, np.roll(self.grid, tuple(vec), axis=tuple(range(self.geometry.d))))


def sigma(x: Configuration) -> int:
    return int(x.cells.sum())


def rho(x: Configuration) -> Fraction:
    return Fraction(sigma(x), x.geometry.size)


def neighborhood_indices(ranks: np.ndarray, d: int, base: int) -> np.ndarray:
    """Lookup index of every cell's neighborhood.

    ``ranks`` holds state ranks with shape ``(*batch, n_1, ..., n_d)``; the
    last ``d`` axes are the torus.
    """
    lead = ranks.ndim - d
    weights = base ** np.arange(2 * d, -1, -1)
    out = np.zeros(ranks.shape, dtype=np.int64)
    for v in directions(d):
        w = int(weights[v.position(d)])
        if v.is_zero:
            out += w * ranks
        else:
            # entry v of cell i is x(i+v): pull the value from +v
            out += w * np.roll(ranks, -v.sign, axis=lead + v.axis - 1)
    return out


def apply_global(f: LocalFunction, x: Configuration) -> Configuration:
    """``A_f(x)(i) = f(N_{x,i})``."""
    g = x.geometry
    if g.d != f.d:
        raise InvalidConfig(f"rule is {f.d}-dimensional, configuration is {g.d}-dimensional")
    try:
        ranks = f.Q.ranks(x.grid)
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from None
    idx = neighborhood_indices(ranks, f.d, len(f.Q))
    return Configuration(g, f.table[idx])


@dataclass(frozen=True)
class Violation:
    kind: str  # "quiescence" or "monomer-sum"
    q: int
    value: int

    def __str__(self) -> str:
        if self.kind == "quiescence":
            return f"f(H_{self.q}) = {self.value} != {self.q}"
        return f"sum over v of f(M_v:{self.q}) = {self.value} != {self.q}"


def check_necessary(f: LocalFunction) -> list[Violation]:
    """Quiescence of every state and the monomer-sum condition.

    Returns the violations found; an empty list means both conditions hold.
    """
    out = []
    for q in f.Q:
        hq = int(f(homogeneous(q, f.d)))
        if hq != q:
            out.append(Violation("quiescence", q, hq))
    for q in f.Q:
        total = sum(int(f(monomer(v, q, f.d))) for v in directions(f.d))
        if total != q:
            out.append(Violation("monomer-sum", q, total))
    return out


ECA_STATES = StateSet((0, 1))


def wolfram_code(f: LocalFunction) -> int:
    """Standard elementary-CA code, reading (left, center, right) in canonical order."""
    if f.d != 1 or f.Q != ECA_STATES:
        raise Unsupported("Wolfram codes exist only for d=1, Q={0,1}")
    if not f.is_rule:
        raise InvalidRule("not a local rule")
    # index of (l, c, r) is 4l + 2c + r, which is exactly the bit position
    return int(sum(int(b) << i for i, b in enumerate(f.table)))


def from_wolfram_code(code: int) -> LocalFunction:
    if not 0 <= code < 256:
        raise Unsupported(f"elementary rule codes are 0..255, got {code}")
    return LocalFunction(1, ECA_STATES, [(code >> i) & 1 for i in range(8)])


__all__ = [
    "Configuration",
    "LocalFunction",
    "Violation",
    "apply_global",
    "check_necessary",
    "eval_local",
    "from_function",
    "from_wolfram_code",
    "identity_rule",
    "neighborhood_indices",
    "rho",
    "shift_rule",
    "sigma",
    "wolfram_code",
]
