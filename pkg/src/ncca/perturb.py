"""Perturbations: local functions that vanish on monomers and sum to zero globally.

A perturbation is fixed by its values on the dimers ``D_{u:p,w:q}`` with
``{u, w}`` in a selection ``lam`` (one pair per matching class) and ``p, q``
nonzero.  Every other value follows from

    g(N) = sum over {u,w} in lam of  g(D_{u:N(u), w:N(w)}) - g(D_{u:N(-w), w:N(-u)})

where a dimer with a zero state is a monomer and contributes nothing.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import InvalidConfig, InvalidPair
from .lattice import Direction, DirectionPair, lambda_canonical, matching, omega
from .localfn import LocalFunction
from .neighborhood import NeighborhoodConfig, StateSet, config_table, dimer

Selection = tuple[DirectionPair, ...]


class Perturbation:
    """Integer coefficients ``coeffs[k, rank_p, rank_q]`` = value on ``D_{lam[k].first:p, lam[k].second:q}``."""

    __slots__ = ("d", "Q", "lam", "coeffs")

    def __init__(self, d: int, Q: StateSet, coeffs, lam: Selection | None = None):
        lam = tuple(lam) if lam is not None else lambda_canonical(d)
        _check_selection(lam, d)
        npos = len(Q.positive)
        coeffs = np.array(coeffs, dtype=np.int64).reshape(len(lam), npos, npos)
        coeffs.setflags(write=False)
        self.d = d
        self.Q = Q
        self.lam = lam
        self.coeffs = coeffs

    @classmethod
    def zero(cls, d: int, Q: StateSet, lam: Selection | None = None) -> Perturbation:
        return cls(d, Q, np.zeros(pert_dim(d, Q), dtype=np.int64), lam)

    @property
    def vector(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    def __add__(self, other: Perturbation) -> Perturbation:
        self._compatible(other)
        return Perturbation(self.d, self.Q, self.coeffs + other.coeffs, self.lam)

    def __sub__(self, other: Perturbation) -> Perturbation:
        self._compatible(other)
        return Perturbation(self.d, self.Q, self.coeffs - other.coeffs, self.lam)

    def __rmul__(self, k: int) -> Perturbation:
        return Perturbation(self.d, self.Q, int(k) * self.coeffs, self.lam)

    def __neg__(self) -> Perturbation:
        return Perturbation(self.d, self.Q, -self.coeffs, self.lam)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Perturbation)
            and (self.d, self.Q, self.lam) == (other.d, other.Q, other.lam)
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self) -> int:
        return hash((self.d, self.Q, self.lam, self.coeffs.tobytes()))

    def _compatible(self, other: Perturbation) -> None:
        if (self.d, self.Q, self.lam) != (other.d, other.Q, other.lam):
            raise InvalidConfig("perturbations use different neighborhoods or selections")

    def __call__(self, N: NeighborhoodConfig) -> int:
        return pert_eval(self, N)

    def __repr__(self) -> str:
        return f"Perturbation(d={self.d}, Q={self.Q}, coeffs={self.vector.tolist()})"


def _check_selection(lam: Selection, d: int) -> None:
    om = omega(d)
    if len(lam) != d * d or any(p not in om for p in lam):
        raise InvalidPair(f"selection must hold {d * d} overlap pairs")
    if len({frozenset((p, matching(p))) for p in lam}) != d * d:
        raise InvalidPair("selection must take exactly one pair from each matching class")


def pert_dim(d: int, Q: StateSet) -> int:
    return d * d * len(Q.positive) ** 2


def coefficient_labels(d: int, Q: StateSet, lam: Selection | None = None) -> list[tuple[DirectionPair, int, int]]:
    """``(pair, p, q)`` for every coefficient, in storage order."""
    lam = tuple(lam) if lam is not None else lambda_canonical(d)
    return [(pair, p, q) for pair in lam for p in Q.positive for q in Q.positive]


def basis(d: int, Q: StateSet, lam: Selection | None = None) -> list[Perturbation]:
    """Unit perturbations, one per ``(pair, p, q)`` in :func:`coefficient_labels` order."""
    n = pert_dim(d, Q)
    return [Perturbation(d, Q, np.eye(n, dtype=np.int64)[k], lam) for k in range(n)]


def dimer_value(g: Perturbation, assignment: dict[Direction, int]) -> int:
    """Value on the configuration holding ``assignment`` (support in omega, or smaller).

    Dimers whose pair is outside the selection are resolved through
    ``g(D_{u:p,w:q}) = -g(D_{-w:p,-u:q})``.
    """
    support = {v: q for v, q in assignment.items() if q != 0}
    if len(support) <= 1:
        return 0
    if len(support) != 2:
        raise InvalidPair("dimers have exactly two nonzero entries")
    (u, p), (w, q) = support.items()
    pair = DirectionPair.of(u, w)
    if pair in g.lam:
        return _stored(g, pair, support)
    # {u,w} not selected, so its match {-u,-w} is; g(D_{u:p,w:q}) = -g(D_{-w:p,-u:q})
    flipped = {-w: p, -u: q}
    return -_stored(g, DirectionPair.of(-w, -u), flipped)


def _stored(g: Perturbation, pair: DirectionPair, support: dict[Direction, int]) -> int:
    k = g.lam.index(pair)
    pos = g.Q.positive
    return int(g.coeffs[k, pos.index(support[pair.first]), pos.index(support[pair.second])])


def pert_eval(g: Perturbation, N: NeighborhoodConfig) -> int:
    """Evaluate ``g`` at ``N`` from its selected dimer values."""
    if N.d != g.d:
        raise InvalidConfig("dimension mismatch")
    total = 0
    for pair in g.lam:
        u, w = pair.first, pair.second
        total += dimer_value(g, {u: N[u], w: N[w]})
        total -= dimer_value(g, {u: N[-w], w: N[-u]})
    return total


@lru_cache(maxsize=None)
def basis_matrix(d: int, Q: StateSet, lam: Selection | None = None) -> np.ndarray:
    """``B[index(N), k]`` = value of the ``k``-th basis perturbation at ``N``.

    Entries are in ``{-1, 0, 1}``; ``pert_to_lut(g) = B @ g.vector``.
    """
    lam = tuple(lam) if lam is not None else lambda_canonical(d)
    rows = config_table(d, Q)
    ranks = Q.ranks(rows)
    zero_rank = Q.rank(0)
    npos = len(Q.positive)
    # rank among Q+ for every rank in Q (zero maps to -1)
    pos_rank = np.array([-1 if q == 0 else Q.positive.index(q) for q in Q.values])
    n = rows.shape[0]
    out = np.zeros((n, len(lam) * npos * npos), dtype=np.int64)
    arange = np.arange(n)
    for k, pair in enumerate(lam):
        u, w = pair.first, pair.second
        for sign, (a, b) in ((1, (u, w)), (-1, (-w, -u))):
            ra = ranks[:, a.position(d)]
            rb = ranks[:, b.position(d)]
            live = (ra != zero_rank) & (rb != zero_rank)
            col = k * npos * npos + pos_rank[ra] * npos + pos_rank[rb]
            np.add.at(out, (arange[live], col[live]), sign)
    out.setflags(write=False)
    return out


def pert_to_lut(g: Perturbation) -> LocalFunction:
    return LocalFunction(g.d, g.Q, basis_matrix(g.d, g.Q, g.lam) @ g.vector)


def reexpress(g: Perturbation, lam: Sequence[DirectionPair]) -> Perturbation:
    """The same perturbation with coefficients read off under another selection."""
    lam = tuple(lam)
    _check_selection(lam, g.d)
    coeffs = [
        dimer_value(g, {pair.first: p, pair.second: q})
        for pair, p, q in coefficient_labels(g.d, g.Q, lam)
    ]
    return Perturbation(g.d, g.Q, coeffs, lam)


def coefficients_from_lut(f: LocalFunction, lam: Selection | None = None) -> Perturbation:
    """Read a perturbation's coefficients off a table's selected dimer values.

    The result equals ``f`` only if ``f`` actually is a perturbation.
    """
    coeffs = [
        f(dimer(pair, p, q, f.d)) for pair, p, q in coefficient_labels(f.d, f.Q, lam)
    ]
    return Perturbation(f.d, f.Q, coeffs, lam)
