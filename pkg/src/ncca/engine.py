"""Split-plus-perturbation decomposition, the number-conservation decider and
the exhaustive enumerator of number-conserving rules.

Every number-conserving local rule ``f`` is uniquely ``h + g`` with ``h`` the
split function read off ``f``'s monomers and ``g`` a perturbation.  Deciding
conservation therefore reduces to two finite checks (monomer sums, and the
residual being a perturbation), and enumerating all conserving rules reduces
to a bounded integer search over perturbation coefficients for every split.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidRule, NCCAError, Unsupported
from .lattice import Direction, DirectionPair, directions, lambda_canonical
from .localfn import LocalFunction, Violation, within_states
from .neighborhood import NeighborhoodConfig, StateSet, config_table, indices_of, monomer
from .perturb import (
    Perturbation,
    Selection,
    basis_matrix,
    coefficient_labels,
    coefficients_from_lut,
    pert_to_lut,
)
from .split import SplitFunction, enumerate_splits, split_from_monomers, split_to_lut

log = logging.getLogger(__name__)


class NotDecomposable(NCCAError):
    """The monomer values of a rule do not form a split function."""

    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(map(str, violations)))
        self.violations = violations


@dataclass(frozen=True)
class Decomposition:
    f: LocalFunction
    h: SplitFunction
    residual: LocalFunction

    def perturbation(self, lam: Selection | None = None) -> Perturbation:
        """Coefficients of the residual (meaningful when the residual is a perturbation)."""
        return coefficients_from_lut(self.residual, lam)

    def recombine(self) -> LocalFunction:
        return split_to_lut(self.h) + self.residual


def monomer_sum_violations(f: LocalFunction) -> list[Violation]:
    out = []
    for q in f.Q:
        total = sum(int(f(monomer(v, q, f.d))) for v in directions(f.d))
        if total != q:
            out.append(Violation("monomer-sum", q, total))
    return out


def _require_rule(f: LocalFunction) -> None:
    if not f.is_rule:
        raise InvalidRule("the local function takes values outside its state set")


def decompose(f: LocalFunction) -> Decomposition:
    """Split ``f`` into the split function of its monomer values and the residual.

    Raises :class:`NotDecomposable` when the monomer sums already rule out
    number conservation.
    """
    _require_rule(f)
    violations = monomer_sum_violations(f)
    if violations:
        raise NotDecomposable(violations)
    h = split_from_monomers(f)
    return Decomposition(f, h, f - split_to_lut(h))


@dataclass(frozen=True)
class Verdict:
    conserving: bool
    violations: list[Violation] = field(default_factory=list)
    witness: NeighborhoodConfig | None = None
    decomposition: Decomposition | None = None
    perturbation: Perturbation | None = None

    def __bool__(self) -> bool:
        return self.conserving


def is_number_conserving(f: LocalFunction, lam: Selection | None = None) -> Verdict:
    """Exact decision over all ``|Q|^(2d+1)`` neighborhood configurations.

    On failure the verdict carries either the violated monomer sums or a
    neighborhood where the residual disagrees with the perturbation built from
    its own dimer values.
    """
    try:
        dec = decompose(f)
    except NotDecomposable as exc:
        return Verdict(False, violations=exc.violations)
    g = dec.perturbation(lam)
    expected = pert_to_lut(g).table
    bad = np.flatnonzero(expected != dec.residual.table)
    if bad.size:
        row = config_table(f.d, f.Q)[bad[0]]
        return Verdict(False, witness=NeighborhoodConfig(tuple(int(s) for s in row)), decomposition=dec)
    return Verdict(True, decomposition=dec, perturbation=g)


@dataclass(frozen=True)
class CoeffBounds:
    lower: int
    upper: int
    candidates: tuple[int, ...]

    @property
    def empty(self) -> bool:
        return not self.candidates

    @property
    def width(self) -> int:
        return self.upper - self.lower


def coeff_bounds(h: SplitFunction, pair: DirectionPair, p: int, q: int) -> CoeffBounds:
    """Admissible values for the coefficient of ``D_{u:p, w:q}`` (``u, w = pair``).

    On that dimer the rule equals ``h(M_{u:p}) + h(M_{w:q}) + a``; on the
    matching dimer ``D_{-w:p, -u:q}`` it equals ``h(M_{-w:p}) + h(M_{-u:q}) - a``.
    Both must be states.  ``lower``/``upper`` are the interval hull of the
    candidates; ``lower > upper`` when none exist.
    """
    u, w = pair.first, pair.second
    s1 = h.monomer_value(u, p) + h.monomer_value(w, q)
    s2 = h.monomer_value(-w, p) + h.monomer_value(-u, q)
    Q = h.Q
    if Q.is_contiguous:
        lo = max(Q.low - s1, s2 - Q.high)
        hi = min(Q.high - s1, s2 - Q.low)
        return CoeffBounds(lo, hi, tuple(range(lo, hi + 1)))
    cands = tuple(sorted({y - s1 for y in Q} & {s2 - y for y in Q}))
    if not cands:
        return CoeffBounds(max(Q.low - s1, s2 - Q.high), min(Q.high - s1, s2 - Q.low), ())
    return CoeffBounds(cands[0], cands[-1], cands)


# --- bounded backtracking over perturbation coefficients -----------------------

_BIG = 1 << 40


class _SplitSearch:
    """All coefficient vectors ``a`` with ``base + B @ a`` inside the state set."""

    def __init__(self, base: np.ndarray, B: np.ndarray, Q: StateSet, domains: list[tuple[int, ...]]):
        self.Q = Q
        self.full_B = B
        self.full_base = base
        self.domains = domains
        self.qlo, self.qhi = Q.low, Q.high

        live = np.any(B != 0, axis=1)
        self.constant_ok = within_states(Q, base[~live])
        rows = np.unique(np.hstack([B[live], base[live, None]]), axis=0)
        self.B = rows[:, :-1]
        self.c = rows[:, -1]
        self.plus = self.B == 1
        self.minus = self.B == -1
        self.Bp = self.plus.astype(np.int64)
        self.Bm = self.minus.astype(np.int64)
        self.nodes = 0

    def solve(self) -> list[tuple[int, ...]]:
        if not self.constant_ok or any(not dom for dom in self.domains):
            return []
        lo = np.array([dom[0] for dom in self.domains], dtype=np.int64)
        hi = np.array([dom[-1] for dom in self.domains], dtype=np.int64)
        out: list[tuple[int, ...]] = []
        self._search(lo, hi, out)
        out.sort()
        return out

    def _snap(self, lo: np.ndarray, hi: np.ndarray) -> bool:
        # tighten interval ends onto actual domain members (non-contiguous sets)
        for k, dom in enumerate(self.domains):
            inside = [x for x in dom if lo[k] <= x <= hi[k]]
            if not inside:
                return False
            lo[k], hi[k] = inside[0], inside[-1]
        return True

    def _propagate(self, lo: np.ndarray, hi: np.ndarray) -> bool:
        contiguous = self.Q.is_contiguous
        while True:
            rowmin = self.c + self.Bp @ lo - self.Bm @ hi
            rowmax = self.c + self.Bp @ hi - self.Bm @ lo
            if (rowmin > self.qhi).any() or (rowmax < self.qlo).any():
                return False
            up = (self.qhi - rowmin)[:, None]
            down = (rowmax - self.qlo)[:, None]
            # raising a +1 variable raises the row; raising a -1 variable lowers it
            cap_hi = np.where(self.plus, up, np.where(self.minus, down, _BIG)).min(axis=0)
            cap_lo = np.where(self.plus, down, np.where(self.minus, up, _BIG)).min(axis=0)
            new_hi = np.minimum(hi, lo + cap_hi)
            new_lo = np.maximum(lo, hi - cap_lo)
            if (new_lo > new_hi).any():
                return False
            if not contiguous and not self._snap(new_lo, new_hi):
                return False
            if np.array_equal(new_lo, lo) and np.array_equal(new_hi, hi):
                return True
            lo[:], hi[:] = new_lo, new_hi

    def _search(self, lo: np.ndarray, hi: np.ndarray, out: list) -> None:
        self.nodes += 1
        if self.B.shape[0] and not self._propagate(lo, hi):
            return
        free = np.flatnonzero(lo < hi)
        if free.size == 0:
            a = lo
            values = self.full_base + self.full_B @ a
            if within_states(self.Q, values):
                out.append(tuple(int(x) for x in a))
            return
        widths = hi[free] - lo[free]
        k = int(free[np.argmin(widths)])
        for value in self.domains[k]:
            if lo[k] <= value <= hi[k]:
                lo2, hi2 = lo.copy(), hi.copy()
                lo2[k] = hi2[k] = value
                self._search(lo2, hi2, out)


def solve_split(h: SplitFunction, lam: Selection | None = None) -> list[tuple[int, ...]]:
    """Coefficient vectors ``a`` (lexicographic) making ``h + sum a_k g_k`` a local rule."""
    lam = tuple(lam) if lam is not None else lambda_canonical(h.d)
    B = basis_matrix(h.d, h.Q, lam)
    domains = [coeff_bounds(h, pair, p, q).candidates for pair, p, q in coefficient_labels(h.d, h.Q, lam)]
    search = _SplitSearch(split_to_lut(h).table, B, h.Q, domains)
    return search.solve()


@dataclass(frozen=True)
class CatalogEntry:
    split_index: int
    h: SplitFunction
    coeffs: tuple[int, ...]
    rule: LocalFunction


def _check_enumerable(d: int, Q: StateSet) -> None:
    if d < 1 or d > 4:
        raise Unsupported("enumeration is supported for 1 <= d <= 4")


def _solve_indexed(args) -> list[tuple[int, ...]]:
    h, lam = args
    return solve_split(h, lam)


def enumerate_catalog(d: int, Q: StateSet, workers: int = 1, lam: Selection | None = None) -> Iterator[CatalogEntry]:
    """Every number-conserving rule with its decomposition, ordered by (split, coefficients)."""
    _check_enumerable(d, Q)
    lam = tuple(lam) if lam is not None else lambda_canonical(d)
    B = basis_matrix(d, Q, lam)
    splits = list(enumerate_splits(d, Q))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results: Iterable = pool.map(_solve_indexed, [(h, lam) for h in splits], chunksize=4)
            results = list(results)
    else:
        results = (solve_split(h, lam) for h in splits)
    for i, (h, sols) in enumerate(zip(splits, results)):
        base = split_to_lut(h).table
        for a in sols:
            yield CatalogEntry(i, h, a, LocalFunction(d, Q, base + B @ np.asarray(a, dtype=np.int64)))


def enumerate_ncca(d: int, Q: StateSet, workers: int = 1) -> Iterator[LocalFunction]:
    for entry in enumerate_catalog(d, Q, workers):
        yield entry.rule


def count_per_split(d: int, Q: StateSet, workers: int = 1) -> dict[SplitFunction, int]:
    counts = {h: 0 for h in enumerate_splits(d, Q)}
    for entry in enumerate_catalog(d, Q, workers):
        counts[entry.h] += 1
    return counts


# --- symmetries of the von Neumann neighborhood --------------------------------


@dataclass(frozen=True)
class SignedPermutation:
    """``v_k -> signs[k-1] * v_{perm[k-1]}`` (axes 1-based in ``perm``)."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
            raise ValueError(f"{self.perm} is not a permutation of the axes")
        if len(self.signs) != len(self.perm) or any(s not in (1, -1) for s in self.signs):
            raise ValueError("need one sign (+1/-1) per axis")

    @classmethod
    def identity(cls, d: int) -> SignedPermutation:
        return cls(tuple(range(1, d + 1)), (1,) * d)

    @property
    def d(self) -> int:
        return len(self.perm)

    def __call__(self, v: Direction) -> Direction:
        if v.is_zero:
            return v
        k = v.axis - 1
        return Direction(self.perm[k], v.sign * self.signs[k])

    def position_map(self) -> np.ndarray:
        """``m[position(v)] = position(s(v))``."""
        d = self.d
        return np.array([self(v).position(d) for v in directions(d)])


@lru_cache(maxsize=None)
def symmetry_group(d: int) -> tuple[SignedPermutation, ...]:
    """All ``2^d d!`` signed axis permutations, identity first."""
    return tuple(
        SignedPermutation(perm, signs)
        for perm in itertools.permutations(range(1, d + 1))
        for signs in itertools.product((1, -1), repeat=d)
    )


@lru_cache(maxsize=None)
def _symmetry_index(s: SignedPermutation, Q: StateSet) -> np.ndarray:
    rows = config_table(s.d, Q)
    return indices_of(rows[:, s.position_map()], Q)


def apply_symmetry(f: LocalFunction, s: SignedPermutation) -> LocalFunction:
    """The rule conjugated by ``s``: ``f'(N) = f(N o s)``."""
    if s.d != f.d:
        raise Unsupported("symmetry and rule have different dimensions")
    return LocalFunction(f.d, f.Q, f.table[_symmetry_index(s, f.Q)])


def apply_symmetry_split(h: SplitFunction, s: SignedPermutation) -> SplitFunction:
    """Recipe transform matching :func:`apply_symmetry` on ``split_to_lut(h)``."""
    inv = np.argsort(s.position_map())
    return SplitFunction(h.d, h.Q, tuple(tuple(int(r[i]) for i in inv) for r in h.recipes))


def symmetric_tables(f: LocalFunction) -> np.ndarray:
    """Tables of ``f`` under every group element, one row each."""
    return np.stack([f.table[_symmetry_index(s, f.Q)] for s in symmetry_group(f.d)])


def _lex_min_row(rows: np.ndarray) -> np.ndarray:
    cand = np.arange(rows.shape[0])
    for col in range(rows.shape[1]):
        vals = rows[cand, col]
        cand = cand[vals == vals.min()]
        if cand.size == 1:
            break
    return rows[cand[0]]


def canonical_form(f: LocalFunction) -> LocalFunction:
    """Lexicographically smallest table in the symmetry orbit of ``f``."""
    return LocalFunction(f.d, f.Q, _lex_min_row(symmetric_tables(f)))


def orbit_representatives(rules: Iterable[LocalFunction], d: int | None = None) -> list[LocalFunction]:
    """One canonical representative per symmetry orbit, sorted by table."""
    reps = {}
    for f in rules:
        if d is not None and f.d != d:
            raise Unsupported("rules of mixed dimension")
        c = canonical_form(f)
        reps[c.key()] = c
    return sorted(reps.values(), key=lambda f: tuple(f.table.tolist()))


def is_closed_under_symmetry(rules: Sequence[LocalFunction]) -> bool:
    if not rules:
        return True
    keys = {f.table.tobytes() for f in rules}
    for f in rules:
        for t in symmetric_tables(f):
            if t.tobytes() not in keys:
                return False
    return True
