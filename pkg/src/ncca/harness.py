"""Brute-force conservation checks on finite tori.

These checks apply the global map directly and compare sums, so they share
nothing with the decomposition-based decider except the lookup table.  Only
the exhaustive mode is a complete test for the given torus; window and sampled
modes check necessary conditions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidConfig, InvalidRule
from .lattice import GridGeometry
from .localfn import Configuration, LocalFunction, apply_global, neighborhood_indices, sigma
from .neighborhood import StateSet

DEFAULT_BUDGET = 10**7
RNG_ALGORITHM = "numpy.PCG64"
_BATCH_CELLS = 2_000_000

DEFAULT_SIDES = {1: (7,), 2: (5, 5), 3: (5, 5, 5)}


@dataclass(frozen=True)
class VerificationReport:
    mode: str  # "exhaustive", "window" or "sampled"
    configs_checked: int
    passed: bool
    witness: Configuration | None = None
    seed: int | None = None
    rng: str | None = None
    sides: tuple[int, ...] = ()

    @property
    def outcome(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "sides": list(self.sides),
            "configs_checked": self.configs_checked,
            "outcome": self.outcome,
            "complete": self.mode == "exhaustive",
        }
        if self.seed is not None:
            out["seed"] = self.seed
            out["rng"] = self.rng
        if self.witness is not None:
            out["witness"] = self.witness.cells.tolist()
        return out


def default_geometry(d: int) -> GridGeometry:
    return GridGeometry(DEFAULT_SIDES.get(d, (5,) * d))


def _rank_batches(ranks: np.ndarray, sides: Sequence[int]) -> Iterator[tuple[int, np.ndarray]]:
    size = int(np.prod(sides))
    step = max(1, _BATCH_CELLS // size)
    for start in range(0, ranks.shape[0], step):
        yield start, ranks[start:start + step].reshape(-1, *sides)


def _check_ranks(
    fs: Sequence[LocalFunction], geometry: GridGeometry, batches: Iterator[tuple[int, np.ndarray]]
) -> list[int | None]:
    """Index of the first configuration violating conservation, per rule."""
    Q = fs[0].Q
    d = geometry.d
    values = np.asarray(Q.values)
    n_lut = len(fs[0].table)
    # many rules: sum of images = (neighborhood histogram) @ (stacked tables).
    # float64 BLAS is exact here: every partial sum is an integer bounded by
    # cells * max|table|, far below 2^53.
    use_counts = len(fs) > 1 and n_lut <= 20_000
    if use_counts:
        tables = np.stack([f.table for f in fs], axis=1)
        use_counts = int(np.abs(tables).max()) * geometry.size < 2**52
        tables = tables.astype(np.float64)
    first: list[int | None] = [None] * len(fs)
    for start, block in batches:
        rows = block.shape[0]
        idx = neighborhood_indices(block, d, len(Q)).reshape(rows, -1)
        before = values[block].reshape(rows, -1).sum(axis=1)
        if use_counts:
            for lo in range(0, rows, max(1, 4_000_000 // n_lut)):
                part = idx[lo:lo + max(1, 4_000_000 // n_lut)]
                n = part.shape[0]
                offsets = (np.arange(n)[:, None] * n_lut + part).reshape(-1)
                counts = np.bincount(offsets, minlength=n * n_lut).reshape(n, n_lut)
                after = np.rint(counts.astype(np.float64) @ tables).astype(np.int64)
                bad = after != before[lo:lo + n, None]
                for r in np.flatnonzero(bad.any(axis=0)):
                    if first[r] is None:
                        first[r] = start + lo + int(np.argmax(bad[:, r]))
        else:
            for r, f in enumerate(fs):
                if first[r] is not None:
                    continue
                bad = np.flatnonzero(f.table[idx].sum(axis=1) != before)
                if bad.size:
                    first[r] = start + int(bad[0])
        if all(x is not None for x in first):
            break
    return first


def _validate(fs: Sequence[LocalFunction], geometry: GridGeometry) -> None:
    if not fs:
        raise InvalidConfig("no rules given")
    for f in fs:
        if f.d != geometry.d:
            raise InvalidConfig(f"rule is {f.d}-dimensional, grid is {geometry.d}-dimensional")
        if f.Q != fs[0].Q:
            raise InvalidConfig("rules use different state sets")


def _digits(start: int, count: int, base: int, width: int) -> np.ndarray:
    codes = np.arange(start, start + count, dtype=np.int64)
    powers = base ** np.arange(width - 1, -1, -1, dtype=np.int64)
    return (codes[:, None] // powers[None, :]) % base


def _exhaustive_batches(base: int, geometry: GridGeometry, total: int):
    size = geometry.size
    step = max(1, _BATCH_CELLS // size)
    for start in range(0, total, step):
        count = min(step, total - start)
        yield start, _digits(start, count, base, size).reshape(count, *geometry.sides)


def _config_from_code(code: int, Q: StateSet, geometry: GridGeometry) -> Configuration:
    ranks = _digits(code, 1, len(Q), geometry.size)[0]
    return Configuration(geometry, np.asarray(Q.values)[ranks])


def verify_exhaustive_many(
    fs: Sequence[LocalFunction], geometry: GridGeometry, budget: int = DEFAULT_BUDGET
) -> list[VerificationReport]:
    _validate(fs, geometry)
    Q = fs[0].Q
    total = len(Q) ** geometry.size
    if total > budget:
        raise BudgetExceeded(total, budget)
    first = _check_ranks(fs, geometry, _exhaustive_batches(len(Q), geometry, total))
    return [
        VerificationReport(
            "exhaustive",
            total if code is None else code + 1,
            code is None,
            None if code is None else _config_from_code(code, Q, geometry),
            sides=geometry.sides,
        )
        for code in first
    ]


def verify_exhaustive(f: LocalFunction, geometry: GridGeometry, budget: int = DEFAULT_BUDGET) -> VerificationReport:
    """Check ``sigma(A_f(x)) == sigma(x)`` for every configuration on the torus.

    Configurations are visited in base-``|Q|`` order of their row-major cell
    ranks, so the witness is the lowest-numbered violating configuration.
    """
    return verify_exhaustive_many([f], geometry, budget)[0]


def window_cells(geometry: GridGeometry, radius: int, shape: str = "box") -> list[tuple[int, ...]]:
    """Cells of the window centred at ``(radius, ..., radius)``.

    ``box`` is the full ``(2r+1)^d`` cube, ``cross`` the von Neumann ball of
    radius ``r``.
    """
    if radius < 0:
        raise InvalidConfig("radius must be non-negative")
    if any(2 * radius + 1 > n for n in geometry.sides):
        raise InvalidConfig(f"a radius-{radius} window does not fit a {geometry.sides} torus")
    offsets = itertools.product(range(-radius, radius + 1), repeat=geometry.d)
    if shape == "cross":
        offsets = (o for o in offsets if sum(map(abs, o)) <= radius)
    elif shape != "box":
        raise InvalidConfig(f"unknown window shape {shape!r}")
    return [tuple(radius + o for o in off) for off in offsets]


def verify_window_many(
    fs: Sequence[LocalFunction],
    geometry: GridGeometry,
    radius: int = 1,
    shape: str = "box",
    budget: int = DEFAULT_BUDGET,
) -> list[VerificationReport]:
    _validate(fs, geometry)
    Q = fs[0].Q
    cells = window_cells(geometry, radius, shape)
    flat = np.array([geometry.encode(c) for c in cells])
    total = len(Q) ** len(cells)
    if total > budget:
        raise BudgetExceeded(total, budget)
    zero = Q.rank(0)

    def batches():
        step = max(1, _BATCH_CELLS // geometry.size)
        for start in range(0, total, step):
            count = min(step, total - start)
            block = np.full((count, geometry.size), zero, dtype=np.int64)
            block[:, flat] = _digits(start, count, len(Q), len(cells))
            yield start, block.reshape(count, *geometry.sides)

    first = _check_ranks(fs, geometry, batches())
    reports = []
    for code in first:
        witness = None
        if code is not None:
            block = np.full(geometry.size, zero, dtype=np.int64)
            block[flat] = _digits(code, 1, len(Q), len(cells))[0]
            witness = Configuration(geometry, np.asarray(Q.values)[block])
        reports.append(
            VerificationReport("window", total if code is None else code + 1, code is None, witness, sides=geometry.sides)
        )
    return reports


def verify_window(
    f: LocalFunction, geometry: GridGeometry, radius: int = 1, shape: str = "box", budget: int = DEFAULT_BUDGET
) -> VerificationReport:
    """Exhaustive check over configurations supported inside one window (zero elsewhere)."""
    return verify_window_many([f], geometry, radius, shape, budget)[0]


def sample_configurations(Q: StateSet, geometry: GridGeometry, trials: int, seed: int) -> np.ndarray:
    """``(trials, cells)`` state ranks drawn uniformly with a seeded PCG64 stream."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.integers(0, len(Q), size=(trials, geometry.size), dtype=np.int64)


def verify_sampled_many(
    fs: Sequence[LocalFunction], geometry: GridGeometry, trials: int = 10_000, seed: int = 0
) -> list[VerificationReport]:
    _validate(fs, geometry)
    if trials < 1:
        raise InvalidConfig("need at least one trial")
    Q = fs[0].Q
    ranks = sample_configurations(Q, geometry, trials, seed)
    first = _check_ranks(fs, geometry, _rank_batches(ranks, geometry.sides))
    values = np.asarray(Q.values)
    return [
        VerificationReport(
            "sampled",
            trials if code is None else code + 1,
            code is None,
            None if code is None else Configuration(geometry, values[ranks[code]]),
            seed=seed,
            rng=RNG_ALGORITHM,
            sides=geometry.sides,
        )
        for code in first
    ]


def verify_sampled(f: LocalFunction, geometry: GridGeometry, trials: int = 10_000, seed: int = 0) -> VerificationReport:
    """Uniform random configurations; identical arguments give identical reports."""
    return verify_sampled_many([f], geometry, trials, seed)[0]


def image_sums(f: LocalFunction, geometry: GridGeometry, trials: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """``(sigma(x), sigma(A_f(x)))`` for seeded random ``x``; ``f`` need not be a rule."""
    ranks = sample_configurations(f.Q, geometry, trials, seed)
    values = np.asarray(f.Q.values)
    idx = neighborhood_indices(ranks.reshape(trials, *geometry.sides), geometry.d, len(f.Q))
    return values[ranks].sum(axis=1), f.table[idx.reshape(trials, -1)].sum(axis=1)


def run_trajectory(f: LocalFunction, x0: Configuration, steps: int) -> list[tuple[Configuration, int]]:
    if not f.is_rule:
        raise InvalidRule("trajectories need a local rule")
    if steps < 0:
        raise InvalidConfig("steps must be non-negative")
    x = x0
    out = [(x, sigma(x))]
    for _ in range(steps):
        x = apply_global(f, x)
        out.append((x, sigma(x)))
    return out
