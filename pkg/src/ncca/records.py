"""JSON-lines persistence for rule catalogs.

One record per line, fields in a fixed order, integers only, so repeated runs
produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from .errors import InvalidConfig, Unsupported
from .localfn import ECA_STATES, LocalFunction, wolfram_code
from .neighborhood import StateSet

# Lookup tables list configurations with entries ordered (-v_d..-v_1, 0, v_1..v_d),
# the first entry being the most significant base-|Q| digit.
ORDER_TAG = "neg-desc,center,pos-asc;msd-first"

FIELDS = ("dim", "states", "order", "lut", "wolfram", "split", "coeffs")
_REQUIRED = ("dim", "states", "order", "lut")


@dataclass(frozen=True)
class RuleRecord:
    dim: int
    states: tuple[int, ...]
    lut: tuple[int, ...]
    order: str = ORDER_TAG
    wolfram: int | None = None
    split: tuple[tuple[int, ...], ...] | None = None
    coeffs: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "lut", tuple(self.lut))
        if self.split is not None:
            object.__setattr__(self, "split", tuple(tuple(r) for r in self.split))
        if self.coeffs is not None:
            object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if self.order != ORDER_TAG:
            raise Unsupported(f"unknown lookup-table order {self.order!r}")
        expected = len(self.states) ** (2 * self.dim + 1)
        if len(self.lut) != expected:
            raise InvalidConfig(f"lut has {len(self.lut)} entries, expected {expected}")

    @classmethod
    def from_rule(cls, f: LocalFunction, split=None, coeffs=None) -> RuleRecord:
        wolfram = wolfram_code(f) if f.d == 1 and f.Q == ECA_STATES and f.is_rule else None
        return cls(
            f.d,
            f.Q.values,
            tuple(int(x) for x in f.table),
            wolfram=wolfram,
            split=split,
            coeffs=None if coeffs is None else tuple(int(c) for c in coeffs),
        )

    def to_rule(self) -> LocalFunction:
        return LocalFunction(self.dim, StateSet(self.states), self.lut)

    def to_dict(self) -> dict:
        out = {
            "dim": self.dim,
            "states": list(self.states),
            "order": self.order,
            "lut": list(self.lut),
        }
        if self.wolfram is not None:
            out["wolfram"] = self.wolfram
        if self.split is not None:
            out["split"] = [list(r) for r in self.split]
        if self.coeffs is not None:
            out["coeffs"] = list(self.coeffs)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, obj: dict) -> RuleRecord:
        if not isinstance(obj, dict):
            raise InvalidConfig("a rule record must be a JSON object")
        missing = [k for k in _REQUIRED if k not in obj]
        if missing:
            raise InvalidConfig(f"rule record is missing {', '.join(missing)}")
        unknown = sorted(set(obj) - set(FIELDS))
        if unknown:
            raise InvalidConfig(f"unknown rule record fields: {', '.join(unknown)}")
        _ints(obj["lut"], "lut")
        _ints(obj["states"], "states")
        if not isinstance(obj["dim"], int) or isinstance(obj["dim"], bool):
            raise InvalidConfig("dim must be an integer")
        return cls(
            obj["dim"],
            obj["states"],
            obj["lut"],
            order=obj["order"],
            wolfram=obj.get("wolfram"),
            split=obj.get("split"),
            coeffs=obj.get("coeffs"),
        )

    @classmethod
    def loads(cls, line: str) -> RuleRecord:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"malformed JSON: {exc}") from None
        return cls.from_dict(obj)


def _ints(values, name: str) -> None:
    if not isinstance(values, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        raise InvalidConfig(f"{name} must be a list of integers")


def write_records(records: Iterable[RuleRecord], fh: IO[str]) -> int:
    n = 0
    for r in records:
        fh.write(r.dumps() + "\n")
        n += 1
    return n


def read_records(fh: IO[str]) -> Iterator[RuleRecord]:
    for lineno, line in enumerate(fh, start=1):
        if not line.strip():
            continue
        try:
            yield RuleRecord.loads(line)
        except InvalidConfig as exc:
            raise InvalidConfig(f"line {lineno}: {exc}") from None
