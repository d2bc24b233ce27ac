"""Sampled curves (phase scans, spectra) and their CSV/JSON forms."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .criteria import BELOW_FLOOR

SIG_DIGITS = 9


def format_number(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if value == -math.inf:
        return BELOW_FLOOR
    if not math.isfinite(value):
        raise ValueError(f"cannot serialise {value}")
    out = format(value, f".{SIG_DIGITS}g")
    return "0" if out == "-0" else out


def _json_value(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    value = float(value)
    if value == -math.inf:
        return BELOW_FLOOR
    return value


def _from_json_value(value):
    if value == BELOW_FLOOR:
        return -math.inf
    return value


@dataclass(eq=False)
class TraceSeries:
    """Named columns sampled on a common axis; the first column is the axis.

    ``meta`` holds scalar provenance (scan settings, seeds) and is written to
    JSON only; the CSV form is the bare table.
    """

    kind: str
    columns: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.columns:
            raise ValueError("trace needs at least one column")
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) != 1:
            raise ValueError(f"columns have unequal lengths {sorted(lengths)}")
        self.columns = {k: np.asarray(v) for k, v in self.columns.items()}

    @property
    def axis(self) -> np.ndarray:
        return next(iter(self.columns.values()))

    def __len__(self) -> int:
        return len(self.axis)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def to_csv(self) -> str:
        buf = io.StringIO()
        names = list(self.columns)
        buf.write(",".join(names) + "\n")
        for row in zip(*(self.columns[n] for n in names)):
            buf.write(",".join(format_number(v) for v in row) + "\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "meta": self.meta,
            "columns": {k: [_json_value(x) for x in v] for k, v in self.columns.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "TraceSeries":
        d = json.loads(text)
        cols = {k: np.array([_from_json_value(x) for x in v]) for k, v in d["columns"].items()}
        return cls(d["kind"], cols, d.get("meta", {}))

    def equals(self, other: "TraceSeries") -> bool:
        return (
            self.kind == other.kind
            and list(self.columns) == list(other.columns)
            and all(np.array_equal(self.columns[k], other.columns[k]) for k in self.columns)
            and self.meta == other.meta
        )
