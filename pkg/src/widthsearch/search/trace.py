"""Append-only search traces and their line-delimited JSON form.

Every line is one event::

    {"schema": 1, "step": 0, "event": "evaluated", "size": 500, "accuracy": 0.81}

Field names per event kind:

==================  ====================================================
evaluated           size, accuracy
slope               mid, delta, left, right, slope
posterior           side, mid, likelihood, prior, posterior
bound               which ("lower"/"upper"), old, new
accepted            size, posterior (null for linear search)
flagged             reason
==================  ====================================================

``delta`` in a slope event is the separation actually used, which is
smaller than the configured delta when an endpoint was clamped.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Evaluated:
    size: int
    accuracy: float
    kind = "evaluated"


@dataclass(frozen=True)
class SlopeComputed:
    mid: int
    delta: int
    left: int
    right: int
    slope: float
    kind = "slope"


@dataclass(frozen=True)
class PosteriorComputed:
    side: str
    mid: int
    likelihood: float
    prior: float
    posterior: float
    kind = "posterior"


@dataclass(frozen=True)
class BoundMoved:
    which: str
    old: int
    new: int
    kind = "bound"


@dataclass(frozen=True)
class Accepted:
    size: int
    posterior: float | None
    kind = "accepted"


@dataclass(frozen=True)
class Flagged:
    reason: str
    kind = "flagged"


EVENT_TYPES = {cls.kind: cls for cls in
               (Evaluated, SlopeComputed, PosteriorComputed, BoundMoved, Accepted, Flagged)}


class SearchTrace:
    def __init__(self):
        self._events: list = []

    def append(self, event) -> int:
        self._events.append(event)
        return len(self._events) - 1

    def __iter__(self):
        return iter(self._events)

    def __len__(self):
        return len(self._events)

    def __getitem__(self, i):
        return self._events[i]

    def of(self, cls) -> list:
        return [e for e in self._events if isinstance(e, cls)]

    def records(self) -> list[dict]:
        out = []
        for step, event in enumerate(self._events):
            rec = {"schema": SCHEMA_VERSION, "step": step, "event": event.kind}
            rec.update(asdict(event))
            out.append(rec)
        return out

    def to_jsonl(self, extra: dict | None = None) -> str:
        lines = []
        for rec in self.records():
            if extra:
                rec = {**rec, **extra}
            lines.append(json.dumps(rec))
        return "".join(line + "\n" for line in lines)

    def write(self, path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def from_records(cls, records) -> "SearchTrace":
        trace = cls()
        for rec in records:
            if rec.get("schema") != SCHEMA_VERSION:
                raise ValueError(f"unsupported trace schema {rec.get('schema')!r}")
            etype = EVENT_TYPES[rec["event"]]
            trace.append(etype(**{f.name: rec[f.name] for f in fields(etype)}))
        return trace

    @classmethod
    def read(cls, path) -> "SearchTrace":
        text = Path(path).read_text(encoding="utf-8")
        return cls.from_records(json.loads(line) for line in text.splitlines() if line.strip())
