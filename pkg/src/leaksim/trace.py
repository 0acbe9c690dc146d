"""Ordered event record of a simulation run and its JSON-lines form."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

from .device import TaintedValue


class TraceKind(str, enum.Enum):
    USER_EVENT = "UserEvent"
    CALLBACK = "Callback"
    SOURCE_READ = "SourceRead"
    CRITERIA_SET = "CriteriaSet"
    LOG = "Log"
    TOAST = "Toast"
    STORE = "Store"
    NET_SEND = "NetSend"
    FAULT = "Fault"


# Payload key holding the TaintedValue for entries that carry data.
CARRIER_KEYS = {
    TraceKind.LOG: "message",
    TraceKind.TOAST: "message",
    TraceKind.STORE: "value",
    TraceKind.NET_SEND: "payload",
}

SINK_KINDS = {
    TraceKind.LOG: "log",
    TraceKind.STORE: "store",
    TraceKind.NET_SEND: "network",
}


@dataclass(frozen=True)
class TraceEntry:
    seq: int
    at_millis: int
    kind: TraceKind
    component: str
    payload: dict = field(default_factory=dict)

    @property
    def carried(self) -> Optional[TaintedValue]:
        key = CARRIER_KEYS.get(self.kind)
        return self.payload[key] if key else None

    @property
    def taints(self) -> frozenset:
        carried = self.carried
        return carried.taints if carried is not None else frozenset()

    def to_json(self) -> dict:
        payload = {k: (v.to_json() if isinstance(v, TaintedValue) else v)
                   for k, v in self.payload.items()}
        return {
            "seq": self.seq,
            "atMillis": self.at_millis,
            "kind": self.kind.value,
            "component": self.component,
            "payload": payload,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TraceEntry":
        kind = TraceKind(obj["kind"])
        payload = dict(obj["payload"])
        key = CARRIER_KEYS.get(kind)
        if key:
            payload[key] = TaintedValue.from_json(payload[key])
        return cls(obj["seq"], obj["atMillis"], kind, obj["component"], payload)


class Trace:
    """Append-only list of entries with gap-free sequence numbers from 0."""

    def __init__(self, entries=()):
        self._entries: list[TraceEntry] = list(entries)

    def append(self, at_millis: int, kind: TraceKind, component: str, **payload: Any) -> TraceEntry:
        entry = TraceEntry(len(self._entries), at_millis, kind, component, payload)
        self._entries.append(entry)
        return entry

    def __iter__(self) -> Iterator[TraceEntry]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __getitem__(self, index):
        return self._entries[index]

    def __eq__(self, other):
        return isinstance(other, Trace) and self._entries == other._entries

    def of_kind(self, *kinds: TraceKind) -> list[TraceEntry]:
        return [e for e in self._entries if e.kind in kinds]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_json(), ensure_ascii=False) + "\n" for e in self._entries)

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        return cls(TraceEntry.from_json(json.loads(line)) for line in text.splitlines() if line.strip())
