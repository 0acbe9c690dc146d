"""Flow extraction, disclosure classification and report rendering."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, replace
from typing import Optional

from .descriptor import UserEvent
from .device import sorted_labels
from .errors import UnknownFormat
from .trace import SINK_KINDS, Trace, TraceEntry, TraceKind

CLEAN = "CLEAN"
LEAKS_FOUND = "LEAKS_FOUND"

DISCLOSURE_RULE = ("a flow is disclosed only if an earlier toast carried every "
                   "source label of the flow")

_SINK_ORDER = {"log": 0, "store": 1, "network": 2}
_KIND_ORDER = {"activity": 0, "service": 1}


@dataclass(frozen=True)
class FlowRecord:
    seq: int
    source_labels: frozenset
    sink_kind: str
    component: str
    component_kind: str
    triggering_event: Optional[UserEvent]
    disclosed: bool
    at_millis: int

    @property
    def labels(self) -> list[str]:
        return sorted_labels(self.source_labels)

    def to_json(self) -> dict:
        return {
            "seq": self.seq,
            "atMillis": self.at_millis,
            "sourceLabels": self.labels,
            "sinkKind": self.sink_kind,
            "component": self.component,
            "componentKind": self.component_kind,
            "triggeringEvent": self.triggering_event.to_json() if self.triggering_event else None,
            "disclosed": self.disclosed,
        }


@dataclass(frozen=True)
class FlowReport:
    flows: tuple[FlowRecord, ...]
    summary: tuple[tuple[str, str, bool, int], ...]
    verdict: str


def _user_event(entry: TraceEntry) -> UserEvent:
    p = entry.payload
    return UserEvent(entry.at_millis, p["event"], activity=p.get("activity"), button=p.get("button"))


def _trigger_before(trace: Trace, seq: int) -> Optional[UserEvent]:
    for i in range(seq - 1, -1, -1):
        if trace[i].kind is TraceKind.USER_EVENT:
            return _user_event(trace[i])
    return None


def extract_flows(trace: Trace) -> list[FlowRecord]:
    """One record per log/store/network entry that carries taint, in seq order.

    ``disclosed`` starts out False; classify_flow decides it.
    """
    flows = []
    trigger = None
    for entry in trace:
        if entry.kind is TraceKind.USER_EVENT:
            trigger = _user_event(entry)
            continue
        if entry.kind not in SINK_KINDS or not entry.taints:
            continue
        flows.append(FlowRecord(
            seq=entry.seq,
            source_labels=entry.taints,
            sink_kind=SINK_KINDS[entry.kind],
            component=entry.component,
            component_kind=entry.payload["componentKind"],
            triggering_event=trigger,
            disclosed=False,
            at_millis=entry.at_millis,
        ))
    return flows


def classify_flow(flow: FlowRecord, trace: Trace) -> FlowRecord:
    disclosed = any(
        e.kind is TraceKind.TOAST and e.seq < flow.seq and e.taints >= flow.source_labels
        for e in trace
    )
    return replace(flow, disclosed=disclosed, triggering_event=_trigger_before(trace, flow.seq))


def summarize(flows) -> tuple[tuple[str, str, bool, int], ...]:
    counts = Counter((f.component_kind, f.sink_kind, f.disclosed) for f in flows)
    keys = sorted(counts, key=lambda k: (_KIND_ORDER.get(k[0], 9), _SINK_ORDER[k[1]], k[2]))
    return tuple((*k, counts[k]) for k in keys)


def build_report(trace: Trace) -> FlowReport:
    flows = tuple(classify_flow(f, trace) for f in extract_flows(trace))
    verdict = LEAKS_FOUND if any(not f.disclosed for f in flows) else CLEAN
    return FlowReport(flows, summarize(flows), verdict)


def _render_text(report: FlowReport) -> str:
    lines = [
        "leaksim flow report",
        f"disclosure rule: {DISCLOSURE_RULE}",
        f"verdict: {report.verdict}",
        f"flows: {len(report.flows)}",
        "summary:",
    ]
    if not report.summary:
        lines.append("  (none)")
    for kind, sink, disclosed, count in report.summary:
        note = " [background]" if kind == "service" else ""
        lines.append(f"  {kind}/{sink}: {count} {'disclosed' if disclosed else 'undisclosed'}{note}")
    lines.append("details:")
    for f in report.flows:
        trigger = f.triggering_event.describe() if f.triggering_event else "none"
        lines.append(f"  [{f.seq}] {','.join(f.labels)} -> {f.sink_kind} in "
                     f"{f.component}({f.component_kind}) trigger={trigger} "
                     f"disclosed={'true' if f.disclosed else 'false'}")
    return "\n".join(lines) + "\n"


def _render_structured(report: FlowReport) -> str:
    doc = {
        "verdict": report.verdict,
        "summary": [
            {"componentKind": k, "sinkKind": s, "disclosed": d, "count": n}
            for k, s, d, n in report.summary
        ],
        "flows": [f.to_json() for f in report.flows],
    }
    return json.dumps(doc, indent=2) + "\n"


def render_report(report: FlowReport, format: str = "text") -> str:
    if format == "text":
        return _render_text(report)
    if format == "structured":
        return _render_structured(report)
    raise UnknownFormat(f"unknown report format {format!r}; expected 'text' or 'structured'")
