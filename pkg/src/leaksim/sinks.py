"""Output channels: logcat, toast, local store and network send.

Every write becomes a trace entry carrying the full TaintedValue; nothing
here adds or strips taint labels.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from .device import INTERNET, TaintedValue
from .errors import MissingPermission
from .trace import Trace, TraceKind

if TYPE_CHECKING:
    from .runtime import ComponentInstance, RuntimeState


def _append(rt: "RuntimeState", ctx: "ComponentInstance", kind: TraceKind, **payload):
    return rt.trace.append(rt.virtual_now_millis, kind, ctx.name,
                           componentKind=ctx.decl.kind, **payload)


def log_write(rt, ctx, priority: str, tag: str, message: TaintedValue):
    _append(rt, ctx, TraceKind.LOG, priority=priority, tag=tag, message=message)
    return rt


def toast_show(rt, ctx, message: TaintedValue):
    _append(rt, ctx, TraceKind.TOAST, message=message)
    return rt


def store_write(rt, ctx, key: str, value: TaintedValue):
    _append(rt, ctx, TraceKind.STORE, key=key, value=value)
    return rt


def net_send(rt, ctx, endpoint: str, payload: TaintedValue):
    """Record a simulated upload. Nothing leaves the process."""
    if INTERNET not in rt.app.permissions:
        raise MissingPermission(INTERNET)
    _append(rt, ctx, TraceKind.NET_SEND, endpoint=endpoint, payload=payload)
    return rt


def logcat_line(entry) -> str:
    return f"{entry.payload['priority']}/{entry.payload['tag']}: {entry.payload['message'].value}"


def render_logcat(trace: Trace) -> str:
    return "".join(logcat_line(e) + "\n" for e in trace if e.kind is TraceKind.LOG)


def _escape_field(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def render_store_dump(trace: Trace) -> str:
    """One ``key<TAB>value<TAB>labels`` line per store write, in seq order.

    Backslash, tab and newline inside keys or values are backslash-escaped.
    """
    lines = []
    for e in trace.of_kind(TraceKind.STORE):
        value = e.payload["value"]
        lines.append(f"{_escape_field(e.payload['key'])}\t{_escape_field(value.value)}\t"
                     f"{','.join(value.labels)}\n")
    return "".join(lines)
