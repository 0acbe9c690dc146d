"""Sandbox simulator of the Android component model with taint tracking.

Typical use::

    from leaksim import load_fixture_scenario, replay, build_report
    app, device, script = load_fixture_scenario()
    rt = replay(app, device, script)
    report = build_report(rt.trace)
"""

from .descriptor import (
    AppDescriptor,
    EventScript,
    UserEvent,
    parse_app_descriptor,
    parse_device_profile,
    parse_event_script,
    validate_app,
)
from .device import DeviceProfile, SourceField, TaintedValue
from .fixtures import APP, DEVICE, EVENTS, read_text
from .report import build_report, extract_flows, render_report
from .runtime import boot, dispatch_event, replay
from .sinks import render_logcat, render_store_dump
from .trace import Trace, TraceKind

__version__ = "0.1.0"


def load_fixture_scenario():
    """Return the bundled (app, device, script) triple."""
    return (
        parse_app_descriptor(read_text(APP)),
        parse_device_profile(read_text(DEVICE)),
        parse_event_script(read_text(EVENTS)),
    )
