"""Deterministic lifecycle engine for activities and started services.

Execution is run-to-completion: a user event and every intent it causes are
fully processed before the next event. Intents raised from inside a handler
are queued and delivered, in order, once the handler returns, mirroring the
platform's main-looper delivery. A started service goes through

    DECLARED -> CREATED (onCreate) -> RUNNING (onStart, repeatable) -> DESTROYED (onDestroy)

and a start after DESTROYED creates a fresh instance.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from . import sinks
from .descriptor import (
    ACTIVITY,
    AppDescriptor,
    ComponentDecl,
    EventScript,
    Log,
    ReadClock,
    ReadSource,
    Send,
    SetCriteriaAccuracy,
    StartService,
    StopService,
    Store,
    Toast,
    UserEvent,
    eval_template,
)
from .device import Criteria, DeviceProfile, read_clock, read_source, set_criteria_accuracy
from .errors import (
    CascadeLimitExceeded,
    EventOutOfOrder,
    Fault,
    NoForegroundActivity,
    TargetNotService,
    UnknownActivity,
    UnknownButton,
)
from .trace import Trace, TraceKind

__all__ = [
    "InstanceState", "ComponentInstance", "Intent", "RuntimeState",
    "boot", "dispatch_event", "start_service", "stop_service", "run_handler",
    "eval_template", "replay",
]

# Upper bound on intents delivered for one user event; guards against
# services that restart themselves from their own callbacks.
CASCADE_LIMIT = 1000


class InstanceState(str, enum.Enum):
    DECLARED = "DECLARED"
    CREATED = "CREATED"
    RUNNING = "RUNNING"
    DESTROYED = "DESTROYED"


@dataclass
class ComponentInstance:
    decl: ComponentDecl
    state: InstanceState = InstanceState.DECLARED
    vars: dict = field(default_factory=dict)
    created_at_millis: Optional[int] = None
    criteria: Optional[Criteria] = None

    @property
    def name(self) -> str:
        return self.decl.name

    @property
    def alive(self) -> bool:
        return self.state in (InstanceState.CREATED, InstanceState.RUNNING)


@dataclass(frozen=True)
class Intent:
    source_component: str
    target_component: str


@dataclass
class RuntimeState:
    app: AppDescriptor
    device: DeviceProfile
    instances: dict = field(default_factory=dict)
    trace: Trace = field(default_factory=Trace)
    virtual_now_millis: int = 0
    foreground_activity: Optional[str] = None
    retired: list = field(default_factory=list)
    pending: deque = field(default_factory=deque)


def boot(app: AppDescriptor, device: DeviceProfile) -> RuntimeState:
    return RuntimeState(app=app, device=device,
                        instances={c.name: ComponentInstance(c) for c in app.components})


# --- handler execution -----------------------------------------------------


def _execute(rt: RuntimeState, inst: ComponentInstance, action) -> None:
    if isinstance(action, ReadSource):
        inst.vars[action.var] = read_source(rt.device, action.field, rt.app.permissions)
        rt.trace.append(rt.virtual_now_millis, TraceKind.SOURCE_READ, inst.name,
                        field=action.field.label, var=action.var)
    elif isinstance(action, ReadClock):
        inst.vars[action.time_var], inst.vars[action.date_var] = read_clock(rt.device)
    elif isinstance(action, SetCriteriaAccuracy):
        inst.criteria = set_criteria_accuracy(action.value)
        rt.trace.append(rt.virtual_now_millis, TraceKind.CRITERIA_SET, inst.name,
                        accuracy=inst.criteria.accuracy)
    elif isinstance(action, Log):
        sinks.log_write(rt, inst, action.priority, action.tag,
                        eval_template(action.template, inst.vars))
    elif isinstance(action, Toast):
        sinks.toast_show(rt, inst, eval_template(action.template, inst.vars))
    elif isinstance(action, Store):
        sinks.store_write(rt, inst, action.key, eval_template(action.template, inst.vars))
    elif isinstance(action, Send):
        sinks.net_send(rt, inst, action.endpoint, eval_template(action.template, inst.vars))
    elif isinstance(action, StartService):
        rt.pending.append(("start", Intent(inst.name, action.target)))
    elif isinstance(action, StopService):
        rt.pending.append(("stop", Intent(inst.name, action.target)))
    else:  # pragma: no cover - parser only builds known actions
        raise TypeError(f"unsupported action {action!r}")


def _action_label(action) -> str:
    if isinstance(action, ReadSource):
        return f"readSource:{action.field.label}"
    return action.op


def _record_fault(rt: RuntimeState, inst: ComponentInstance, handler_key: str,
                  fault: Fault, phase: str, action) -> None:
    payload = {"error": fault.kind, "handler": handler_key, "phase": phase,
               "action": _action_label(action), "detail": str(fault)}
    permission = getattr(fault, "permission", None)
    if permission is not None:
        payload["permission"] = permission
    rt.trace.append(rt.virtual_now_millis, TraceKind.FAULT, inst.name, **payload)


def _run_actions(rt, inst, actions, handler_key: str, phase: str) -> bool:
    for action in actions:
        try:
            _execute(rt, inst, action)
        except Fault as fault:
            _record_fault(rt, inst, handler_key, fault, phase, action)
            return False
    return True


def run_handler(rt: RuntimeState, instance: ComponentInstance, handler_key: str) -> RuntimeState:
    """Run one callback with try/catch semantics.

    A fault skips the rest of the handler, is recorded, and hands control to
    the catch list for the same key; a fault inside the catch list is
    recorded and ends the callback. Nothing propagates to the caller.
    """
    actions = instance.decl.handlers.get(handler_key)
    rt.trace.append(rt.virtual_now_millis, TraceKind.CALLBACK, instance.name,
                    handler=handler_key, absent=actions is None)
    if actions is None:
        return rt
    if not _run_actions(rt, instance, actions, handler_key, "try"):
        catch = instance.decl.catch_handlers.get(handler_key)
        if catch is not None:
            _run_actions(rt, instance, catch, handler_key, "catch")
    return rt


# --- services --------------------------------------------------------------


def _service_instance(rt: RuntimeState, intent: Intent) -> ComponentInstance:
    decl = rt.app.component(intent.target_component)
    if decl is None or not decl.is_service:
        raise TargetNotService(f"{intent.target_component!r} is not a declared service")
    return rt.instances[decl.name]


def _start(rt: RuntimeState, intent: Intent) -> None:
    inst = _service_instance(rt, intent)
    if not inst.alive:
        if inst.state is InstanceState.DESTROYED:
            rt.retired.append(inst)
            inst = ComponentInstance(inst.decl)
            rt.instances[inst.name] = inst
        inst.state = InstanceState.CREATED
        inst.created_at_millis = rt.virtual_now_millis
        run_handler(rt, inst, "onCreate")
    inst.state = InstanceState.RUNNING
    run_handler(rt, inst, "onStart")


def _stop(rt: RuntimeState, intent: Intent) -> None:
    inst = _service_instance(rt, intent)
    if not inst.alive:
        return
    run_handler(rt, inst, "onDestroy")
    inst.state = InstanceState.DESTROYED
    inst.vars.clear()


def _drain(rt: RuntimeState) -> None:
    delivered = 0
    while rt.pending:
        op, intent = rt.pending.popleft()
        delivered += 1
        if delivered > CASCADE_LIMIT:
            rt.pending.clear()
            rt.trace.append(rt.virtual_now_millis, TraceKind.FAULT, intent.source_component,
                            error=CascadeLimitExceeded.__name__, handler=None, phase="dispatch",
                            action=op + "Service", detail=str(CascadeLimitExceeded(CASCADE_LIMIT)))
            return
        (_start if op == "start" else _stop)(rt, intent)


def start_service(rt: RuntimeState, intent: Intent) -> RuntimeState:
    _start(rt, intent)
    _drain(rt)
    return rt


def stop_service(rt: RuntimeState, intent: Intent) -> RuntimeState:
    _stop(rt, intent)
    _drain(rt)
    return rt


# --- user events -----------------------------------------------------------


def dispatch_event(rt: RuntimeState, event: UserEvent) -> RuntimeState:
    """Deliver one user event and everything it cascades into."""
    if event.at_millis < rt.virtual_now_millis:
        raise EventOutOfOrder(f"event at {event.at_millis} precedes virtual time {rt.virtual_now_millis}")
    if event.kind == "launch":
        decl = rt.app.component(event.activity)
        if decl is None or decl.kind != ACTIVITY:
            raise UnknownActivity(f"{event.activity!r} is not a declared activity")
        target = decl.name
    else:
        if rt.foreground_activity is None:
            raise NoForegroundActivity(f"click on {event.button!r} before any activity was launched")
        target = rt.foreground_activity
        if event.button not in rt.instances[target].decl.buttons:
            raise UnknownButton(f"activity {target!r} has no button {event.button!r}")

    rt.virtual_now_millis = event.at_millis
    payload = {"event": event.kind}
    payload["activity" if event.kind == "launch" else "button"] = (
        event.activity if event.kind == "launch" else event.button)
    rt.trace.append(rt.virtual_now_millis, TraceKind.USER_EVENT, target, **payload)

    inst = rt.instances[target]
    if event.kind == "launch":
        rt.foreground_activity = target
        if inst.state is InstanceState.DECLARED:
            inst.state = InstanceState.CREATED
            inst.created_at_millis = rt.virtual_now_millis
            run_handler(rt, inst, "onCreate")
    else:
        run_handler(rt, inst, f"onClick:{event.button}")
    _drain(rt)
    return rt


def replay(app: AppDescriptor, device: DeviceProfile, script: EventScript) -> RuntimeState:
    rt = boot(app, device)
    for event in script:
        dispatch_event(rt, event)
    return rt
