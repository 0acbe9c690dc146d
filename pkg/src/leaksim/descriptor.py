"""Loading and validation of app descriptors, device profiles and event scripts.

All three documents are JSON. Parsing is all-or-nothing: a document either
yields a fully valid object or raises exactly one DescriptorError subclass.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from . import device
from .device import PERMISSION_MAP, DeviceProfile, SourceField
from .errors import (
    DanglingServiceTarget,
    DuplicateComponentName,
    FirstEventNotLaunch,
    InvalidFieldValue,
    InvalidHandlerKey,
    MainActivityViolation,
    MalformedDocument,
    NonMonotonicTimestamps,
    UnknownActionOp,
    UnknownComponentKind,
    UnboundVariable,
)

ACTIVITY = "activity"
SERVICE = "service"
COMPONENT_KINDS = (ACTIVITY, SERVICE)
SERVICE_HANDLERS = ("onCreate", "onStart", "onDestroy")
PRIORITIES = ("D", "I", "E")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_PACKAGE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)+\Z")
_TEMPLATE_TOKEN = re.compile(r"\{\{|\}\}|\{([A-Za-z_][A-Za-z0-9_]*)\}|\{|[^{}]+|\}")


# --- templates -------------------------------------------------------------


def parse_template(template: str) -> list[tuple[str, str]]:
    """Split a template into ``("lit", text)`` and ``("var", name)`` parts.

    ``{{`` and ``}}`` are literal braces; a lone ``}`` is literal too. A ``{``
    that does not open a valid placeholder raises ValueError.
    """
    parts: list[tuple[str, str]] = []
    for m in _TEMPLATE_TOKEN.finditer(template):
        tok = m.group(0)
        if m.group(1) is not None:
            parts.append(("var", m.group(1)))
            continue
        if tok == "{":
            raise ValueError(f"unterminated or invalid placeholder at offset {m.start()} in {template!r}")
        text = "{" if tok == "{{" else "}" if tok == "}}" else tok
        if parts and parts[-1][0] == "lit":
            parts[-1] = ("lit", parts[-1][1] + text)
        else:
            parts.append(("lit", text))
    return parts


def template_vars(template: str) -> list[str]:
    return [name for kind, name in parse_template(template) if kind == "var"]


def escape_literal(text: str) -> str:
    return text.replace("{", "{{").replace("}", "}}")


def eval_template(template: str, variables: dict) -> device.TaintedValue:
    """Interpolate ``{var}`` placeholders; the result carries the union of
    the substituted values' taints."""
    out = []
    taints: set = set()
    for kind, text in parse_template(template):
        if kind == "lit":
            out.append(text)
            continue
        try:
            bound = variables[text]
        except KeyError:
            raise UnboundVariable(text) from None
        out.append(bound.value)
        taints |= bound.taints
    return device.TaintedValue("".join(out), frozenset(taints))


# --- actions ---------------------------------------------------------------


@dataclass(frozen=True)
class ReadSource:
    field: SourceField
    var: str
    op = "readSource"


@dataclass(frozen=True)
class ReadClock:
    time_var: str
    date_var: str
    op = "readClock"


@dataclass(frozen=True)
class SetCriteriaAccuracy:
    value: int
    op = "setCriteriaAccuracy"


@dataclass(frozen=True)
class Log:
    priority: str
    tag: str
    template: str
    op = "log"


@dataclass(frozen=True)
class Toast:
    template: str
    op = "toast"


@dataclass(frozen=True)
class StartService:
    target: str
    op = "startService"


@dataclass(frozen=True)
class StopService:
    target: str
    op = "stopService"


@dataclass(frozen=True)
class Store:
    key: str
    template: str
    op = "store"


@dataclass(frozen=True)
class Send:
    endpoint: str
    template: str
    op = "send"


Action = Union[ReadSource, ReadClock, SetCriteriaAccuracy, Log, Toast,
               StartService, StopService, Store, Send]

# op -> (class, [(json key, attribute, kind)])
_ACTION_SCHEMA: dict[str, tuple[type, list[tuple[str, str, str]]]] = {
    "readSource": (ReadSource, [("field", "field", "source"), ("var", "var", "ident")]),
    "readClock": (ReadClock, [("timeVar", "time_var", "ident"), ("dateVar", "date_var", "ident")]),
    "setCriteriaAccuracy": (SetCriteriaAccuracy, [("value", "value", "int")]),
    "log": (Log, [("priority", "priority", "priority"), ("tag", "tag", "str"),
                  ("template", "template", "template")]),
    "toast": (Toast, [("template", "template", "template")]),
    "startService": (StartService, [("target", "target", "ident")]),
    "stopService": (StopService, [("target", "target", "ident")]),
    "store": (Store, [("key", "key", "str"), ("template", "template", "template")]),
    "send": (Send, [("endpoint", "endpoint", "str"), ("template", "template", "template")]),
}


# --- domain types ----------------------------------------------------------


@dataclass(frozen=True)
class ComponentDecl:
    kind: str
    name: str
    main: bool = False
    buttons: tuple[str, ...] = ()
    handlers: dict[str, tuple] = field(default_factory=dict)
    catch_handlers: dict[str, tuple] = field(default_factory=dict)

    @property
    def is_service(self) -> bool:
        return self.kind == SERVICE

    def valid_handler_keys(self) -> set[str]:
        if self.is_service:
            return set(SERVICE_HANDLERS)
        return {"onCreate"} | {f"onClick:{b}" for b in self.buttons}


@dataclass(frozen=True)
class AppDescriptor:
    package: str
    min_api: int
    permissions: frozenset = frozenset()
    components: tuple[ComponentDecl, ...] = ()

    def component(self, name: str) -> Optional[ComponentDecl]:
        for c in self.components:
            if c.name == name:
                return c
        return None

    @property
    def main_activity(self) -> Optional[ComponentDecl]:
        for c in self.components:
            if c.kind == ACTIVITY and c.main:
                return c
        return None


@dataclass(frozen=True)
class UserEvent:
    at_millis: int
    kind: str
    activity: Optional[str] = None
    button: Optional[str] = None

    def describe(self) -> str:
        target = self.activity if self.kind == "launch" else self.button
        return f"{self.kind}:{target}@{self.at_millis}"

    def to_json(self) -> dict:
        obj: dict[str, Any] = {"atMillis": self.at_millis, "kind": self.kind}
        if self.kind == "launch":
            obj["activity"] = self.activity
        else:
            obj["button"] = self.button
        return obj


@dataclass(frozen=True)
class EventScript:
    events: tuple[UserEvent, ...] = ()

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)


# --- shared parsing helpers ------------------------------------------------


def _load_json(text: str):
    try:
        return json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from None


def _require_object(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise MalformedDocument(f"{where} must be an object")
    return obj


def _require_list(obj, where: str) -> list:
    if not isinstance(obj, list):
        raise MalformedDocument(f"{where} must be a list")
    return obj


def _reject_unknown(obj: dict, allowed, where: str) -> None:
    extra = [k for k in obj if k not in allowed]
    if extra:
        raise MalformedDocument(f"{where}: unknown field(s) {', '.join(map(repr, extra))}")


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _field(obj: dict, key: str, where: str):
    if key not in obj:
        raise MalformedDocument(f"{where}: missing field {key!r}")
    return obj[key]


def _str_value(value, where: str) -> str:
    if not isinstance(value, str):
        raise InvalidFieldValue(f"{where} must be a string, got {value!r}")
    return value


def _ident_value(value, where: str) -> str:
    if not isinstance(value, str) or not _IDENT.match(value):
        raise InvalidFieldValue(f"{where} must be an identifier, got {value!r}")
    return value


# --- app descriptor --------------------------------------------------------


def _parse_action(raw, where: str) -> Action:
    raw = _require_object(raw, where)
    op = _field(raw, "op", where)
    if op not in _ACTION_SCHEMA:
        raise UnknownActionOp(str(op), where)
    cls, schema = _ACTION_SCHEMA[op]
    _reject_unknown(raw, ["op"] + [k for k, _, _ in schema], where)
    kwargs = {}
    for key, attr, kind in schema:
        value = _field(raw, key, where)
        loc = f"{where}.{key}"
        if kind == "source":
            try:
                value = SourceField.from_label(value) if isinstance(value, str) else None
            except ValueError:
                value = None
            if value is None:
                raise InvalidFieldValue(f"{loc}: unknown source field {raw[key]!r}")
        elif kind == "ident":
            value = _ident_value(value, loc)
        elif kind == "int":
            if not _is_int(value):
                raise InvalidFieldValue(f"{loc} must be an integer, got {value!r}")
        elif kind == "priority":
            if value not in PRIORITIES:
                raise InvalidFieldValue(f"{loc} must be one of D/I/E, got {value!r}")
        elif kind == "template":
            _str_value(value, loc)
            try:
                parse_template(value)
            except ValueError as exc:
                raise MalformedDocument(f"{loc}: {exc}") from None
        else:
            value = _str_value(value, loc)
        kwargs[attr] = value
    return cls(**kwargs)


def _parse_handler_map(raw, decl_kind: str, name: str, buttons, section: str) -> dict:
    raw = _require_object(raw, f"component {name!r} {section}")
    if decl_kind == SERVICE:
        valid = set(SERVICE_HANDLERS)
    else:
        valid = {"onCreate"} | {f"onClick:{b}" for b in buttons}
    out = {}
    for key, actions in raw.items():
        if key not in valid:
            raise InvalidHandlerKey(f"component {name!r} ({decl_kind}) has invalid {section} key {key!r}")
        where = f"{name}.{section}[{key}]"
        actions = _require_list(actions, where)
        out[key] = tuple(_parse_action(a, f"{where}#{i}") for i, a in enumerate(actions))
    return out


def _parse_component(raw, index: int) -> ComponentDecl:
    where = f"components[{index}]"
    raw = _require_object(raw, where)
    name = _ident_value(_field(raw, "name", where), f"{where}.name")
    kind = _field(raw, "kind", where)
    if kind not in COMPONENT_KINDS:
        raise UnknownComponentKind(name, str(kind))
    allowed = ["kind", "name", "handlers", "catch"]
    if kind == ACTIVITY:
        allowed += ["main", "buttons"]
    _reject_unknown(raw, allowed, f"component {name!r}")

    main = raw.get("main", False)
    if not isinstance(main, bool):
        raise InvalidFieldValue(f"component {name!r}: main must be a boolean")
    buttons = _require_list(raw.get("buttons", []), f"component {name!r} buttons")
    for b in buttons:
        _ident_value(b, f"component {name!r} button")
    if len(set(buttons)) != len(buttons):
        raise InvalidFieldValue(f"component {name!r} declares a button twice")

    handlers = _parse_handler_map(raw.get("handlers", {}), kind, name, buttons, "handlers")
    catches = _parse_handler_map(raw.get("catch", {}), kind, name, buttons, "catch")
    return ComponentDecl(kind=kind, name=name, main=main, buttons=tuple(buttons),
                         handlers=handlers, catch_handlers=catches)


def app_from_json(doc) -> AppDescriptor:
    doc = _require_object(doc, "app descriptor")
    _reject_unknown(doc, ["package", "minApi", "permissions", "components"], "app descriptor")
    package = _field(doc, "package", "app descriptor")
    if not isinstance(package, str) or not _PACKAGE.match(package):
        raise InvalidFieldValue(f"package must be a reverse-dot identifier, got {package!r}")
    min_api = _field(doc, "minApi", "app descriptor")
    if not _is_int(min_api) or min_api < 1:
        raise InvalidFieldValue(f"minApi must be a positive integer, got {min_api!r}")
    perms = _require_list(doc.get("permissions", []), "permissions")
    for p in perms:
        _str_value(p, "permission")

    raw_components = _require_list(doc.get("components", []), "components")
    components = []
    seen = set()
    for i, raw in enumerate(raw_components):
        comp = _parse_component(raw, i)
        if comp.name in seen:
            raise DuplicateComponentName(comp.name)
        seen.add(comp.name)
        components.append(comp)

    activities = [c for c in components if c.kind == ACTIVITY]
    mains = [c.name for c in activities if c.main]
    if activities and len(mains) != 1:
        raise MainActivityViolation(
            f"exactly one activity must be main, found {len(mains)}: {mains}")

    services = {c.name for c in components if c.is_service}
    for comp in components:
        for section, table in (("handlers", comp.handlers), ("catch", comp.catch_handlers)):
            for key, actions in table.items():
                for action in actions:
                    if isinstance(action, (StartService, StopService)) and action.target not in services:
                        raise DanglingServiceTarget(action.target, f"{comp.name}.{section}[{key}]")

    return AppDescriptor(package=package, min_api=min_api,
                         permissions=frozenset(perms), components=tuple(components))


def parse_app_descriptor(text: str) -> AppDescriptor:
    return app_from_json(_load_json(text))


def _action_to_json(action: Action) -> dict:
    _, schema = _ACTION_SCHEMA[action.op]
    obj = {"op": action.op}
    for key, attr, kind in schema:
        value = getattr(action, attr)
        obj[key] = value.label if kind == "source" else value
    return obj


def app_to_json(app: AppDescriptor) -> dict:
    comps = []
    for c in app.components:
        obj: dict[str, Any] = {"kind": c.kind, "name": c.name}
        if c.kind == ACTIVITY:
            obj["main"] = c.main
            obj["buttons"] = list(c.buttons)
        obj["handlers"] = {k: [_action_to_json(a) for a in v] for k, v in c.handlers.items()}
        if c.catch_handlers:
            obj["catch"] = {k: [_action_to_json(a) for a in v] for k, v in c.catch_handlers.items()}
        comps.append(obj)
    return {
        "package": app.package,
        "minApi": app.min_api,
        "permissions": sorted(app.permissions),
        "components": comps,
    }


def render_app_descriptor(app: AppDescriptor) -> str:
    return json.dumps(app_to_json(app), indent=2) + "\n"


# --- device profile --------------------------------------------------------

_DEVICE_FIELDS = {
    "imei": "imei",
    "msisdn": "msisdn",
    "networkOperatorName": "network_operator_name",
    "networkType": "network_type",
    "networkCountryIso": "network_country_iso",
    "deviceSoftwareVersion": "device_software_version",
    "phoneType": "phone_type",
    "clockEpochMillis": "clock_epoch_millis",
}
# Largest instant the date renderer can represent (year 9999).
_MAX_CLOCK = 253402300799999


def _check_device_field(key: str, value) -> None:
    bad = False
    if key == "imei":
        bad = not (isinstance(value, str) and value.isascii() and value.isdigit())
    elif key == "msisdn":
        bad = not (isinstance(value, str) and value.isascii() and (value == "" or value.isdigit()))
    elif key in ("networkOperatorName", "deviceSoftwareVersion"):
        bad = not isinstance(value, str)
    elif key == "networkCountryIso":
        bad = not (isinstance(value, str) and re.fullmatch(r"[a-z]{2}", value))
    elif key == "networkType":
        bad = not (_is_int(value) and value >= 0)
    elif key == "phoneType":
        bad = not (_is_int(value) and value in (0, 1, 2))
    elif key == "clockEpochMillis":
        bad = not (_is_int(value) and 0 <= value <= _MAX_CLOCK)
    if bad:
        raise InvalidFieldValue(f"device field {key!r} has invalid value {value!r}")


def device_from_json(doc) -> DeviceProfile:
    doc = _require_object(doc, "device profile")
    _reject_unknown(doc, _DEVICE_FIELDS, "device profile")
    kwargs = {}
    for key, attr in _DEVICE_FIELDS.items():
        if key in doc:
            _check_device_field(key, doc[key])
            kwargs[attr] = doc[key]
    return DeviceProfile(**kwargs)


def parse_device_profile(text: str) -> DeviceProfile:
    return device_from_json(_load_json(text))


def device_to_json(profile: DeviceProfile) -> dict:
    return {key: getattr(profile, attr) for key, attr in _DEVICE_FIELDS.items()}


def render_device_profile(profile: DeviceProfile) -> str:
    return json.dumps(device_to_json(profile), indent=2) + "\n"


# --- event script ----------------------------------------------------------


def _parse_event(raw, index: int) -> UserEvent:
    where = f"events[{index}]"
    raw = _require_object(raw, where)
    at = _field(raw, "atMillis", where)
    if not _is_int(at) or at < 0:
        raise InvalidFieldValue(f"{where}.atMillis must be a non-negative integer, got {at!r}")
    kind = _field(raw, "kind", where)
    if kind == "launch":
        _reject_unknown(raw, ["atMillis", "kind", "activity"], where)
        return UserEvent(at, kind, activity=_ident_value(_field(raw, "activity", where), f"{where}.activity"))
    if kind == "click":
        _reject_unknown(raw, ["atMillis", "kind", "button"], where)
        return UserEvent(at, kind, button=_ident_value(_field(raw, "button", where), f"{where}.button"))
    raise InvalidFieldValue(f"{where}.kind must be 'launch' or 'click', got {kind!r}")


def script_from_json(doc) -> EventScript:
    raw = _require_list(doc, "event script")
    events = [_parse_event(e, i) for i, e in enumerate(raw)]
    if events and events[0].kind != "launch":
        raise FirstEventNotLaunch(f"first event must be a launch, got {events[0].describe()}")
    for prev, cur in zip(events, events[1:]):
        if cur.at_millis <= prev.at_millis:
            raise NonMonotonicTimestamps(
                f"event at {cur.at_millis} does not follow {prev.at_millis}")
    return EventScript(tuple(events))


def parse_event_script(text: str) -> EventScript:
    return script_from_json(_load_json(text))


def render_event_script(script: EventScript) -> str:
    return json.dumps([e.to_json() for e in script.events], indent=2) + "\n"


# --- semantic lint ---------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    severity: str  # "WARN" or "INFO"
    message: str
    component: Optional[str] = None
    handler: Optional[str] = None

    def __str__(self) -> str:
        loc = f" [{self.component}.{self.handler}]" if self.component else ""
        return f"{self.severity}{loc}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def clean(self) -> bool:
        return not self.findings

    def __iter__(self):
        return iter(self.findings)

    def __len__(self):
        return len(self.findings)


def _iter_actions(app: AppDescriptor):
    for comp in app.components:
        for table in (comp.handlers, comp.catch_handlers):
            for key, actions in table.items():
                for action in actions:
                    yield comp, key, action


def validate_app(app: AppDescriptor) -> ValidationReport:
    """Flag reads that will fault for lack of a permission (WARN) and
    permissions nothing uses (INFO). Findings follow document order."""
    findings = []
    used = set()
    for comp, key, action in _iter_actions(app):
        if isinstance(action, ReadSource):
            needed = PERMISSION_MAP[action.field]
        elif isinstance(action, Send):
            needed = device.INTERNET
        else:
            continue
        if needed is None:
            continue
        used.add(needed)
        if needed not in app.permissions:
            what = (f"readSource({action.field.label}) into {action.var!r}"
                    if isinstance(action, ReadSource) else f"send to {action.endpoint!r}")
            findings.append(Finding("WARN", f"{what} requires undeclared permission {needed}",
                                    comp.name, key))
    for perm in sorted(app.permissions):
        if perm not in used:
            findings.append(Finding("INFO", f"permission {perm} is declared but never used"))
    return ValidationReport(tuple(findings))
