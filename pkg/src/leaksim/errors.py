"""Exception hierarchy.

Document errors are raised at parse time and abort loading. Faults are raised
while a handler executes and are absorbed by the runtime's catch path; they
never escape a run. Dispatch errors reject a user event outright.
"""

from __future__ import annotations


class LeaksimError(Exception):
    """Base class for every error raised by this package."""


# --- document errors -------------------------------------------------------


class DescriptorError(LeaksimError):
    """A document (app, device profile or event script) failed to load."""


class MalformedDocument(DescriptorError):
    pass


class InvalidFieldValue(DescriptorError):
    pass


class UnknownComponentKind(DescriptorError):
    def __init__(self, component: str, kind: str):
        super().__init__(f"component {component!r} has unsupported kind {kind!r}")
        self.component = component
        self.kind = kind


class DuplicateComponentName(DescriptorError):
    def __init__(self, name: str):
        super().__init__(f"component name {name!r} declared more than once")
        self.name = name


class UnknownActionOp(DescriptorError):
    def __init__(self, op: str, where: str):
        super().__init__(f"unknown action op {op!r} in {where}")
        self.op = op


class DanglingServiceTarget(DescriptorError):
    def __init__(self, target: str, where: str):
        super().__init__(f"{where} targets {target!r}, which is not a declared service")
        self.target = target


class InvalidHandlerKey(DescriptorError):
    pass


class MainActivityViolation(DescriptorError):
    pass


class NonMonotonicTimestamps(DescriptorError):
    pass


class FirstEventNotLaunch(DescriptorError):
    pass


# --- handler faults --------------------------------------------------------


class Fault(LeaksimError):
    """Raised inside a handler; routed to the handler's catch list."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class PermissionFault(Fault):
    def __init__(self, permission: str):
        super().__init__(f"permission {permission} not granted")
        self.permission = permission


class MissingPermission(Fault):
    def __init__(self, permission: str):
        super().__init__(f"permission {permission} not granted")
        self.permission = permission


class UnboundVariable(Fault):
    def __init__(self, name: str):
        super().__init__(f"variable {name!r} is not bound")
        self.name = name


class InvalidAccuracy(Fault):
    def __init__(self, value):
        super().__init__(f"criteria accuracy must be 1 or 2, got {value!r}")
        self.value = value


class CascadeLimitExceeded(Fault):
    def __init__(self, limit: int):
        super().__init__(f"more than {limit} intents dispatched by a single user event")
        self.limit = limit


# --- dispatch errors -------------------------------------------------------


class DispatchError(LeaksimError):
    """A user event or intent could not be delivered."""


class UnknownActivity(DispatchError):
    pass


class UnknownButton(DispatchError):
    pass


class NoForegroundActivity(DispatchError):
    pass


class TargetNotService(DispatchError):
    pass


class EventOutOfOrder(DispatchError):
    pass


class UnknownFormat(LeaksimError):
    pass
