"""Independent reference models used as test oracles.

Written against the raw JSON documents, without importing the engine, so a
bug in the engine cannot also hide in its oracle.
"""

from __future__ import annotations

import re
from collections import deque

GATED_FIELDS = {"IMEI", "MSISDN", "SOFTWARE_VERSION"}

# Legal service lifecycle edges: state -> {callback: next state}.
SERVICE_EDGES = {
    "declared": {"onCreate": "created"},
    "created": {"onStart": "running"},
    "running": {"onStart": "running", "onDestroy": "destroyed"},
    "destroyed": {"onCreate": "created"},
}

CALLBACK_SEQUENCE = re.compile(r"(C (S )+D )*(C (S )+(D )?)?")
_TOKENS = {"onCreate": "C", "onStart": "S", "onDestroy": "D"}


def matches_lifecycle_regex(callbacks: list[str]) -> bool:
    """onCreate (onStart)+ onDestroy? per instance, instances back to back."""
    return CALLBACK_SEQUENCE.fullmatch("".join(_TOKENS[c] + " " for c in callbacks)) is not None


def accepted_by_state_machine(callbacks: list[str]) -> bool:
    state = "declared"
    for cb in callbacks:
        nxt = SERVICE_EDGES[state].get(cb)
        if nxt is None:
            return False
        state = nxt
    return True


def predict_service_callbacks(app_doc: dict, events: list[dict]) -> dict[str, list[str]]:
    """Expected callback names per service for a fault-free-intent app.

    Models a FIFO intent queue drained after each user event; a gated read
    without READ_PHONE_STATE aborts the rest of the action list and runs the
    catch list, where a second such read ends the callback.
    """
    comps = {c["name"]: c for c in app_doc["components"]}
    granted = "android.permission.READ_PHONE_STATE" in app_doc["permissions"]
    services = [c["name"] for c in app_doc["components"] if c["kind"] == "service"]
    alive = {s: False for s in services}
    seen: dict[str, list[str]] = {s: [] for s in services}
    created_activities = set()
    queue: deque = deque()

    def faults(action):
        return action["op"] == "readSource" and action["field"] in GATED_FIELDS and not granted

    def run(name, key):
        comp = comps[name]
        if comp["kind"] == "service":
            seen[name].append(key)
        actions = comp.get("handlers", {}).get(key)
        if actions is None:
            return
        for lst in (actions, comp.get("catch", {}).get(key)):
            if lst is None:
                return
            for action in lst:
                if faults(action):
                    break
                if action["op"] in ("startService", "stopService"):
                    queue.append((action["op"], action["target"]))
            else:
                return  # completed without fault: no catch

    def drain():
        while queue:
            op, target = queue.popleft()
            if op == "startService":
                if not alive[target]:
                    alive[target] = True
                    run(target, "onCreate")
                run(target, "onStart")
            elif alive[target]:
                run(target, "onDestroy")
                alive[target] = False

    foreground = None
    for ev in events:
        if ev["kind"] == "launch":
            foreground = ev["activity"]
            if foreground not in created_activities:
                created_activities.add(foreground)
                run(foreground, "onCreate")
        else:
            run(foreground, f"onClick:{ev['button']}")
        drain()
    return seen
