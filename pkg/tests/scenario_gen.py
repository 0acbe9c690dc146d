"""Seeded random generators for apps, event scripts and sentinel devices.

Everything is produced as plain JSON-like documents so the parser is part of
the path under test.
"""

from __future__ import annotations

import random

from leaksim.device import READ_PHONE_STATE, INTERNET, SourceField

GATED = {SourceField.IMEI, SourceField.MSISDN, SourceField.SOFTWARE_VERSION}


# --- lifecycle scenarios ---------------------------------------------------


def _intent_actions(rng: random.Random, services: list[str], allow_reads: bool) -> list[dict]:
    actions = []
    for _ in range(rng.randint(0, 4)):
        roll = rng.random()
        if services and roll < 0.6:
            op = rng.choice(["startService", "stopService"])
            actions.append({"op": op, "target": rng.choice(services)})
        elif allow_reads and roll < 0.8:
            field = rng.choice(list(SourceField))
            actions.append({"op": "readSource", "field": field.label, "var": "v"})
        else:
            actions.append({"op": "log", "priority": "D", "tag": "T", "template": "x"})
    return actions


def lifecycle_app(rng: random.Random) -> dict:
    """1-4 components; first is the main activity.

    Services only send intents to services declared after them, so every
    cascade terminates without hitting the engine's cascade limit.
    """
    n = rng.randint(1, 4)
    kinds = ["activity"] + [rng.choice(["activity", "service"]) for _ in range(n - 1)]
    names = [f"C{i}" for i in range(n)]
    services = [nm for nm, k in zip(names, kinds) if k == "service"]
    comps = []
    for i, (name, kind) in enumerate(zip(names, kinds)):
        if kind == "activity":
            buttons = [f"b{i}_{j}" for j in range(rng.randint(1, 3))]
            handlers = {"onCreate": _intent_actions(rng, services, True)}
            for b in buttons:
                if rng.random() < 0.9:
                    handlers[f"onClick:{b}"] = _intent_actions(rng, services, True)
            comps.append({"kind": "activity", "name": name, "main": i == 0,
                          "buttons": buttons, "handlers": handlers})
        else:
            later = [s for s in services if int(s[1:]) > i]
            handlers, catch = {}, {}
            for key in ("onCreate", "onStart", "onDestroy"):
                if rng.random() < 0.85:
                    handlers[key] = _intent_actions(rng, later, True)
                if rng.random() < 0.3:
                    catch[key] = _intent_actions(rng, later, False)
            comps.append({"kind": "service", "name": name, "handlers": handlers, "catch": catch})
    perms = [READ_PHONE_STATE] if rng.random() < 0.5 else []
    return {"package": "com.example.gen", "minApi": 7, "permissions": perms, "components": comps}


def lifecycle_events(rng: random.Random, app_doc: dict) -> list[dict]:
    activities = {c["name"]: c["buttons"] for c in app_doc["components"] if c["kind"] == "activity"}
    main = app_doc["components"][0]["name"]
    events = [{"atMillis": 0, "kind": "launch", "activity": main}]
    fg = main
    t = 0
    for _ in range(rng.randint(0, 30)):
        t += rng.randint(1, 500)
        if rng.random() < 0.15:
            fg = rng.choice(sorted(activities))
            events.append({"atMillis": t, "kind": "launch", "activity": fg})
        else:
            events.append({"atMillis": t, "kind": "click", "button": rng.choice(activities[fg])})
    return events


# --- taint scenarios -------------------------------------------------------

# Literal text in generated templates is drawn only from punctuation, so the
# only letter/digit runs in any rendered value come from device data.
PUNCT = "-:=|/ ;,."
_RARE_LOWER = "jkqwxz"  # letters absent from every rendered date
_UPPER = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _digits(rng: random.Random, n: int) -> str:
    return str(rng.randint(1, 9)) + "".join(str(rng.randint(0, 9)) for _ in range(n - 1))


def sentinel_device(rng: random.Random) -> dict:
    """Device document whose string fields are globally unique sentinels.

    Digit sentinels are regenerated until none is a substring of another or
    of the clock rendering. PHONE_TYPE is restricted to a single digit and
    therefore cannot be unique.
    """
    while True:
        doc = {
            "imei": _digits(rng, 15),
            "msisdn": _digits(rng, 11),
            "networkOperatorName": "OPR" + "".join(rng.choice(_UPPER) for _ in range(8)),
            "networkType": int(_digits(rng, 7)),
            "networkCountryIso": "".join(rng.choice(_RARE_LOWER) for _ in range(2)),
            "deviceSoftwareVersion": "VER" + "".join(rng.choice(_UPPER) for _ in range(8)),
            "phoneType": rng.randint(0, 2),
            "clockEpochMillis": rng.randint(0, 4_000_000_000_000),
        }
        digit_runs = [doc["imei"], doc["msisdn"], str(doc["networkType"]), str(doc["clockEpochMillis"])]
        if all(a not in b for a in digit_runs for b in digit_runs if a is not b):
            return doc


def sentinels(device_doc: dict) -> dict:
    """SourceField -> sentinel string, for the fields that are unique."""
    return {
        SourceField.IMEI: device_doc["imei"],
        SourceField.MSISDN: device_doc["msisdn"],
        SourceField.NETWORK_OPERATOR: device_doc["networkOperatorName"],
        SourceField.NETWORK_TYPE: str(device_doc["networkType"]),
        SourceField.COUNTRY_ISO: device_doc["networkCountryIso"],
        SourceField.SOFTWARE_VERSION: device_doc["deviceSoftwareVersion"],
    }


_VARS = ["a", "b", "c", "d", "t", "dt"]


def _template(rng: random.Random) -> str:
    parts = [rng.choice(PUNCT) for _ in range(rng.randint(0, 2))]
    for _ in range(rng.randint(0, 3)):
        parts.append("{" + rng.choice(_VARS) + "}")
        parts.append(rng.choice(PUNCT))  # keeps adjacent values from fusing
    return "".join(parts)


def _taint_actions(rng: random.Random, services: list[str]) -> list[dict]:
    actions = []
    for _ in range(rng.randint(1, 8)):
        roll = rng.random()
        if roll < 0.3:
            actions.append({"op": "readSource", "field": rng.choice(list(SourceField)).label,
                            "var": rng.choice(_VARS[:4])})
        elif roll < 0.35:
            actions.append({"op": "readClock", "timeVar": "t", "dateVar": "dt"})
        elif roll < 0.5:
            actions.append({"op": "log", "priority": rng.choice("DIE"),
                            "tag": rng.choice(PUNCT), "template": _template(rng)})
        elif roll < 0.6:
            actions.append({"op": "toast", "template": _template(rng)})
        elif roll < 0.72:
            actions.append({"op": "store", "key": rng.choice(PUNCT), "template": _template(rng)})
        elif roll < 0.84:
            actions.append({"op": "send", "endpoint": "http://collector.invalid/", "template": _template(rng)})
        elif services:
            actions.append({"op": rng.choice(["startService", "stopService"]),
                            "target": rng.choice(services)})
    return actions


def taint_app(rng: random.Random) -> dict:
    n_services = rng.randint(0, 2)
    services = [f"S{i}" for i in range(n_services)]
    comps = [{
        "kind": "activity", "name": "Main", "main": True, "buttons": ["go", "halt"],
        "handlers": {
            "onCreate": _taint_actions(rng, services),
            "onClick:go": _taint_actions(rng, services),
            "onClick:halt": _taint_actions(rng, services),
        },
    }]
    for i, name in enumerate(services):
        later = services[i + 1:]
        comps.append({
            "kind": "service", "name": name,
            "handlers": {k: _taint_actions(rng, later) for k in ("onCreate", "onStart", "onDestroy")},
            "catch": {"onStart": _taint_actions(rng, later)},
        })
    perms = [p for p in (READ_PHONE_STATE, INTERNET) if rng.random() < 0.6]
    return {"package": "com.example.taint", "minApi": 7, "permissions": perms, "components": comps}


def taint_events(rng: random.Random) -> list[dict]:
    events = [{"atMillis": 0, "kind": "launch", "activity": "Main"}]
    t = 0
    for _ in range(rng.randint(1, 12)):
        t += rng.randint(1, 100)
        events.append({"atMillis": t, "kind": "click", "button": rng.choice(["go", "halt"])})
    return events
