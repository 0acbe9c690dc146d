import json
from pathlib import Path

import pytest

from leaksim import fixtures
from leaksim.descriptor import app_from_json, parse_app_descriptor, parse_device_profile, parse_event_script
from leaksim.device import READ_PHONE_STATE
from leaksim.runtime import replay

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def app_doc():
    return json.loads(fixtures.read_text(fixtures.APP))


@pytest.fixture
def app():
    return parse_app_descriptor(fixtures.read_text(fixtures.APP))


@pytest.fixture
def stripped_app(app_doc):
    app_doc["permissions"] = [p for p in app_doc["permissions"] if p != READ_PHONE_STATE]
    return app_from_json(app_doc)


@pytest.fixture
def device():
    return parse_device_profile(fixtures.read_text(fixtures.DEVICE))


@pytest.fixture
def script():
    return parse_event_script(fixtures.read_text(fixtures.EVENTS))


@pytest.fixture
def fixture_run(app, device, script):
    return replay(app, device, script)


@pytest.fixture
def golden_logcat():
    return (GOLDEN / "servicedemo.logcat").read_text()


_RESULTS = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion outcome and assert it."""
    results = request.config.stash.setdefault(_RESULTS, [])

    def check(name, passed, detail=""):
        results.append((name, bool(passed), detail))
        assert passed, f"{name}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in results:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
