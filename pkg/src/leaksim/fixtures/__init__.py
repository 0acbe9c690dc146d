"""Bundled scenario: the ServiceDemo app, an emulator profile and a start/stop click script."""

from importlib import resources

APP = "servicedemo.app"
DEVICE = "emulator.device"
EVENTS = "clicks.events"


def read_text(name: str) -> str:
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")
