"""Command-line entry point.

Exit codes: 0 clean run, 3 leaks found, 2 document/validation problems,
1 anything else. Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import fixtures
from .descriptor import parse_app_descriptor, parse_device_profile, parse_event_script, validate_app
from .errors import DescriptorError, LeaksimError
from .report import LEAKS_FOUND, build_report, render_report
from .runtime import replay
from .sinks import render_logcat, render_store_dump

EXIT_CLEAN = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_LEAKS = 3


@dataclass
class RunConfig:
    app_path: Path
    device_path: Path
    events_path: Path
    report_format: str = "text"
    logcat_out_path: Optional[Path] = None
    store_out_path: Optional[Path] = None
    trace_out_path: Optional[Path] = None


class _CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _err(message: str) -> None:
    print(f"leaksim: {message}", file=sys.stderr)


def _read(path: Path, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliFailure(EXIT_ERROR, f"cannot read {what} file {str(path)!r}: {exc.strerror or exc}")


def _write(path: Optional[Path], text: str, what: str) -> None:
    if path is None:
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _CliFailure(EXIT_ERROR, f"cannot write {what} file {str(path)!r}: {exc.strerror or exc}")


def _parse(parser, text: str, path, what: str):
    try:
        return parser(text)
    except DescriptorError as exc:
        raise _CliFailure(EXIT_INVALID, f"{what} {str(path)!r}: {type(exc).__name__}: {exc}")


def _simulate(app, device, script, report_format: str):
    try:
        rt = replay(app, device, script)
        report = build_report(rt.trace)
        rendered = render_report(report, report_format)
    except LeaksimError as exc:
        raise _CliFailure(EXIT_ERROR, f"{type(exc).__name__}: {exc}")
    return rt, report, rendered


def cmd_run(config: RunConfig) -> int:
    app_text = _read(config.app_path, "app")
    device_text = _read(config.device_path, "device")
    events_text = _read(config.events_path, "events")
    app = _parse(parse_app_descriptor, app_text, config.app_path, "app descriptor")
    device = _parse(parse_device_profile, device_text, config.device_path, "device profile")
    script = _parse(parse_event_script, events_text, config.events_path, "event script")
    for finding in validate_app(app):
        _err(str(finding))

    rt, report, rendered = _simulate(app, device, script, config.report_format)
    _write(config.logcat_out_path, render_logcat(rt.trace), "logcat")
    _write(config.store_out_path, render_store_dump(rt.trace), "store")
    _write(config.trace_out_path, rt.trace.to_jsonl(), "trace")
    sys.stdout.write(rendered)
    return EXIT_LEAKS if report.verdict == LEAKS_FOUND else EXIT_CLEAN


def cmd_demo(trace_out_path: Optional[Path] = None) -> int:
    app = parse_app_descriptor(fixtures.read_text(fixtures.APP))
    device = parse_device_profile(fixtures.read_text(fixtures.DEVICE))
    script = parse_event_script(fixtures.read_text(fixtures.EVENTS))
    rt, report, rendered = _simulate(app, device, script, "text")
    _write(trace_out_path, rt.trace.to_jsonl(), "trace")
    sys.stdout.write("--- logcat ---\n")
    sys.stdout.write(render_logcat(rt.trace))
    sys.stdout.write("--- report ---\n")
    sys.stdout.write(rendered)
    return EXIT_LEAKS if report.verdict == LEAKS_FOUND else EXIT_CLEAN


def cmd_validate(app_path: Path) -> int:
    app = _parse(parse_app_descriptor, _read(app_path, "app"), app_path, "app descriptor")
    findings = validate_app(app)
    for finding in findings:
        print(finding)
    if findings.clean:
        print(f"{app.package}: no findings")
        return EXIT_CLEAN
    return EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leaksim",
        description="Replay a declarative Android app against a mock device and report tainted data flows.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay an app/device/events triple and print the flow report")
    run.add_argument("--app", required=True, type=Path)
    run.add_argument("--device", required=True, type=Path)
    run.add_argument("--events", required=True, type=Path)
    run.add_argument("--format", choices=("text", "structured"), default="text")
    run.add_argument("--logcat", type=Path, help="write the logcat dump here")
    run.add_argument("--store", type=Path, help="write the store dump here")
    run.add_argument("--trace", type=Path, help="write the JSON-lines trace here")

    demo = sub.add_parser("demo", help="replay the bundled ServiceDemo scenario")
    demo.add_argument("--trace", type=Path, help="write the JSON-lines trace here")

    validate = sub.add_parser("validate", help="lint an app descriptor")
    validate.add_argument("--app", required=True, type=Path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(RunConfig(args.app, args.device, args.events, args.format,
                                     args.logcat, args.store, args.trace))
        if args.command == "demo":
            return cmd_demo(args.trace)
        return cmd_validate(args.app)
    except _CliFailure as exc:
        _err(str(exc))
        return exc.code
    except Exception as exc:  # last resort: never leak a traceback as the exit path
        _err(f"internal error: {type(exc).__name__}: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
