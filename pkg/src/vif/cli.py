"""Command-line entry points: lint, play, serve, simulate."""

from __future__ import annotations

import argparse
import json
import socket
import sys
import time
from pathlib import Path

from vif.script import errors, lint_story, parse_script
from vif.session import EXIT_BAD_INPUT, EXIT_LINT, run_headless
from vif.simulator import BadScenarioError, generate_lines, load_scenario


def _cmd_lint(args: argparse.Namespace) -> int:
    source = Path(args.story).read_text(encoding="utf-8")
    story, diagnostics = parse_script(source, args.story)
    diagnostics += lint_story(story)
    for d in diagnostics:
        print(json.dumps(d.to_json(), separators=(",", ":")))
    return EXIT_LINT if errors(diagnostics) else 0


def _cmd_play(args: argparse.Namespace) -> int:
    return run_headless(
        args.story,
        scenario_path=args.scenario,
        input_script_path=args.inputs,
        seed=args.seed,
        out_path=args.out,
    )


def _cmd_serve(args: argparse.Namespace) -> int:
    from vif.runtime import SessionConfig
    from vif.server import serve

    source = Path(args.story).read_text(encoding="utf-8")
    story, diagnostics = parse_script(source, args.story)
    diagnostics += lint_story(story)
    if errors(diagnostics):
        for d in errors(diagnostics):
            print(json.dumps(d.to_json(), separators=(",", ":")), file=sys.stderr)
        return EXIT_LINT
    config = SessionConfig(game_day_real_seconds=args.day_seconds)
    try:
        serve(
            story,
            client_port=args.client_port,
            sensor_port=args.sensor_port,
            config=config,
            host=args.host,
        )
    except KeyboardInterrupt:
        pass
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    host, _, port_text = args.target.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"bad target {args.target!r}; expected host:port", file=sys.stderr)
        return 2
    port = int(port_text)
    try:
        commands = load_scenario(args.scenario)
    except (BadScenarioError, OSError) as err:
        print(str(err), file=sys.stderr)
        return EXIT_BAD_INPUT
    lines = generate_lines(commands, args.seed)

    if args.transport == "udp":
        sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        send = lambda data: sock.sendto(data, (host, port))
    else:
        sock = socket.create_connection((host, port))
        send = sock.sendall

    start = time.monotonic()
    try:
        for line in lines:
            t = json.loads(line)["t"]
            delay = t / 1000.0 / args.speed - (time.monotonic() - start)
            if delay > 0:
                time.sleep(delay)
            send((line + "\n").encode("utf-8"))
    finally:
        sock.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vif", description="physiology-driven interactive fiction")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lint", help="parse and lint a story, diagnostics as JSON lines")
    p.add_argument("story")
    p.set_defaults(func=_cmd_lint)

    p = sub.add_parser("play", help="headless deterministic run, writes a transcript")
    p.add_argument("story")
    p.add_argument("--scenario", default=None, help="sensor scenario (JSON lines)")
    p.add_argument("--inputs", default=None, help="player input script (JSON lines)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="transcript path (default: stdout)")
    p.set_defaults(func=_cmd_play)

    p = sub.add_parser("serve", help="serve a live session (websocket client + sensor port)")
    p.add_argument("story")
    p.add_argument("--client-port", type=int, default=8080)
    p.add_argument("--sensor-port", type=int, default=9000)
    p.add_argument("--host", default="127.0.0.1", help="bind address")
    p.add_argument("--day-seconds", type=float, default=600.0, help="real seconds per game day")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("simulate", help="stream a scenario to a sensor port in real time")
    p.add_argument("--scenario", required=True)
    p.add_argument("--target", required=True, help="host:port of the sensor listener")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transport", choices=("tcp", "udp"), default="tcp")
    p.add_argument("--speed", type=float, default=1.0, help="time multiplier (2 = twice as fast)")
    p.set_defaults(func=_cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
