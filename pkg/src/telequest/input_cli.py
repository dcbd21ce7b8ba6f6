"""``telequest-input`` command line: stream scripted controller input.

``play`` sends a script's expanded message stream to a running daemon over
TCP, pacing by the scripted times (divided by --speed). ``expand`` prints
the same stream as NDJSON on stdout, which is what the golden-file tests
snapshot.
"""

from __future__ import annotations

import argparse
import sys

from .protocol import DEFAULT_TCP_PORT, encode
from .scripts import ScriptError, expand, load_script_file, play


def _endpoint(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    if not host or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected HOST:PORT, got {value!r}")
    return host, int(port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="telequest-input", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    play_cmd = sub.add_parser("play", help="stream a script to the daemon over TCP")
    play_cmd.add_argument("script", metavar="SCRIPT.json")
    play_cmd.add_argument("--endpoint", type=_endpoint, default=("127.0.0.1", DEFAULT_TCP_PORT),
                          metavar="HOST:PORT")
    play_cmd.add_argument("--speed", type=float, default=1.0, metavar="F",
                          help="time compression factor (2.0 plays twice as fast)")

    expand_cmd = sub.add_parser("expand", help="print the expanded NDJSON stream to stdout")
    expand_cmd.add_argument("script", metavar="SCRIPT.json")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        script = load_script_file(args.script)
    except (OSError, ScriptError) as exc:
        print(f"telequest-input: {exc}", file=sys.stderr)
        return 2
    messages = expand(script)

    if args.command == "expand":
        out = sys.stdout.buffer
        for _, msg in messages:
            out.write(encode(msg))
        out.flush()
        return 0

    if not args.speed > 0:
        print(f"telequest-input: --speed must be > 0, got {args.speed}", file=sys.stderr)
        return 2
    try:
        play(messages, args.endpoint, speed=args.speed)
    except ConnectionError as exc:
        print(f"telequest-input: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
