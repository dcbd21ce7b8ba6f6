"""``telequest`` command line: run the relay daemon, inspect configuration."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .daemon import DEFAULT_UI_PORT, run_daemon
from .router import ConfigError, config_doc, load_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="telequest", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the teleoperation relay daemon")
    serve.add_argument("--config", metavar="PATH", help="JSON config file (see print-config)")
    serve.add_argument("--tcp-port", type=int, metavar="N", help="controller/NDJSON port (default 10710)")
    serve.add_argument("--ws-port", type=int, metavar="N", help="websocket port for UIs (default 10711)")
    serve.add_argument("--mode", choices=["side-by-side", "mirror", "mirror-facing"])
    serve.add_argument("--gain", type=float, metavar="F", help="translation gain (default 1.0)")
    serve.add_argument("--rate", type=float, metavar="HZ", help="control loop rate (default 50)")
    serve.add_argument("--timeout", type=float, metavar="S", help="watchdog timeout (default 0.5)")
    serve.add_argument("--log-level", default="info", metavar="L",
                       choices=["debug", "info", "warning", "error"])
    serve.add_argument("--lockstep", action="store_true",
                       help="derive the clock from message stamps (deterministic replay)")
    serve.add_argument("--ui-dir", metavar="PATH", help="serve these static UI assets over HTTP")
    serve.add_argument("--ui-port", type=int, default=DEFAULT_UI_PORT, metavar="N")

    sub.add_parser("print-config", help="print the full default configuration as JSON")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "print-config":
        print(json.dumps(config_doc(), indent=2))
        return 0

    logging.basicConfig(
        level=getattr(logging, args.log_level.upper()),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
    overrides = {
        "tcp_port": args.tcp_port,
        "ws_port": args.ws_port,
        "mode": args.mode,
        "gain": args.gain,
        "loop_rate": args.rate,
        "timeout": args.timeout,
    }
    if args.lockstep:
        overrides["lockstep"] = True
    try:
        config = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"telequest: invalid configuration: {exc}", file=sys.stderr)
        return 2
    run_daemon(config, ui_dir=args.ui_dir, ui_port=args.ui_port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
