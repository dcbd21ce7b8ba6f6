"""Network front end: TCP and WebSocket transports around the Router.

All transports feed the same router and receive the same broadcast lines;
the daemon cannot tell a headset-side client from the browser console, which
keeps every behavioural test independent of which transport it rode in on.

In live mode a control-loop task ticks the router at the configured rate on
the wall clock. In lockstep mode there is no timer: ticks are derived from
inbound message stamps, so a scripted session produces an identical output
log on every run (used by the golden regression tests; single client only).
"""

from __future__ import annotations

import asyncio
import json
import logging
import threading
import time
from functools import partial
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from .protocol import ProtocolError, StreamDecoder, WireMessage, encode
from .router import LockstepClock, Router, SessionConfig, config_doc

logger = logging.getLogger(__name__)

DEFAULT_UI_PORT = 10712

# Slow WebSocket consumers are dropped rather than allowed to stall the
# control loop; this is the per-client backlog that triggers it.
_WS_QUEUE_LIMIT = 4096


class Daemon:
    def __init__(self, config: SessionConfig, ui_dir: str | None = None, ui_port: int = DEFAULT_UI_PORT):
        self.config = config
        self.router = Router(config)
        self.ui_dir = ui_dir
        self.ui_port = ui_port
        self.tcp_port: int | None = None  # bound ports, set once serving
        self.ws_port: int | None = None
        self._clock = LockstepClock(self.router) if config.lockstep else None
        self._tcp_writers: set[asyncio.StreamWriter] = set()
        self._ws_queues: set[asyncio.Queue] = set()
        self._stop = asyncio.Event()
        self._start_time = 0.0
        self._httpd: ThreadingHTTPServer | None = None

    # -- time ------------------------------------------------------------

    def _now(self) -> float:
        return time.monotonic() - self._start_time

    # -- outbound --------------------------------------------------------

    def _broadcast(self, messages: list[WireMessage]) -> None:
        if not messages:
            return
        for msg in messages:
            line = encode(msg)
            for writer in list(self._tcp_writers):
                if writer.transport.is_closing():
                    self._tcp_writers.discard(writer)
                    continue
                writer.write(line)
            text = line.decode("utf-8")
            for queue in list(self._ws_queues):
                if queue.qsize() > _WS_QUEUE_LIMIT:
                    self._ws_queues.discard(queue)
                    logger.warning("dropping slow websocket client (%d queued)", queue.qsize())
                    continue
                queue.put_nowait(text)

    # -- inbound ---------------------------------------------------------

    def _ingest_line(self, line: bytes | str, decoder: StreamDecoder, origin: str) -> None:
        try:
            msg = decoder.decode(line)
        except ProtocolError as exc:
            logger.warning("%s: dropped line (%s: %s)", origin, type(exc).__name__, exc)
            return
        if self._clock is not None:
            self._broadcast(self._clock.feed(msg))
        else:
            self.router.ingest(msg, self._now())

    async def _handle_tcp(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        peer = writer.get_extra_info("peername") or ("?", "?")
        origin = f"tcp {peer[0]}:{peer[1]}"
        logger.info("%s connected", origin)
        decoder = StreamDecoder()
        self._tcp_writers.add(writer)
        try:
            while True:
                try:
                    line = await reader.readline()
                except ValueError:
                    # Oversized line: resync at the next newline and report
                    # the fragment as malformed like any other bad line.
                    while True:
                        chunk = await reader.read(65536)
                        if not chunk or b"\n" in chunk:
                            break
                    line = b"!oversized\n" if chunk else b""
                if not line:
                    break
                if line.strip():
                    self._ingest_line(line, decoder, origin)
        except (ConnectionResetError, BrokenPipeError):
            pass
        finally:
            logger.info("%s disconnected", origin)
            if self._clock is not None:
                # End of a scripted session: run the clock out so the log
                # captures the plants settling after the last command.
                self._broadcast(self._clock.flush(1.0))
            self._tcp_writers.discard(writer)
            writer.close()

    async def _handle_ws(self, connection) -> None:
        origin = f"ws {connection.remote_address}"
        logger.info("%s connected", origin)
        decoder = StreamDecoder()
        queue: asyncio.Queue = asyncio.Queue()
        self._ws_queues.add(queue)

        async def sender() -> None:
            while True:
                await connection.send(await queue.get())

        send_task = asyncio.ensure_future(sender())
        try:
            async for message in connection:
                self._ingest_line(message, decoder, origin)
        except ConnectionClosed:
            pass
        finally:
            logger.info("%s disconnected", origin)
            if self._clock is not None:
                self._broadcast(self._clock.flush(1.0))
            self._ws_queues.discard(queue)
            send_task.cancel()

    # -- control loop ------------------------------------------------------

    async def _control_loop(self) -> None:
        dt = 1.0 / self.config.loop_rate
        ticks = 0
        while not self._stop.is_set():
            ticks += 1
            due = ticks * dt
            delay = due - self._now()
            if delay > 0:
                await asyncio.sleep(delay)
            self._broadcast(self.router.tick(self._now()))

    # -- lifecycle ---------------------------------------------------------

    def _serve_ui(self) -> None:
        # Static assets plus one live endpoint so the console can discover
        # the websocket port, routing mode and workspace boxes.
        config_payload = json.dumps(
            {**config_doc(self.config), "ws_port": self.ws_port}, separators=(",", ":")
        ).encode("utf-8")

        class Handler(SimpleHTTPRequestHandler):
            def do_GET(self):
                if self.path.split("?")[0] == "/session-config.json":
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(config_payload)))
                    self.end_headers()
                    self.wfile.write(config_payload)
                    return
                super().do_GET()

            def log_message(self, fmt, *args):
                logger.debug("ui http: " + fmt, *args)

        handler = partial(Handler, directory=self.ui_dir)
        self._httpd = ThreadingHTTPServer(("", self.ui_port), handler)
        self.ui_port = self._httpd.server_address[1]
        threading.Thread(target=self._httpd.serve_forever, daemon=True).start()
        logger.info("serving ui from %s on http://localhost:%d", self.ui_dir, self.ui_port)

    def stop(self) -> None:
        self._stop.set()

    async def run(self, ready: asyncio.Event | None = None) -> None:
        self._start_time = time.monotonic()
        # Port 0 requests an ephemeral port; pin one family so every socket
        # shares the single assigned port we report.
        tcp_host = "127.0.0.1" if self.config.tcp_port == 0 else None
        ws_host = "127.0.0.1" if self.config.ws_port == 0 else None
        tcp_server = await asyncio.start_server(
            self._handle_tcp, host=tcp_host, port=self.config.tcp_port, limit=1 << 20
        )
        self.tcp_port = tcp_server.sockets[0].getsockname()[1]
        ws_server = await ws_serve(self._handle_ws, host=ws_host, port=self.config.ws_port)
        self.ws_port = ws_server.sockets[0].getsockname()[1]
        if self.ui_dir is not None:
            self._serve_ui()
        logger.info(
            "serving: tcp=%d ws=%d mode=%s loop=%g Hz publish=%g Hz timeout=%g s%s",
            self.tcp_port, self.ws_port, self.config.mode.value, self.config.loop_rate,
            self.config.publish_rate, self.config.timeout,
            " lockstep" if self.config.lockstep else "",
        )
        if ready is not None:
            ready.set()
        loop_task = None
        if self._clock is None:
            loop_task = asyncio.ensure_future(self._control_loop())
        try:
            await self._stop.wait()
        finally:
            if loop_task is not None:
                loop_task.cancel()
            tcp_server.close()
            ws_server.close()
            await tcp_server.wait_closed()
            if self._httpd is not None:
                self._httpd.shutdown()


def run_daemon(config: SessionConfig, ui_dir: str | None = None, ui_port: int = DEFAULT_UI_PORT) -> None:
    """Blocking entry point used by the CLI."""
    daemon = Daemon(config, ui_dir=ui_dir, ui_port=ui_port)
    try:
        asyncio.run(daemon.run())
    except KeyboardInterrupt:
        logger.info("interrupted, shutting down")
