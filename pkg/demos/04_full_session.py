#!/usr/bin/env python3
"""A complete scripted session against the real daemon, over real TCP.

Starts ``telequest serve`` in lockstep mode, streams the canonical bi-manual
script through a socket, and summarizes everything the daemon published.
The same script and config back the golden-log regression test, so what you
see here is exactly what the test suite pins down.

Run the live equivalent yourself:

    telequest serve --log-level info &
    telequest-input play demos/canonical_bimanual.json --speed 2
"""

import json
import re
import socket
import subprocess
import sys
import threading
import time
from pathlib import Path

from telequest.protocol import encode
from telequest.scripts import expand, load_script_file

HERE = Path(__file__).resolve().parent


def main():
    script = load_script_file(str(HERE / "canonical_bimanual.json"))
    payload = b"".join(encode(m) for _, m in expand(script))

    config = HERE.parent / "tests" / "golden" / "session_symmetric.json"
    proc = subprocess.Popen(
        [sys.executable, "-m", "telequest.cli", "serve",
         "--tcp-port", "0", "--ws-port", "0", "--config", str(config)],
        stderr=subprocess.PIPE, text=True,
    )
    port = None
    transitions = []

    def pump():
        for line in proc.stderr:
            nonlocal port
            m = re.search(r"serving: tcp=(\d+)", line)
            if m:
                port = int(m.group(1))
            if " connection " in line or " pause " in line or " resume " in line or " gripper " in line:
                transitions.append(line.split(" INFO ")[-1].strip())

    threading.Thread(target=pump, daemon=True).start()
    try:
        while port is None:
            time.sleep(0.02)
        sock = socket.create_connection(("127.0.0.1", port))
        received = bytearray()
        sock.sendall(payload)
        sock.shutdown(socket.SHUT_WR)
        while chunk := sock.recv(1 << 16):
            received.extend(chunk)
        sock.close()
    finally:
        proc.terminate()
        proc.wait()

    lines = [json.loads(l) for l in bytes(received).split(b"\n") if l]
    by_type = {}
    for obj in lines:
        by_type[obj["type"]] = by_type.get(obj["type"], 0) + 1
    sent = payload.count(b"\n")
    print(f"sent {sent} lines, received {len(lines)} published messages:")
    for t, n in sorted(by_type.items()):
        print(f"  {t:<10} {n}")
    print("\nstate transitions the daemon logged:")
    for t in transitions:
        print(f"  {t}")


if __name__ == "__main__":
    main()
