"""Minimal NDJSON-over-TCP client used by server tests."""

from __future__ import annotations

import json
import socket


class WireClient:
    def __init__(self, host: str, port: int, timeout: float = 10.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self.file = self.sock.makefile("rwb")

    def request(self, message: dict) -> dict:
        self.file.write(json.dumps(message).encode() + b"\n")
        self.file.flush()
        line = self.file.readline()
        if not line:
            raise ConnectionError("server closed the connection")
        return json.loads(line)

    def send_raw(self, payload: bytes) -> dict:
        self.file.write(payload)
        self.file.flush()
        line = self.file.readline()
        return json.loads(line)

    def close(self) -> None:
        try:
            self.file.close()
        finally:
            self.sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
