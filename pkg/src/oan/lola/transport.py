"""Stream-socket transport for MessagePack message streams."""

from __future__ import annotations

import os
import socket

from oan.lola.codec import new_unpacker

DEFAULT_ENDPOINT = "/tmp/oan-lola"
ENDPOINT_ENV = "OAN_LOLA_ENDPOINT"


class ConnectionClosed(ConnectionError):
    """Peer went away; the session may be re-established."""


def resolve_endpoint(endpoint: str | None = None) -> str:
    return endpoint or os.environ.get(ENDPOINT_ENV) or DEFAULT_ENDPOINT


def parse_endpoint(endpoint: str):
    """Return ``(family, address)`` for a socket path or ``host:port``."""
    if endpoint.startswith("tcp://"):
        endpoint = endpoint[len("tcp://"):]
    elif endpoint.startswith("unix://"):
        return socket.AF_UNIX, endpoint[len("unix://"):]
    if not endpoint.startswith(("/", ".")) and ":" in endpoint:
        host, _, port = endpoint.rpartition(":")
        return socket.AF_INET, (host or "127.0.0.1", int(port))
    return socket.AF_UNIX, endpoint


def listen(endpoint: str) -> socket.socket:
    family, address = parse_endpoint(endpoint)
    sock = socket.socket(family, socket.SOCK_STREAM)
    if family == socket.AF_UNIX:
        try:
            os.unlink(address)
        except FileNotFoundError:
            pass
    else:
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind(address)
    sock.listen(1)
    return sock


def connect(endpoint: str | None = None, timeout: float = 5.0) -> "Session":
    family, address = parse_endpoint(resolve_endpoint(endpoint))
    sock = socket.socket(family, socket.SOCK_STREAM)
    sock.settimeout(timeout)
    sock.connect(address)
    return Session(sock)


class Session:
    """One connected peer: reads whole MessagePack objects, writes raw bytes."""

    def __init__(self, sock: socket.socket):
        self.sock = sock
        if sock.family in (socket.AF_INET, socket.AF_INET6):
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._unpacker = new_unpacker()
        self.reads = 0
        self.writes = 0
        self.closed = False

    def _next_buffered(self):
        try:
            return next(self._unpacker)
        except StopIteration:
            raise
        except Exception as exc:
            self.close()
            raise ConnectionClosed(f"unrecoverable stream error: {exc}") from None

    def recv(self, timeout: float | None = None):
        """Block until one complete object is available.

        Raises ``TimeoutError`` if nothing complete arrives within ``timeout``.
        """
        while True:
            try:
                obj = self._next_buffered()
                self.reads += 1
                return obj
            except StopIteration:
                pass
            self.sock.settimeout(timeout)
            try:
                data = self.sock.recv(65536)
            except socket.timeout:
                raise TimeoutError("no message within timeout") from None
            except OSError as exc:
                self.close()
                raise ConnectionClosed(str(exc)) from None
            if not data:
                self.close()
                raise ConnectionClosed("peer closed the connection")
            self._unpacker.feed(data)

    def recv_available(self) -> list:
        """Return every complete object that can be read without blocking."""
        out = []
        self.sock.setblocking(False)
        try:
            while True:
                try:
                    data = self.sock.recv(65536)
                except (BlockingIOError, InterruptedError):
                    break
                except OSError as exc:
                    self.close()
                    raise ConnectionClosed(str(exc)) from None
                if not data:
                    self.close()
                    raise ConnectionClosed("peer closed the connection")
                self._unpacker.feed(data)
        finally:
            if not self.closed:
                self.sock.setblocking(True)
        while True:
            try:
                out.append(self._next_buffered())
            except StopIteration:
                break
        self.reads += len(out)
        return out

    def send(self, data: bytes) -> None:
        try:
            self.sock.sendall(data)
        except OSError as exc:
            self.close()
            raise ConnectionClosed(str(exc)) from None
        self.writes += 1

    def close(self) -> None:
        if not self.closed:
            self.closed = True
            try:
                self.sock.close()
            except OSError:
                pass


