"""Deterministic local stand-ins for the speech, chat and detection services."""

from __future__ import annotations

import json
import logging
import re
import threading
import time
from collections import defaultdict, deque
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from oan.dialogue.audio import SAMPLE_RATE, AudioChunk, silence, tone

log = logging.getLogger(__name__)

WORD_DURATION = 0.06

# dominant frequency (Hz, nearest 10) -> transcript
STT_TABLE = {
    440: "hello",
    550: "what is your name",
    660: "how are you",
    770: "tell me a joke",
    880: "goodbye",
}
STT_FALLBACK = "hello"

CHAT_RULES = [
    (re.compile(r"^(hello|hi|hey)\b"), "Hello! I am NAO."),
    (re.compile(r"^what is your name\b"), "My name is NAO."),
    (re.compile(r"^how are you\b"), "I am fine, thank you."),
    (re.compile(r"^tell me a joke\b"), "Why did the robot cross the road? It was programmed to."),
    (re.compile(r"^(goodbye|bye)\b"), "Goodbye! It was nice talking to you."),
]


def fingerprint(audio: AudioChunk) -> int:
    """Dominant frequency of the utterance, rounded to 10 Hz."""
    x = audio.samples.astype(np.float64)
    if not len(x):
        return 0
    spectrum = np.abs(np.fft.rfft(x * np.hanning(len(x))))
    freqs = np.fft.rfftfreq(len(x), 1.0 / audio.sample_rate)
    return int(round(freqs[int(np.argmax(spectrum))] / 10.0) * 10)


def mock_transcribe(audio: AudioChunk) -> dict:
    text = STT_TABLE.get(fingerprint(audio))
    if text is None:
        return {"text": STT_FALLBACK, "confidence": 0.5, "language": "en-US"}
    return {"text": text, "confidence": 0.95, "language": "en-US"}


def mock_synthesize(text: str, sample_rate: int = SAMPLE_RATE) -> AudioChunk:
    """One 60 ms tone per word, pitch keyed by word length."""
    parts = []
    for word in text.split():
        parts.append(tone(200.0 + 40.0 * (len(word) % 10), WORD_DURATION, 6000.0, sample_rate))
    return AudioChunk.concat(parts) if parts else silence(0.0, sample_rate)


def mock_reply(messages: list) -> str:
    users = [m for m in messages if m.get("role") == "user"]
    if not users:
        return "I did not hear a question."
    text = str(users[-1].get("content", ""))
    norm = re.sub(r"[^a-z0-9 ]", "", text.lower()).strip()
    for pattern, reply in CHAT_RULES:
        if pattern.search(norm):
            return reply
    return f"You said: {text}"


class _Handler(BaseHTTPRequestHandler):
    server: "_Server"

    def log_message(self, fmt, *args):
        log.debug("mock %s", fmt % args)

    def _send(self, status: int, body: bytes, ctype: str, headers=None) -> None:
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        for k, v in (headers or {}).items():
            self.send_header(k, v)
        self.end_headers()
        self.wfile.write(body)

    def _json(self, obj, status: int = 200) -> None:
        self._send(status, json.dumps(obj).encode(), "application/json")

    def do_POST(self):  # noqa: N802 - http.server API
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length)
        path = self.path.split("?", 1)[0].rstrip("/")
        owner = self.server.owner
        owner.calls[path] += 1
        fault = owner.take_fault(path)
        if fault == "status":
            return self._json({"error": "injected failure"}, 500)
        if fault == "malformed":
            return self._send(200, b"{not json", "application/json")
        if fault and fault.startswith("delay:"):
            time.sleep(float(fault[6:]))
        if fault == "drop":
            self.close_connection = True
            self.connection.shutdown(2)
            return None
        try:
            if path == "/stt":
                rate = _rate_from(self.headers.get("Content-Type", ""))
                return self._json(mock_transcribe(AudioChunk.from_bytes(body, rate)))
            if path == "/tts":
                req = json.loads(body)
                audio = mock_synthesize(str(req["text"]))
                return self._send(200, audio.to_bytes(), f"audio/L16; rate={SAMPLE_RATE}",
                                  {"X-Sample-Rate": str(SAMPLE_RATE)})
            if path == "/chat":
                req = json.loads(body)
                return self._json({"text": mock_reply(list(req["messages"]))})
            if path == "/detect":
                from oan.perception.detectors import BlobDetector, decode_frame
                frame = decode_frame(body)
                return self._json([d.to_json() for d in BlobDetector().detect(frame)])
        except (ValueError, KeyError, TypeError) as exc:
            return self._json({"error": str(exc)}, 400)
        return self._json({"error": f"no such endpoint {path}"}, 404)


def _rate_from(ctype: str) -> int:
    m = re.search(r"rate=(\d+)", ctype)
    return int(m.group(1)) if m else SAMPLE_RATE


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True


class MockServices:
    """Serves ``/stt``, ``/tts``, ``/chat`` and ``/detect`` on ``host:port``.

    Port 0 picks a free port; see :attr:`base_url`. Faults can be queued per
    path with :meth:`inject_fault` ("status", "malformed", "drop" or
    "delay:SECONDS", which answers normally after the delay).
    """

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self._server = _Server((host, port), _Handler)
        self._server.owner = self
        self._thread: threading.Thread | None = None
        self._faults: dict = defaultdict(deque)
        self._lock = threading.Lock()
        self.calls: dict = defaultdict(int)

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def base_url(self) -> str:
        host = self._server.server_address[0]
        return f"http://{host}:{self.port}"

    def inject_fault(self, path: str, kind: str, count: int = 1) -> None:
        if kind not in ("status", "malformed", "drop") and not kind.startswith("delay:"):
            raise ValueError(f"unknown fault {kind!r}")
        with self._lock:
            self._faults[path].extend([kind] * count)

    def take_fault(self, path: str):
        with self._lock:
            queue = self._faults.get(path)
            return queue.popleft() if queue else None

    def start(self) -> "MockServices":
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        name="mock-services", daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
