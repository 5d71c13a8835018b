"""HTTP clients for the speech-to-text, text-to-speech and chat services."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

import requests

from oan.dialogue.audio import SAMPLE_RATE, AudioChunk

log = logging.getLogger(__name__)

DEFAULT_BASE = "http://127.0.0.1:8765"
ENV_URLS = {"stt": "OAN_STT_URL", "tts": "OAN_TTS_URL", "chat": "OAN_CHAT_URL"}


class ServiceError(RuntimeError):
    def __init__(self, service: str, message: str):
        super().__init__(f"{service}: {message}")
        self.service = service


class ServiceUnreachable(ServiceError):
    pass


class ServiceStatusError(ServiceError):
    def __init__(self, service: str, status: int, body: str = ""):
        super().__init__(service, f"HTTP {status} {body[:200]}".rstrip())
        self.status = status


class MalformedResponse(ServiceError):
    pass


@dataclass(frozen=True)
class Transcript:
    text: str
    confidence: float = 1.0
    language: str = "en-US"

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be in [0, 1]")


@dataclass
class ServiceConfig:
    stt_url: str = DEFAULT_BASE + "/stt"
    tts_url: str = DEFAULT_BASE + "/tts"
    chat_url: str = DEFAULT_BASE + "/chat"
    timeout: float = 10.0
    headers: dict = field(default_factory=dict)  # passed through, e.g. Authorization

    @classmethod
    def from_mapping(cls, mapping: dict | None = None, env=None) -> "ServiceConfig":
        """Config-file values, then ``OAN_*_URL`` environment overrides.

        A ``base_url`` key fills in any URL not given explicitly.
        """
        mapping = dict(mapping or {})
        env = os.environ if env is None else env
        base = mapping.pop("base_url", DEFAULT_BASE).rstrip("/")
        cfg = cls(stt_url=mapping.pop("stt_url", base + "/stt"),
                  tts_url=mapping.pop("tts_url", base + "/tts"),
                  chat_url=mapping.pop("chat_url", base + "/chat"),
                  timeout=float(mapping.pop("timeout", 10.0)),
                  headers=dict(mapping.pop("headers", {})))
        if mapping:
            raise ValueError(f"unknown service settings: {', '.join(sorted(mapping))}")
        for name, var in ENV_URLS.items():
            if env.get(var):
                setattr(cfg, f"{name}_url", env[var])
        return cfg


class _Client:
    service = ""

    def __init__(self, url: str, timeout: float = 10.0, headers: dict | None = None,
                 session: requests.Session | None = None):
        self.url = url
        self.timeout = timeout
        self.headers = dict(headers or {})
        self.session = session or requests.Session()

    def _post(self, parse, **kwargs):
        """POST and parse, retrying once on any service error."""
        headers = {**self.headers, **kwargs.pop("headers", {})}
        last = None
        for attempt in range(2):
            try:
                resp = self.session.post(self.url, timeout=self.timeout, headers=headers, **kwargs)
            except requests.RequestException as exc:
                last = ServiceUnreachable(self.service, str(exc))
            else:
                if resp.status_code // 100 != 2:
                    last = ServiceStatusError(self.service, resp.status_code, resp.text)
                else:
                    try:
                        return parse(resp)
                    except (ValueError, KeyError, TypeError) as exc:
                        last = MalformedResponse(self.service, str(exc))
            log.warning("%s attempt %d failed: %s", self.service, attempt + 1, last)
        raise last


class SttClient(_Client):
    service = "stt"

    def transcribe(self, utterance: AudioChunk, language: str = "en-US") -> Transcript:
        if not len(utterance):
            raise ValueError("empty utterance")

        def parse(resp):
            body = resp.json()
            if not isinstance(body, dict) or not isinstance(body.get("text"), str):
                raise ValueError("expected an object with a text field")
            return Transcript(body["text"], float(body.get("confidence", 1.0)),
                              str(body.get("language", language)))

        return self._post(parse, data=utterance.to_bytes(), headers={
            "Content-Type": f"audio/L16; rate={utterance.sample_rate}; channels=1",
            "Content-Language": language})


class TtsClient(_Client):
    service = "tts"

    def synthesize(self, text: str, voice: str = "default") -> AudioChunk:
        if not text.strip():
            raise ValueError("empty text")

        def parse(resp):
            rate = int(resp.headers.get("X-Sample-Rate", SAMPLE_RATE))
            return AudioChunk.from_bytes(resp.content, rate)

        return self._post(parse, json={"text": text, "voice": voice})


class ChatClient(_Client):
    service = "chat"

    def complete(self, messages: list) -> str:
        def parse(resp):
            body = resp.json()
            if not isinstance(body, dict) or not isinstance(body.get("text"), str):
                raise ValueError("expected an object with a text field")
            return body["text"]

        return self._post(parse, json={"messages": messages})


@dataclass
class Services:
    stt: SttClient
    tts: TtsClient
    chat: ChatClient

    @classmethod
    def from_config(cls, cfg: ServiceConfig) -> "Services":
        kw = {"timeout": cfg.timeout, "headers": cfg.headers}
        return cls(SttClient(cfg.stt_url, **kw), TtsClient(cfg.tts_url, **kw),
                   ChatClient(cfg.chat_url, **kw))
