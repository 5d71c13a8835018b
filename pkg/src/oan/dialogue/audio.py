"""16 kHz mono 16-bit PCM audio: chunks, WAV files and synthetic signals."""

from __future__ import annotations

import time
import wave
from dataclasses import dataclass

import numpy as np

SAMPLE_RATE = 16000


@dataclass(eq=False)
class AudioChunk:
    samples: np.ndarray  # int16, mono
    sample_rate: int = SAMPLE_RATE
    channels: int = 1
    timestamp: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.int16).reshape(-1)
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.channels != 1:
            raise ValueError("only mono audio is supported")

    def __eq__(self, other):
        if not isinstance(other, AudioChunk):
            return NotImplemented
        return (self.sample_rate == other.sample_rate
                and np.array_equal(self.samples, other.samples))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    @property
    def rms(self) -> float:
        if not len(self.samples):
            return 0.0
        return float(np.sqrt(np.mean(self.samples.astype(np.float64) ** 2)))

    def to_bytes(self) -> bytes:
        return self.samples.astype("<i2").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, sample_rate: int = SAMPLE_RATE,
                   timestamp: float = 0.0) -> "AudioChunk":
        if len(data) % 2:
            raise ValueError("PCM payload has an odd number of bytes")
        return cls(np.frombuffer(data, dtype="<i2").astype(np.int16), sample_rate,
                   1, timestamp)

    @staticmethod
    def concat(chunks) -> "AudioChunk":
        chunks = list(chunks)
        if not chunks:
            return AudioChunk(np.zeros(0, np.int16))
        rate = chunks[0].sample_rate
        if any(c.sample_rate != rate for c in chunks):
            raise ValueError("cannot join chunks with different sample rates")
        return AudioChunk(np.concatenate([c.samples for c in chunks]), rate, 1,
                          chunks[0].timestamp)


def tone(freq: float, duration: float, amplitude: float = 8000.0,
         sample_rate: int = SAMPLE_RATE) -> AudioChunk:
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    return AudioChunk(np.round(amplitude * np.sin(2 * np.pi * freq * t)).astype(np.int16),
                      sample_rate)


def silence(duration: float, sample_rate: int = SAMPLE_RATE) -> AudioChunk:
    return AudioChunk(np.zeros(int(round(duration * sample_rate)), np.int16), sample_rate)


def read_wav(path) -> AudioChunk:
    with wave.open(str(path), "rb") as w:
        if w.getsampwidth() != 2:
            raise ValueError(f"{path}: expected 16-bit PCM")
        data = np.frombuffer(w.readframes(w.getnframes()), dtype="<i2")
        if w.getnchannels() > 1:
            data = data.reshape(-1, w.getnchannels()).mean(axis=1).round()
        return AudioChunk(data.astype(np.int16), w.getframerate())


def write_wav(path, audio: AudioChunk) -> None:
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(audio.sample_rate)
        w.writeframes(audio.to_bytes())


def chunked(audio: AudioChunk, chunk_s: float = 0.02, start: float = 0.0):
    """Split ``audio`` into consecutive chunks stamped in stream time."""
    step = max(1, int(round(chunk_s * audio.sample_rate)))
    for i in range(0, len(audio.samples), step):
        yield AudioChunk(audio.samples[i:i + step], audio.sample_rate, 1,
                         start + i / audio.sample_rate)


class _OneShotSource:
    """Base for sources that hand out a fixed list of listening streams.

    ``stream()`` returns an iterator of chunks, or None once everything has
    been played. With ``realtime`` the iterator is paced by the wall clock.
    """

    def __init__(self, chunk_s: float = 0.02, realtime: bool = False):
        self.chunk_s = chunk_s
        self.realtime = realtime
        self._pending: list[AudioChunk] = []

    @property
    def exhausted(self) -> bool:
        return not self._pending

    def stream(self):
        if not self._pending:
            return None
        audio = self._pending.pop(0)
        chunks = chunked(audio, self.chunk_s)
        return _paced(chunks) if self.realtime else chunks


def _paced(chunks):
    t0 = time.monotonic()
    for chunk in chunks:
        delay = t0 + chunk.timestamp - time.monotonic()
        if delay > 0:
            time.sleep(delay)
        yield chunk


class WavFileSource(_OneShotSource):
    """A WAV file played once, followed by ``trailing_silence`` seconds."""

    def __init__(self, path, chunk_s: float = 0.02, trailing_silence: float = 1.0,
                 realtime: bool = False):
        super().__init__(chunk_s, realtime)
        self.audio = read_wav(path)
        self._pending = [AudioChunk.concat([self.audio, silence(trailing_silence,
                                                                self.audio.sample_rate)])]


class ToneSource(_OneShotSource):
    """Synthetic utterances: one tone of (freq, seconds) per listening turn,
    each bracketed by ``lead`` and ``trail`` seconds of silence."""

    def __init__(self, tones=((440.0, 1.0),), lead: float = 0.3, trail: float = 1.0,
                 chunk_s: float = 0.02, realtime: bool = False):
        super().__init__(chunk_s, realtime)
        self._pending = [AudioChunk.concat([silence(lead), tone(f, d), silence(trail)])
                         for f, d in tones]


class WavFileSink:
    """Collects everything played and writes it out on :meth:`close`."""

    def __init__(self, path=None):
        self.path = path
        self.played: list[AudioChunk] = []

    def play(self, audio: AudioChunk) -> None:
        self.played.append(audio)

    def close(self) -> None:
        if self.path is not None and self.played:
            write_wav(self.path, AudioChunk.concat(self.played))
