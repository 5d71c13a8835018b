"""RMS-threshold end-of-utterance detection."""

from __future__ import annotations

from dataclasses import dataclass

from oan.dialogue.audio import AudioChunk


class NoSpeech(TimeoutError):
    pass


@dataclass(frozen=True)
class VadParams:
    rms_threshold: float = 500.0
    min_speech_s: float = 0.3
    end_silence_s: float = 0.8
    timeout_s: float = 15.0

    def __post_init__(self):
        if self.rms_threshold <= 0 or self.min_speech_s < 0 or self.end_silence_s <= 0:
            raise ValueError("invalid VAD parameters")


def detect_utterance(stream, params: VadParams | None = None) -> AudioChunk:
    """First utterance in ``stream`` with trailing silence removed.

    Time is taken from chunk timestamps and lengths, so the result does not
    depend on how fast the stream is consumed. Bursts shorter than
    ``min_speech_s`` are discarded as noise. Raises :class:`NoSpeech` if
    nothing starts within ``timeout_s`` or the stream ends first.
    """
    params = params or VadParams()
    start = None
    collected: list[AudioChunk] = []
    voiced_end = 0  # len(collected) up to the last loud chunk
    speech_t0 = speech_t1 = 0.0
    silent_for = 0.0
    for chunk in stream:
        if start is None:
            start = chunk.timestamp
        loud = chunk.rms >= params.rms_threshold
        if not collected:
            if not loud:
                if chunk.timestamp + chunk.duration - start >= params.timeout_s:
                    raise NoSpeech(f"no speech within {params.timeout_s} s")
                continue
            speech_t0 = chunk.timestamp
        collected.append(chunk)
        if loud:
            voiced_end = len(collected)
            speech_t1 = chunk.timestamp + chunk.duration
            silent_for = 0.0
            continue
        silent_for += chunk.duration
        if silent_for >= params.end_silence_s:
            if speech_t1 - speech_t0 >= params.min_speech_s:
                return AudioChunk.concat(collected[:voiced_end])
            collected, voiced_end, silent_for = [], 0, 0.0
    if collected and speech_t1 - speech_t0 >= params.min_speech_s:
        return AudioChunk.concat(collected[:voiced_end])
    raise NoSpeech("audio stream ended without speech")
