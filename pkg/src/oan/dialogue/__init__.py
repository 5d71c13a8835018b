"""Speech and chat services: audio, VAD, history, HTTP clients and mocks."""

from oan.dialogue.audio import (SAMPLE_RATE, AudioChunk, ToneSource, WavFileSink, WavFileSource, chunked,
                                read_wav, silence, tone, write_wav)
from oan.dialogue.clients import (ChatClient, MalformedResponse, ServiceConfig, ServiceError,
                                  Services, ServiceStatusError, ServiceUnreachable, SttClient,
                                  Transcript, TtsClient)
from oan.dialogue.history import ChatHistory, HistoryError, Message, Persona, chat
from oan.dialogue.mock import MockServices, fingerprint, mock_reply, mock_synthesize
from oan.dialogue.vad import NoSpeech, VadParams, detect_utterance

__all__ = [
    "SAMPLE_RATE", "AudioChunk", "ToneSource", "WavFileSink", "WavFileSource", "chunked", "read_wav",
    "silence", "tone", "write_wav", "ChatClient", "MalformedResponse", "ServiceConfig",
    "ServiceError", "Services", "ServiceStatusError", "ServiceUnreachable", "SttClient",
    "Transcript", "TtsClient", "ChatHistory", "HistoryError", "Message", "Persona", "chat",
    "MockServices", "fingerprint", "mock_reply", "mock_synthesize", "NoSpeech", "VadParams",
    "detect_utterance",
]
