"""Persona and bounded chat history."""

from __future__ import annotations

from dataclasses import dataclass, field

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class Message:
    role: str
    text: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")

    def to_json(self) -> dict:
        return {"role": self.role, "content": self.text}


@dataclass(frozen=True)
class Persona:
    system_instructions: str
    name: str = "NAO"
    language: str = "en-US"

    def __post_init__(self):
        if not self.system_instructions.strip():
            raise ValueError("persona instructions must not be empty")


class HistoryError(ValueError):
    pass


@dataclass
class ChatHistory:
    """At most one leading system message, then strictly alternating
    user/assistant messages starting with a user message.

    ``max_turns`` bounds the number of non-system messages.
    """

    max_turns: int = 10
    messages: list = field(default_factory=list)

    def __post_init__(self):
        if self.max_turns < 1:
            raise ValueError("max_turns must be at least 1")
        self.check()

    def copy(self) -> "ChatHistory":
        return ChatHistory(self.max_turns, list(self.messages))

    @property
    def system(self) -> Message | None:
        if self.messages and self.messages[0].role == "system":
            return self.messages[0]
        return None

    @property
    def turns(self) -> list:
        return self.messages[1:] if self.system else list(self.messages)

    def check(self) -> None:
        msgs = self.messages
        for i, m in enumerate(msgs):
            if m.role == "system" and i != 0:
                raise HistoryError("system message must be first and unique")
        expected = "user"
        for m in self.turns:
            if m.role != expected:
                raise HistoryError(f"expected a {expected} message, got {m.role}")
            expected = "assistant" if expected == "user" else "user"

    def set_persona(self, persona: Persona) -> None:
        system = Message("system", persona.system_instructions)
        self.messages = [system] + self.turns

    def add_user(self, text: str) -> None:
        if self.turns and self.turns[-1].role == "user":
            raise HistoryError("a user message is already waiting for a reply")
        self.messages.append(Message("user", text))
        self.trim()

    def add_assistant(self, text: str) -> None:
        if not self.turns or self.turns[-1].role != "user":
            raise HistoryError("assistant reply without a user message")
        self.messages.append(Message("assistant", text))
        self.trim()

    def trim(self) -> None:
        """Drop the oldest turns; never leaves an assistant message first."""
        system = [self.system] if self.system else []
        turns = self.turns
        excess = len(turns) - self.max_turns
        if excess > 0:
            turns = turns[excess:]
        while turns and turns[0].role != "user":
            turns = turns[1:]
        self.messages = system + turns

    def payload(self) -> list:
        return [m.to_json() for m in self.messages]


def chat(history: ChatHistory, persona: Persona, user_text: str, client) -> tuple:
    """One exchange through ``client.complete(messages)``.

    Returns ``(reply, new_history)``; ``history`` itself is never modified, so
    a failed call leaves the conversation as it was.
    """
    new = history.copy()
    new.set_persona(persona)
    new.add_user(user_text)
    reply = client.complete(new.payload())
    new.add_assistant(reply)
    return reply, new
