"""Conversation behavior: config, gestures, idle sway and the chat session."""

from oan.orchestrator.config import (DEFAULT_LEDS, BehaviorConfig, ConfigError, SessionConfig,
                                     TrackingConfig, from_mapping, load_config)
from oan.orchestrator.events import EventLog, read_log, without_time
from oan.orchestrator.gestures import (BUILTIN_GESTURES, GestureError, GestureLibrary,
                                       IdleSwayAction, builtin_gesture, idle_sway, pick_gesture,
                                       sway_script)
from oan.orchestrator.session import (ChatSession, InteractionState, TransitionError,
                                      build_tracking, run_chat_session)

__all__ = [
    "DEFAULT_LEDS", "BehaviorConfig", "ConfigError", "SessionConfig", "TrackingConfig",
    "from_mapping", "load_config", "EventLog", "read_log", "without_time", "BUILTIN_GESTURES",
    "GestureError", "GestureLibrary", "IdleSwayAction", "builtin_gesture", "idle_sway",
    "pick_gesture", "sway_script", "ChatSession", "InteractionState", "TransitionError",
    "build_tracking", "run_chat_session",
]
