"""LED animations: combinators, text literals and the per-cycle registry."""

from oan.led.animation import (AnimationError, Blink, Fade, Loop, Rotate, Sampler,
                               Sequence, Solid, compile, sample, total_duration, validate)
from oan.led.literal import (GROUP_ALIASES, NAMED_COLORS, LedBinding, LedLiteralError,
                             format_animation, format_led, parse_animation, parse_led)
from oan.led.registry import LedRegistry

__all__ = [
    "AnimationError", "Blink", "Fade", "Loop", "Rotate", "Sampler", "Sequence", "Solid",
    "compile", "sample", "total_duration", "validate", "GROUP_ALIASES", "NAMED_COLORS",
    "LedBinding", "LedLiteralError", "format_animation", "format_led", "parse_animation",
    "parse_led", "LedRegistry",
]
