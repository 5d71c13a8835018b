"""Direct evaluation of LED animations from their defining formulas.

Returns per-LED RGB rows; written separately from the package sampler.
"""

import math

import numpy as np

from oan.led import Blink, Fade, Loop, Rotate, Sequence, Solid, total_duration


def colors(anim, t, n):
    if isinstance(anim, Solid):
        return [anim.color] * n
    if isinstance(anim, Blink):
        on = (t % anim.period) / anim.period < anim.duty
        return [anim.color if on else (0.0, 0.0, 0.0)] * n
    if isinstance(anim, Fade):
        a = min(t / anim.duration, 1.0)
        return [tuple(s + a * (e - s) for s, e in zip(anim.start, anim.end))] * n
    if isinstance(anim, Rotate):
        shift = math.floor((t % anim.period) / anim.period * n)
        base = [anim.colors[i % len(anim.colors)] for i in range(n)]
        return [base[(i - shift) % n] for i in range(n)]
    if isinstance(anim, Sequence):
        for step, d in anim.steps:
            if t < d:
                return colors(step, t, n)
            t -= d
        return colors(anim.steps[-1][0], anim.steps[-1][1], n)
    if isinstance(anim, Loop):
        d = total_duration(anim.animation)
        return colors(anim.animation, t % d if d > 0 else t, n)
    raise TypeError(anim)


def channels(anim, t, layout):
    rows = np.array(colors(anim, t, layout.count), dtype=float)
    return rows.reshape(-1) if layout.rgb else rows.max(axis=1)
