"""Shared hypothesis strategies for frames and scripts."""

import numpy as np
from hypothesis import strategies as st

from oan.lola.frames import ActuatorFrame, LedState, SensorFrame
from oan.robot_model import NUM_JOINTS, LedGroup, load_model

MODEL = load_model()

unit = st.floats(0.0, 1.0, allow_nan=False)
finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@st.composite
def joint_vectors(draw):
    fr = draw(st.lists(unit, min_size=NUM_JOINTS, max_size=NUM_JOINTS))
    return MODEL.clamp(MODEL.lower + np.array(fr) * (MODEL.upper - MODEL.lower))


@st.composite
def led_states(draw):
    values = {}
    for g in LedGroup:
        n = MODEL.leds[g].arity
        values[g] = np.array(draw(st.lists(unit, min_size=n, max_size=n)))
    return LedState(values)


@st.composite
def actuator_frames(draw):
    return ActuatorFrame(
        draw(joint_vectors()),
        np.array(draw(st.lists(unit, min_size=NUM_JOINTS, max_size=NUM_JOINTS))),
        draw(led_states()))


@st.composite
def sensor_frames(draw):
    def vec(n, elems=finite):
        return np.array(draw(st.lists(elems, min_size=n, max_size=n)))
    return SensorFrame(
        cycle_index=draw(st.integers(0, 2**40)),
        timestamp=draw(st.floats(0, 1e6, allow_nan=False)),
        joint_positions=vec(NUM_JOINTS),
        joint_stiffness=vec(NUM_JOINTS, unit),
        gyro=vec(3), accel=vec(3), torso_angles=vec(2),
        fsr=vec(8, st.floats(0, 100, allow_nan=False)),
        touch=np.array(draw(st.lists(st.booleans(), min_size=8, max_size=8))),
        battery_charge=draw(unit))


def random_actuator_frame(rng: np.random.Generator) -> ActuatorFrame:
    pos = MODEL.clamp(MODEL.lower + rng.random(NUM_JOINTS) * (MODEL.upper - MODEL.lower))
    leds = LedState({g: rng.random(MODEL.leds[g].arity) for g in LedGroup})
    return ActuatorFrame(pos, rng.random(NUM_JOINTS), leds)


def random_sensor_frame(rng: np.random.Generator) -> SensorFrame:
    return SensorFrame(
        cycle_index=int(rng.integers(0, 2**40)), timestamp=float(rng.random() * 1e4),
        joint_positions=rng.normal(size=NUM_JOINTS), joint_stiffness=rng.random(NUM_JOINTS),
        gyro=rng.normal(size=3), accel=rng.normal(size=3), torso_angles=rng.normal(size=2),
        fsr=rng.random(8) * 5, touch=rng.random(8) < 0.5, battery_charge=float(rng.random()))


# -- LED animations ----------------------------------------------------------------

def random_color(rng):
    return tuple(float(x) for x in rng.random(3))


def random_animation(rng, group, depth: int = 0):
    """A random animation valid for ``group``; nesting is bounded."""
    from oan.led import Blink, Fade, Loop, Rotate, Sequence, Solid
    count = MODEL.leds[group].count
    kinds = ["solid", "blink", "fade"]
    if count > 1:
        kinds.append("rotate")
    if depth < 2:
        kinds += ["seq", "loop"]
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "solid":
        return Solid(random_color(rng))
    if kind == "blink":
        return Blink(random_color(rng), float(rng.uniform(0.05, 3)), float(rng.uniform(0.01, 0.99)))
    if kind == "fade":
        return Fade(random_color(rng), random_color(rng), float(rng.uniform(0.05, 3)))
    if kind == "rotate":
        k = int(rng.integers(1, count + 1))
        return Rotate(tuple(random_color(rng) for _ in range(k)), float(rng.uniform(0.05, 3)))
    if kind == "seq":
        n = int(rng.integers(1, 4))
        return Sequence(tuple((random_animation(rng, group, depth + 1), float(rng.uniform(0.05, 2)))
                              for _ in range(n)))
    inner = random_animation(rng, group, depth + 1)
    return Loop(inner)
