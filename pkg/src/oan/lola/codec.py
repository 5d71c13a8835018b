"""MessagePack wire codec for sensor and actuator messages.

One message is one MessagePack map; key order and array order are fixed (see
``docs/wire.md``). Encoders are strict and deterministic. Decoders accept any
bytes and either return a frame or raise a :class:`DecodeError` subclass.
"""

from __future__ import annotations

import functools
import itertools
import math

import msgpack
import numpy as np

from oan.lola.frames import ActuatorFrame, LedState, SensorFrame
from oan.robot_model import NUM_JOINTS, JointId, LedGroup, load_model

LIMIT_EPS = 1e-9
MAX_MESSAGE_BYTES = 1 << 16

SENSOR_KEYS = ("Position", "Stiffness", "Gyroscope", "Accelerometer", "Angles",
               "FSR", "Touch", "Battery", "Cycle", "Time")
LED_KEYS = {
    "Chest": LedGroup.Chest, "LEye": LedGroup.LeftEye, "REye": LedGroup.RightEye,
    "LEar": LedGroup.LeftEar, "REar": LedGroup.RightEar,
    "LFoot": LedGroup.LeftFoot, "RFoot": LedGroup.RightFoot, "Skull": LedGroup.Skull,
}
ACTUATOR_KEYS = ("Position", "Stiffness") + tuple(LED_KEYS)


class ValidationError(ValueError):
    """A frame violates its invariants and cannot be encoded."""

    def __init__(self, channel: str, message: str):
        super().__init__(f"{channel}: {message}")
        self.channel = channel


class DecodeError(ValueError):
    pass


class TruncatedInput(DecodeError):
    pass


class MalformedInput(DecodeError):
    pass


class UnknownKey(DecodeError):
    pass


class MissingKey(DecodeError):
    pass


class WrongArity(DecodeError):
    pass


class WrongScalarType(DecodeError):
    pass


class InvalidValue(DecodeError):
    pass


# -- encoding ----------------------------------------------------------------

def _check_range(channel: str, values: np.ndarray, lo, hi, names=None) -> None:
    values = np.asarray(values, dtype=float)
    bad = ~np.isfinite(values) | (values < lo - LIMIT_EPS) | (values > hi + LIMIT_EPS)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        label = names[i] if names is not None else f"{channel}[{i}]"
        raise ValidationError(label, f"value {values[i]!r} outside [{np.broadcast_to(lo, values.shape)[i]}, "
                                     f"{np.broadcast_to(hi, values.shape)[i]}]")


def _floats(values, arity: int, channel: str) -> list:
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (arity,):
        raise ValidationError(channel, f"expected {arity} values, got shape {arr.shape}")
    return arr.tolist()


POSITION_NAMES = tuple(f"Position.{j.name}" for j in JointId)
STIFFNESS_NAMES = tuple(f"Stiffness.{j.name}" for j in JointId)


def _actuator_lists(frame: ActuatorFrame) -> list:
    """Per-key value lists in ACTUATOR_KEYS order, checked against the limits."""
    model = load_model()
    lists = [_floats(frame.joint_positions, NUM_JOINTS, "Position"),
             _floats(frame.joint_stiffness, NUM_JOINTS, "Stiffness")]
    for key, group in LED_KEYS.items():
        lists.append(_floats(frame.leds[group], model.leds[group].arity, key))
    flat = np.fromiter(itertools.chain.from_iterable(lists), dtype=np.float64)
    lo, hi = _actuator_bounds()
    if not np.all((flat >= lo) & (flat <= hi)):  # NaN fails both comparisons
        # slow path only to name the offending channel
        _check_range("Position", lists[0], model.lower, model.upper, POSITION_NAMES)
        _check_range("Stiffness", lists[1], 0.0, 1.0, STIFFNESS_NAMES)
        for key, values in zip(LED_KEYS, lists[2:]):
            _check_range(key, values, 0.0, 1.0)
    return lists


@functools.lru_cache(maxsize=1)
def _actuator_bounds() -> tuple:
    model = load_model()
    n_leds = sum(model.leds[g].arity for g in LED_KEYS.values())
    lo = np.concatenate([model.lower - LIMIT_EPS, np.full(NUM_JOINTS + n_leds, -LIMIT_EPS)])
    hi = np.concatenate([model.upper + LIMIT_EPS, np.full(NUM_JOINTS + n_leds, 1 + LIMIT_EPS)])
    return lo, hi


def validate_actuators(frame: ActuatorFrame) -> None:
    _actuator_lists(frame)


def encode_actuators(frame: ActuatorFrame) -> bytes:
    msg = dict(zip(ACTUATOR_KEYS, _actuator_lists(frame)))
    return msgpack.packb(msg, use_bin_type=True)


def encode_sensors(frame: SensorFrame) -> bytes:
    fsr = np.asarray(frame.fsr, dtype=float)
    if np.any(fsr < 0) or not np.all(np.isfinite(fsr)):
        raise ValidationError("FSR", "values must be finite and >= 0")
    if not 0.0 <= frame.battery_charge <= 1.0:
        raise ValidationError("Battery", f"{frame.battery_charge!r} outside [0, 1]")
    msg = {
        "Position": _floats(frame.joint_positions, NUM_JOINTS, "Position"),
        "Stiffness": _floats(frame.joint_stiffness, NUM_JOINTS, "Stiffness"),
        "Gyroscope": _floats(frame.gyro, 3, "Gyroscope"),
        "Accelerometer": _floats(frame.accel, 3, "Accelerometer"),
        "Angles": _floats(frame.torso_angles, 2, "Angles"),
        "FSR": _floats(frame.fsr, 8, "FSR"),
        "Touch": [bool(x) for x in np.asarray(frame.touch).reshape(-1)],
        "Battery": float(frame.battery_charge),
        "Cycle": int(frame.cycle_index),
        "Time": float(frame.timestamp),
    }
    if len(msg["Touch"]) != 8:
        raise ValidationError("Touch", "expected 8 values")
    return msgpack.packb(msg, use_bin_type=True)


# -- decoding ----------------------------------------------------------------

def new_unpacker() -> msgpack.Unpacker:
    return msgpack.Unpacker(raw=False, strict_map_key=True,
                            max_buffer_size=MAX_MESSAGE_BYTES * 4)


def unpack_one(data: bytes):
    """Parse exactly one MessagePack object from ``data``."""
    if not isinstance(data, (bytes, bytearray, memoryview)):
        raise MalformedInput("expected a byte sequence")
    unpacker = new_unpacker()
    try:
        unpacker.feed(data)
        obj = unpacker.unpack()
    except msgpack.OutOfData:
        raise TruncatedInput(f"incomplete message ({len(data)} bytes)") from None
    except Exception as exc:  # msgpack raises assorted types on garbage
        raise MalformedInput(f"invalid MessagePack: {exc}") from None
    if unpacker.tell() != len(data):
        raise MalformedInput(f"{len(data) - unpacker.tell()} trailing bytes")
    return obj


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _float_array(msg: dict, key: str, arity: int) -> np.ndarray:
    value = msg[key]
    if not isinstance(value, list):
        raise WrongScalarType(f"{key}: expected array, got {type(value).__name__}")
    if len(value) != arity:
        raise WrongArity(f"{key}: expected {arity} values, got {len(value)}")
    if not set(map(type, value)) <= _NUMBER_TYPES:  # exact types, so bool is excluded
        for i, x in enumerate(value):
            if not _is_number(x):
                raise WrongScalarType(f"{key}[{i}]: expected number, got {type(x).__name__}")
    try:
        arr = np.array(value, dtype=np.float64)
    except OverflowError:
        raise InvalidValue(f"{key}: integer out of range") from None
    if not np.all(np.isfinite(arr)):
        raise InvalidValue(f"{key}: non-finite value")
    return arr


_NUMBER_TYPES = {int, float}


def _check_keys(msg, expected: tuple) -> None:
    if not isinstance(msg, dict):
        raise WrongScalarType(f"expected map at top level, got {type(msg).__name__}")
    for key in msg:
        if key not in expected:
            raise UnknownKey(f"unknown key {key!r}")
    for key in expected:
        if key not in msg:
            raise MissingKey(f"missing key {key!r}")


def sensors_from_message(msg) -> SensorFrame:
    _check_keys(msg, SENSOR_KEYS)
    touch = msg["Touch"]
    if not isinstance(touch, list):
        raise WrongScalarType("Touch: expected array")
    if len(touch) != 8:
        raise WrongArity(f"Touch: expected 8 values, got {len(touch)}")
    if not all(isinstance(x, bool) for x in touch):
        raise WrongScalarType("Touch: expected booleans")
    for key in ("Battery", "Time"):
        if not _is_number(msg[key]):
            raise WrongScalarType(f"{key}: expected number")
    cycle = msg["Cycle"]
    if not isinstance(cycle, int) or isinstance(cycle, bool):
        raise WrongScalarType("Cycle: expected integer")
    fsr = _float_array(msg, "FSR", 8)
    if np.any(fsr < 0):
        raise InvalidValue("FSR: negative value")
    battery = float(msg["Battery"])
    if not 0.0 <= battery <= 1.0:
        raise InvalidValue(f"Battery: {battery} outside [0, 1]")
    timestamp = float(msg["Time"])
    if not math.isfinite(timestamp):
        raise InvalidValue("Time: non-finite")
    return SensorFrame(
        cycle_index=cycle,
        timestamp=timestamp,
        joint_positions=_float_array(msg, "Position", NUM_JOINTS),
        joint_stiffness=_float_array(msg, "Stiffness", NUM_JOINTS),
        gyro=_float_array(msg, "Gyroscope", 3),
        accel=_float_array(msg, "Accelerometer", 3),
        torso_angles=_float_array(msg, "Angles", 2),
        fsr=fsr,
        touch=np.array(touch, dtype=bool),
        battery_charge=battery,
    )


def _checked_list(msg: dict, key: str, arity: int) -> list:
    value = msg[key]
    if not isinstance(value, list):
        raise WrongScalarType(f"{key}: expected array, got {type(value).__name__}")
    if len(value) != arity:
        raise WrongArity(f"{key}: expected {arity} values, got {len(value)}")
    if not set(map(type, value)) <= _NUMBER_TYPES:
        _float_array(msg, key, arity)  # raises with the element index
    return value


def actuators_from_message(msg) -> ActuatorFrame:
    _check_keys(msg, ACTUATOR_KEYS)
    lists = [_checked_list(msg, key, n) for key, n in _actuator_arities()]
    try:
        flat = np.fromiter(itertools.chain.from_iterable(lists), dtype=np.float64)
    except OverflowError:
        raise InvalidValue("integer out of range") from None
    if not np.isfinite(flat).all():
        for key, n in _actuator_arities():
            _float_array(msg, key, n)
    rest = flat[NUM_JOINTS:]
    if not ((rest >= 0) & (rest <= 1)).all():
        bad = int(np.flatnonzero((rest < 0) | (rest > 1))[0]) + NUM_JOINTS
        key = ACTUATOR_KEYS[int(np.searchsorted(_actuator_offsets(), bad, side="right")) - 1]
        raise InvalidValue(f"{key}: value outside [0, 1]")
    parts = np.split(flat, _actuator_offsets()[1:])
    leds = LedState({group: parts[2 + i] for i, group in enumerate(LED_KEYS.values())})
    return ActuatorFrame(parts[0], parts[1], leds)


@functools.lru_cache(maxsize=1)
def _actuator_arities() -> tuple:
    model = load_model()
    return ((("Position", NUM_JOINTS), ("Stiffness", NUM_JOINTS))
            + tuple((key, model.leds[g].arity) for key, g in LED_KEYS.items()))


@functools.lru_cache(maxsize=1)
def _actuator_offsets() -> np.ndarray:
    return np.concatenate([[0], np.cumsum([n for _, n in _actuator_arities()])[:-1]])


def decode_sensors(data: bytes) -> SensorFrame:
    return sensors_from_message(unpack_one(data))


def decode_actuators(data: bytes) -> ActuatorFrame:
    return actuators_from_message(unpack_one(data))
