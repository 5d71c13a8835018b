from oan.lola.arbitration import (Arbiter, AuditEntry, CommandRequest, GrantConflict,
                                  OwnershipError)
from oan.lola.codec import (DecodeError, MalformedInput, MissingKey, TruncatedInput,
                            UnknownKey, ValidationError, WrongArity, WrongScalarType,
                            decode_actuators, decode_sensors, encode_actuators,
                            encode_sensors)
from oan.lola.frames import ActuatorFrame, LedState, SensorFrame
from oan.lola.loop import CycleLoop, CycleStats, LatestValue
from oan.lola.transport import ConnectionClosed, Session, connect

__all__ = [
    "ActuatorFrame", "Arbiter", "AuditEntry", "CommandRequest", "ConnectionClosed",
    "CycleLoop", "CycleStats", "DecodeError", "GrantConflict", "LatestValue", "LedState",
    "MalformedInput", "MissingKey", "OwnershipError", "SensorFrame", "Session",
    "TruncatedInput", "UnknownKey", "ValidationError", "WrongArity", "WrongScalarType",
    "connect", "decode_actuators", "decode_sensors", "encode_actuators", "encode_sensors",
]
