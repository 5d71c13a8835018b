from oan.motion.actions import PlayAction, RecordAction, play, record
from oan.motion.pos import (HOLD, KeyFrame, PosScript, PosSyntaxError, load_pos, parse_pos,
                            sample, sample_many, save_pos, serialize_pos, velocity_violations)
from oan.motion.reduce import Recording, keyframe_indices, reduce_to_script

__all__ = ["HOLD", "KeyFrame", "PlayAction", "PosScript", "PosSyntaxError", "RecordAction",
           "Recording", "keyframe_indices", "load_pos", "parse_pos", "play", "record",
           "reduce_to_script", "sample", "sample_many", "save_pos", "serialize_pos",
           "velocity_violations"]
