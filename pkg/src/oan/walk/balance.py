"""Gyro feedback on the ankles of the supporting leg(s)."""

from __future__ import annotations

import numpy as np

from oan.robot_model import JointId, load_model
from oan.walk.phase import Support

ANKLES = {
    "left": (JointId.LAnklePitch, JointId.LAnkleRoll),
    "right": (JointId.RAnklePitch, JointId.RAnkleRoll),
}


def lowpass(gyro, previous, alpha: float) -> np.ndarray:
    return alpha * np.asarray(gyro, dtype=float) + (1.0 - alpha) * np.asarray(previous, dtype=float)


def balance_correct(gyro, filtered, joints: dict, params, support: Support = Support.DoubleSupport):
    """Return (corrected joints, new filtered gyro).

    ``joints`` maps JointId -> radians. Pitch rate feeds ankle pitch and roll
    rate feeds ankle roll on every leg in contact; results are limit-clamped.
    """
    model = load_model()
    g = lowpass(np.nan_to_num(gyro, nan=0.0, posinf=0.0, neginf=0.0), filtered,
                params.gyro_lowpass_alpha)
    out = dict(joints)
    sides = [s for s, on in (("left", support.left_contact),
                             ("right", support.right_contact)) if on]
    for side in sides:
        pitch, roll = ANKLES[side]
        if pitch in out:
            out[pitch] = float(np.clip(out[pitch] + params.gyro_gain_pitch * g[1],
                                       model.lower[pitch], model.upper[pitch]))
        if roll in out:
            out[roll] = float(np.clip(out[roll] + params.gyro_gain_roll * g[0],
                                      model.lower[roll], model.upper[roll]))
    return out, g
