from oan.walk.balance import balance_correct, lowpass
from oan.walk.engine import LEG_JOINTS, WalkAction, WalkError, WalkState, leg_targets, walk_tick
from oan.walk.gait import GaitParams, WalkCommand, gait_targets
from oan.walk.kinematics import (FootPose, LegJoints, OutOfWorkspace, leg_fk, leg_fk_full,
                                 leg_ik)
from oan.walk.phase import Support, SupportState, detect_phase

__all__ = ["FootPose", "GaitParams", "LEG_JOINTS", "LegJoints", "OutOfWorkspace", "Support",
           "SupportState", "WalkAction", "WalkCommand", "WalkError", "WalkState",
           "balance_correct", "detect_phase", "gait_targets", "leg_fk", "leg_fk_full",
           "leg_ik", "leg_targets", "lowpass", "walk_tick"]
