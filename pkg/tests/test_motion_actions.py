import time

import numpy as np
import pytest

from oan.lola import GrantConflict
from oan.motion import PlayAction, RecordAction, parse_pos, play, record
from oan.robot_model import JointId

from harness import record_reduce_replay

WAVE = parse_pos("joints HeadYaw HeadPitch LShoulderPitch\n0.5 0.2 -0.5 400\n0.0 0.0 0.0 400\n",
                 name="wave")


def _capture(robot):
    seen = []
    original = robot.submit

    def submit(req):
        seen.append(req)
        original(req)

    robot.submit = submit
    return seen


def test_play_respects_mask(robot):
    seen = _capture(robot)
    handle = play(robot, WAVE, mask={JointId.HeadYaw, JointId.RHand})
    assert handle.wait(3.0) and handle.error is None
    mine = [r for r in seen if r.source_id == handle.action.source_id]
    assert mine
    assert all(set(r.joint_targets) == {JointId.HeadYaw} for r in mine)
    assert handle.progress == 1.0
    assert robot.arbiter.owned_by(handle.action.source_id) == frozenset()


def test_play_reaches_targets(robot):
    script = parse_pos("joints HeadYaw\n0.4 300\n")
    robot.run(PlayAction(script), timeout=3.0)
    time.sleep(0.05)
    assert robot.sensor.joint_positions[JointId.HeadYaw] == pytest.approx(0.4)


def test_ownership_conflict_fails_before_motion(robot):
    robot.arbiter.grant_ownership("other", joints=[JointId.HeadPitch])
    before = robot.sensor.joint_positions.copy()
    with pytest.raises(GrantConflict):
        play(robot, WAVE)
    time.sleep(0.1)
    assert np.array_equal(robot.sensor.joint_positions, before)


def test_cancel_holds_last_pose(robot):
    script = parse_pos("joints HeadYaw\n1.5 2000\n")
    handle = play(robot, script)
    time.sleep(0.4)
    handle.cancel()
    assert handle.wait(2.0)
    time.sleep(0.1)
    held = robot.sensor.joint_positions[JointId.HeadYaw]
    time.sleep(0.2)
    assert 0.05 < held < 1.5
    assert robot.sensor.joint_positions[JointId.HeadYaw] == held
    assert robot.arbiter.holders() == {}


def test_record_requires_running_loop(robot):
    robot.stop()
    with pytest.raises(RuntimeError):
        record(robot, [JointId.HeadYaw])


def test_record_sets_and_restores_stiffness(robot):
    robot.run(PlayAction(parse_pos("joints HeadYaw\n0.1 100\n"), stiffness=0.7), timeout=2.0)
    handle, action = record(robot, [JointId.HeadYaw], duration=0.3)
    time.sleep(0.1)
    assert robot.sensor.joint_stiffness[JointId.HeadYaw] == 0.0
    assert robot.sensor.joint_stiffness[JointId.HeadPitch] == 0.0
    assert handle.wait(2.0)
    time.sleep(0.1)
    assert robot.sensor.joint_stiffness[JointId.HeadYaw] == 0.7
    rec = handle.result
    assert rec.mask == (JointId.HeadYaw,)
    assert len(rec.timestamps) >= 20
    assert np.all(np.diff(rec.timestamps) > 0)


def test_record_action_validation():
    with pytest.raises(ValueError):
        RecordAction([])
    with pytest.raises(ValueError):
        RecordAction([JointId.HeadYaw], sample_period=0.001)


def test_record_reduce_replay(endpoint):
    rec, script, worst, allowed = record_reduce_replay(endpoint, tolerance=0.01)
    assert len(script.keyframes) < len(rec.timestamps)
    assert worst <= allowed
