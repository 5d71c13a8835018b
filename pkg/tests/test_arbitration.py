import numpy as np
import pytest
from hypothesis import given, strategies as st

from oan.lola import ActuatorFrame, Arbiter, CommandRequest, GrantConflict
from oan.robot_model import ARMS, HEAD, JointId, LedGroup, load_model

from strategies import actuator_frames

MODEL = load_model()


def previous():
    return ActuatorFrame(MODEL.clamp(np.zeros(25)), np.zeros(25))


def test_single_request_sets_one_channel():
    arb = Arbiter()
    arb.grant_ownership("a", joints=[JointId.HeadYaw])
    prev = previous()
    out = arb.arbitrate([CommandRequest("a", {JointId.HeadYaw: (0.3, None)})], prev)
    assert out.joint_positions[JointId.HeadYaw] == 0.3
    mask = np.arange(25) != JointId.HeadYaw
    assert np.array_equal(out.joint_positions[mask], prev.joint_positions[mask])
    assert out.leds == prev.leds


def test_higher_priority_wins():
    arb = Arbiter()
    arb.grant_ownership("lo", joints=[JointId.HeadYaw], exclusive=False)
    arb.grant_ownership("hi", joints=[JointId.HeadYaw], exclusive=False)
    hi = CommandRequest("hi", {JointId.HeadYaw: (0.2, None)}, priority=2)
    lo = CommandRequest("lo", {JointId.HeadYaw: (0.1, None)}, priority=1)
    assert arb.arbitrate([hi, lo], previous()).joint_positions[0] == 0.2


def test_tie_goes_to_latest_submission():
    arb = Arbiter()
    arb.grant_ownership("a", joints=[JointId.HeadYaw], exclusive=False)
    arb.grant_ownership("b", joints=[JointId.HeadYaw], exclusive=False)
    first = CommandRequest("a", {JointId.HeadYaw: (0.1, None)})
    second = CommandRequest("b", {JointId.HeadYaw: (0.2, None)})
    assert arb.arbitrate([second, first], previous()).joint_positions[0] == 0.2


def test_clamp_to_limit_is_counted():
    arb = Arbiter()
    arb.grant_ownership("a", joints=[JointId.HeadYaw])
    out = arb.arbitrate([CommandRequest("a", {JointId.HeadYaw: (5.0, 1.0)})], previous())
    assert out.joint_positions[JointId.HeadYaw] == MODEL.upper[JointId.HeadYaw] == 2.0857
    assert arb.clamp_count == 1
    assert arb.audit[-1].kind == "clamped"


def test_unowned_request_rejected_others_applied():
    arb = Arbiter()
    arb.grant_ownership("a", joints=[JointId.HeadYaw])
    bad = CommandRequest("b", {JointId.HeadPitch: (0.2, None)})
    good = CommandRequest("a", {JointId.HeadYaw: (0.3, None)})
    out = arb.arbitrate([bad, good], previous())
    assert out.joint_positions[JointId.HeadYaw] == 0.3
    assert out.joint_positions[JointId.HeadPitch] == 0.0
    assert arb.rejected_count == 1


def test_exclusive_grant_conflict_has_no_side_effects():
    arb = Arbiter()
    arb.grant_ownership("walk", joints=[JointId.LHipRoll])
    with pytest.raises(GrantConflict) as info:
        arb.grant_ownership("sway", joints=[JointId.LHipRoll, JointId.HeadYaw])
    assert JointId.LHipRoll in info.value.contested
    assert "sway" not in arb.holders()
    arb.release_ownership("walk")
    arb.grant_ownership("sway", joints=[JointId.LHipRoll])
    assert arb.owned_by("sway") == {JointId.LHipRoll}


def test_led_channels_are_owned_and_clipped():
    arb = Arbiter()
    arb.grant_ownership("leds", leds=[LedGroup.Chest])
    out = arb.arbitrate([CommandRequest("leds", led_targets={LedGroup.Chest: [2.0, 0.5, -1]})],
                        previous())
    assert out.leds[LedGroup.Chest].tolist() == [1.0, 0.5, 0.0]


@st.composite
def request_sets(draw):
    joints = sorted(HEAD | ARMS)
    reqs = []
    for source in ("a", "b", "c"):
        chosen = draw(st.lists(st.sampled_from(joints), unique=True, max_size=5))
        targets = {j: (draw(st.floats(-3, 3)), draw(st.one_of(st.none(), st.floats(0, 1))))
                   for j in chosen}
        reqs.append(CommandRequest(source, targets, priority=draw(st.integers(0, 3))))
    return reqs


def _arbiter():
    arb = Arbiter()
    for source in ("a", "b", "c"):
        arb.grant_ownership(source, joints=HEAD | ARMS, exclusive=False)
    return arb


@given(request_sets(), actuator_frames())
def test_arbitration_is_deterministic_and_holds(reqs, prev):
    out1 = _arbiter().arbitrate(reqs, prev)
    out2 = _arbiter().arbitrate(list(reversed(reqs)), prev)
    assert out1 == out2
    touched = set().union(*(r.joint_targets for r in reqs))
    for j in JointId:
        if j not in touched:
            assert out1.joint_positions[j] == prev.joint_positions[j]
            assert out1.joint_stiffness[j] == prev.joint_stiffness[j]
        assert MODEL.lower[j] <= out1.joint_positions[j] <= MODEL.upper[j]
    assert out1.leds == prev.leds
