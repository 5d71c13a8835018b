import numpy as np
import pytest
from hypothesis import given, strategies as st

from oan.motion import (KeyFrame, PosScript, PosSyntaxError, load_pos, parse_pos, sample,
                        sample_many, save_pos, serialize_pos, velocity_violations)
from oan.motion.pos import HOLD
from oan.robot_model import JointId

from harness import oracle_sample, random_script


def test_minimal_script():
    script = parse_pos("joints HeadYaw\n0.0 500\n1.0 1000\n")
    assert script.roster == (JointId.HeadYaw,)
    assert len(script.keyframes) == 2
    assert script.keyframes[1] == KeyFrame((1.0,), 1000.0)


def test_default_roster_is_all_joints():
    line = " ".join(["0"] * 5 + ["-0.5"] + ["0"] * 5 + ["0.5"] + ["0"] * 13) + " 100\n"
    script = parse_pos(line)
    assert script.roster == tuple(JointId)


def test_comments_and_hold_marker():
    script = parse_pos("# wave\njoints HeadYaw HeadPitch  # two\n0.5 ~ 200\n\n~ 0.1 300 # end\n")
    assert script.keyframes[0].targets == (0.5, HOLD)
    assert script.keyframes[1].targets == (HOLD, 0.1)


@pytest.mark.parametrize("text, line, column, fragment", [
    ("joints HeadYaw HeadPitch LHand RHand\n0 0 0 500\n", 2, 1, "expected 4 values"),
    ("joints HeadYaw\nabc 500\n", 2, 1, "not a number"),
    ("joints HeadYaw Nose\n0 0 500\n", 1, 16, "unknown joint"),
    ("joints HeadYaw\n0.1 0\n", 2, 5, "positive"),
    ("joints HeadYaw\n0.1 -5\n", 2, 5, "positive"),
    ("joints HeadYaw\n0.1 5\n", 2, 5, "shorter than one cycle"),
    ("joints HeadYaw\n9.0 500\n", 2, 1, "outside"),
    ("joints HeadYaw\n", 1, 1, "no keyframes"),
    ("joints HeadYaw\n0 100\njoints HeadPitch\n", 3, 1, "first and only once"),
    ("joints HeadYaw\nnan 100\n", 2, 1, "finite"),
])
def test_errors_have_location(text, line, column, fragment):
    with pytest.raises(PosSyntaxError) as info:
        parse_pos(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert fragment in str(info.value)


@given(st.text(max_size=200))
def test_parser_is_total(text):
    try:
        parse_pos(text)
    except PosSyntaxError:
        pass


@given(st.integers(0, 2**32 - 1))
def test_canonical_round_trip(seed):
    script = random_script(np.random.default_rng(seed))
    again = parse_pos(serialize_pos(script), name=script.name)
    assert again == script
    assert serialize_pos(again) == serialize_pos(script)


def test_save_and_load(tmp_path):
    script = parse_pos("joints HeadYaw\n0.3 250\n")
    save_pos(script, tmp_path / "nod.pos")
    loaded = load_pos(tmp_path / "nod.pos")
    assert loaded.name == "nod" and loaded.keyframes == script.keyframes


def test_linearity_example():
    script = parse_pos("joints HeadYaw\n1.0 1000\n")
    assert sample(script, {JointId.HeadYaw: 0.0}, 0.25)[0] == 0.25


def test_t_zero_is_start_pose_and_end_holds():
    script = parse_pos("joints HeadYaw HeadPitch\n1.0 0.2 1000\n-1.0 ~ 500\n")
    start = {JointId.HeadYaw: 0.3, JointId.HeadPitch: -0.1}
    assert sample(script, start, 0.0).tolist() == [0.3, -0.1]
    assert sample(script, start, 99.0).tolist() == [-1.0, 0.2]
    assert sample(script, start, 1.25).tolist() == pytest.approx([0.0, 0.2])


def test_dense_grid_matches_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        script = random_script(rng)
        start = {j: float(rng.uniform(-0.03, 0.03)) for j in script.roster}
        start = {j: float(np.clip(v, -2, 2)) for j, v in start.items()}
        ts = np.arange(0.0, script.total_duration + 0.05, 0.001)
        got = sample_many(script, start, ts)
        want = np.array([oracle_sample(script, start, t) for t in ts])
        assert np.max(np.abs(got - want)) <= 1e-12


@given(st.integers(0, 2**32 - 1), st.floats(0, 5))
def test_sample_is_continuous(seed, t):
    rng = np.random.default_rng(seed)
    script = random_script(rng)
    start = {j: 0.0 for j in script.roster}
    a = sample(script, start, t)
    b = sample(script, start, t + 1e-9)
    assert np.max(np.abs(a - b)) < 1e-5


def test_velocity_validator_flags_fast_segments():
    fast = parse_pos("joints HeadYaw\n2.0 10\n")
    slow = parse_pos("joints HeadYaw\n2.0 1000\n")
    assert velocity_violations(fast, {JointId.HeadYaw: 0.0})
    assert not velocity_violations(slow, {JointId.HeadYaw: 0.0})


def test_script_invariants():
    with pytest.raises(ValueError):
        PosScript((JointId.HeadYaw,), ())
    with pytest.raises(ValueError):
        PosScript((JointId.HeadYaw,), (KeyFrame((0.0, 1.0), 100.0),))
    with pytest.raises(ValueError):
        PosScript((JointId.HeadYaw,), (KeyFrame((0.0,), 5.0),))
