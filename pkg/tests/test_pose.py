import math

from hypothesis import given, strategies as st

from mtscs.pose import Pose, concat, identity, inverse, key, relative

H = 8
coord = st.integers(-6, 6).map(float)
pose = st.builds(lambda x, y, h: Pose(x, y, None, h), coord, coord, st.integers(0, H - 1))


def close(a: Pose, b: Pose, tol=1e-9):
    return a.heading == b.heading and math.hypot(a.x - b.x, a.y - b.y) <= tol


def test_identity_is_neutral():
    p = Pose(2.0, -1.0, None, 3)
    s = identity(H)
    assert concat(s, p, H) == p
    assert concat(p, s, H) == p


def test_quarter_turn_concat():
    q = Pose(1.0, 1.0, None, 1)
    assert concat(q, q, 4) == Pose(0.0, 2.0, None, 2)


def test_translation_concat():
    assert concat(Pose(1.0, 0.0, None, 0), Pose(1.0, 0.0, None, 0), 4) == Pose(2.0, 0.0, None, 0)
    assert concat(Pose(1.0, 2.0), Pose(3.0, 4.0)) == Pose(4.0, 6.0)
    assert concat(Pose(1.0, 2.0, 3.0), Pose(1.0, 1.0, 1.0)) == Pose(2.0, 3.0, 4.0)


def test_quarter_turns_stay_integral():
    p = Pose(2.0, 1.0, None, 0)
    for h in range(0, H, 2):
        r = concat(Pose(0.0, 0.0, None, h), p, H)
        assert r.x == round(r.x) and r.y == round(r.y)


@given(pose, pose, pose)
def test_associative(a, b, c):
    assert close(concat(concat(a, b, H), c, H), concat(a, concat(b, c, H), H))


@given(pose)
def test_inverse(a):
    assert close(concat(a, inverse(a, H), H), identity(H))
    assert close(concat(inverse(a, H), a, H), identity(H))


@given(pose, pose)
def test_relative(a, b):
    assert close(concat(a, relative(a, b, H), H), b)


def test_key_merges_float_noise():
    assert key(Pose(1.0, 0.0, None, 1)) == key(Pose(1.0 + 1e-12, -1e-13, None, 1))
    assert key(Pose(1.0, 0.0, None, 1)) != key(Pose(1.0, 0.0, None, 2))
