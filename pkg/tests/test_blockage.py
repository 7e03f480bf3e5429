"""Prism placement and segment occlusion, checked against point sampling."""

import numpy as np
import pytest

from lifisim import (BlockageConfig, Blocker, DevicePose, Room,
                     blockage_mask, place_blockers, segment_blocked,
                     segments_blocked)


def _point_in_prism(points, blocker):
    """Closed-volume membership of (n, 3) points, in the prism frame."""
    phi = np.deg2rad(blocker.facing_deg)
    c, s = np.cos(phi), np.sin(phi)
    dx = points[:, 0] - blocker.center[0]
    dy = points[:, 1] - blocker.center[1]
    u = c * dx + s * dy
    v = -s * dx + c * dy
    return ((np.abs(u) <= blocker.width / 2)
            & (np.abs(v) <= blocker.length / 2)
            & (points[:, 2] >= 0.0) & (points[:, 2] <= blocker.height))


def _sampled_hit(a, b, blocker, n=10_000):
    """Dense-sampling oracle over the open segment interior."""
    t = (np.arange(n) + 0.5) / n
    pts = a[None, :] + t[:, None] * (b - a)[None, :]
    return bool(_point_in_prism(pts, blocker).any())


def test_segment_through_prism():
    blocker = Blocker(center=(0.0, 0.0), facing_deg=0.0)
    assert segment_blocked([-1, 0, 1.0], [1, 0, 1.0], blocker)
    assert segment_blocked([0, -1, 1.0], [0, 1, 1.0], blocker)


def test_segment_misses_prism():
    blocker = Blocker(center=(0.0, 0.0), facing_deg=0.0)
    # blocker entirely beyond the far endpoint
    assert not segment_blocked([5, 0, 1.0], [2, 0, 1.0], blocker)
    # passing above the prism
    assert not segment_blocked([-1, 0, 2.0], [1, 0, 2.0], blocker)


def test_segment_grazing_face_counts():
    blocker = Blocker(center=(0.0, 0.0), facing_deg=0.0)
    # runs inside the face plane x = width/2: closed-volume convention
    assert segment_blocked([0.1, -1, 1.0], [0.1, 1, 1.0], blocker)


def test_endpoint_touch_does_not_count():
    blocker = Blocker(center=(0.0, 0.0), facing_deg=0.0)
    # far endpoint exactly on the face, segment otherwise outside
    assert not segment_blocked([5.0, 0, 1.0], [0.1, 0, 1.0], blocker)
    assert not segment_blocked([0.1, 0, 1.0], [5.0, 0, 1.0], blocker)


def test_segment_blocked_rejects_degenerate():
    blocker = Blocker(center=(0.0, 0.0), facing_deg=0.0)
    with pytest.raises(ValueError):
        segment_blocked([1, 1, 1], [1, 1, 1], blocker)


def test_vertical_segment_inside_footprint():
    # degenerate x and y axes: membership decided per axis
    blocker = Blocker(center=(0.0, 0.0), facing_deg=30.0)
    assert segment_blocked([0, 0, -1.0], [0, 0, 3.0], blocker)
    assert not segment_blocked([2, 2, -1.0], [2, 2, 3.0], blocker)


def test_agreement_with_sampling_oracle():
    rng = np.random.default_rng(17)
    mismatches = 0
    for _ in range(1000):
        blocker = Blocker(center=tuple(rng.uniform(1, 4, size=2)),
                          facing_deg=rng.uniform(0, 360))
        a = rng.uniform([0, 0, 0], [5, 5, 3])
        b = rng.uniform([0, 0, 0], [5, 5, 3])
        got = segment_blocked(a, b, blocker)
        oracle = _sampled_hit(a, b, blocker)
        if oracle:
            assert got, f"missed hit for a={a} b={b} blocker={blocker}"
        elif got:
            mismatches += 1      # thinner than the sampling resolution
    assert mismatches <= 20


def test_segments_blocked_vectorized_matches_scalar():
    rng = np.random.default_rng(23)
    blockers = [Blocker(center=tuple(rng.uniform(1, 4, size=2)),
                        facing_deg=rng.uniform(0, 360)) for _ in range(3)]
    a = rng.uniform([0, 0, 0], [5, 5, 3], size=(40, 3))
    b = rng.uniform([0, 0, 0], [5, 5, 3], size=(40, 3))
    got = segments_blocked(a, b, blockers)
    expected = [any(segment_blocked(ai, bi, bl) for bl in blockers)
                for ai, bi in zip(a, b)]
    np.testing.assert_array_equal(got, expected)


def test_mask_shape_and_monotonicity():
    rng = np.random.default_rng(31)
    tx = rng.uniform([0, 0, 2.5], [5, 5, 3], size=(4, 3))
    rx = rng.uniform([0, 0, 0.5], [5, 5, 1.5], size=(6, 3))
    blockers = [Blocker(center=tuple(rng.uniform(0, 5, size=2)),
                        facing_deg=rng.uniform(0, 360)) for _ in range(6)]
    base = blockage_mask(tx, rx, blockers[:3])
    extended = blockage_mask(tx, rx, blockers)
    assert base.shape == (6, 4)
    assert np.all(extended | base == extended)   # adding never unmasks
    assert not blockage_mask(tx, rx, []).any()


def test_blockage_mask_rejects_empty_positions():
    with pytest.raises(ValueError):
        blockage_mask(np.empty((0, 3)), np.ones((1, 3)), [])


def test_self_blocker_placement():
    cfg = BlockageConfig(kappa_b=0.0, d_p=0.3)
    pose = DevicePose(position=np.array([2.0, 3.0, 0.8]), omega_deg=90.0)
    blockers = place_blockers(cfg, Room(), pose, np.random.default_rng(0))
    assert len(blockers) == 1
    assert blockers[0].kind == "self"
    # body stands d_p behind the device, against the facing direction
    np.testing.assert_allclose(blockers[0].center, (2.0, 2.7), atol=1e-12)
    assert blockers[0].facing_deg == pytest.approx(90.0)


def test_self_blocker_can_be_disabled():
    cfg = BlockageConfig(kappa_b=0.0, self_blocker=False)
    pose = DevicePose(position=np.array([2.0, 3.0, 0.8]), omega_deg=0.0)
    assert place_blockers(cfg, Room(), pose, np.random.default_rng(0)) == []


def test_blocker_count_rounds_half_up():
    pose = DevicePose(position=np.array([2.5, 2.5, 0.8]), omega_deg=0.0)
    room = Room()
    rng = np.random.default_rng(1)

    def count(kappa):
        cfg = BlockageConfig(kappa_b=kappa, self_blocker=False)
        return len(place_blockers(cfg, room, pose, rng))

    assert count(0.2) == 5          # 0.2 * 25 = 5
    assert count(0.18) == 5         # 4.5 rounds half up
    assert count(0.179) == 4
    assert count(0.0) == 0


def test_blockers_inside_room():
    cfg = BlockageConfig(kappa_b=1.0)
    pose = DevicePose(position=np.array([2.5, 2.5, 0.8]), omega_deg=45.0)
    blockers = place_blockers(cfg, Room(), pose, np.random.default_rng(7))
    assert len(blockers) == 26      # 25 non-user + self
    centers = np.array([b.center for b in blockers[1:]])
    assert (centers >= 0).all() and (centers <= 5).all()
    facings = np.array([b.facing_deg for b in blockers[1:]])
    assert (facings >= 0).all() and (facings < 360).all()


def test_self_blocker_spares_high_elevation_links():
    # link clears the 1.75 m body when it crosses the footprint high up
    pose = DevicePose(position=np.array([2.5, 2.5, 1.4]), omega_deg=90.0)
    cfg = BlockageConfig(kappa_b=0.0, d_p=0.3)
    body = place_blockers(cfg, Room(), pose, np.random.default_rng(0))[0]
    np.testing.assert_allclose(body.center, (2.5, 2.2), atol=1e-12)
    high_ap = np.array([2.5, 2.2, 2.95])
    low_ap = np.array([2.5, 2.2, 1.6])
    device = np.array([2.5, 2.5, 1.4])
    assert not segment_blocked(high_ap, device, body)
    assert segment_blocked(low_ap, device, body)


def test_config_validation():
    with pytest.raises(ValueError):
        BlockageConfig(kappa_b=-0.1)
    with pytest.raises(ValueError):
        BlockageConfig(d_p=0.0)
    with pytest.raises(ValueError):
        Blocker(center=(0, 0), facing_deg=0.0, height=0.0)
