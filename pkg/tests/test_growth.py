import math

import numpy as np
import pytest

from vinefab.errors import ValidationError
from vinefab.geometry import DHChain, dh_to_polyline, fk_chain, rot_z
from vinefab.growth import (Box, ClearanceResult, GrowthState, ObstacleScene,
                            Sphere, clearance, sweep_samples, tip_pose_at)

from conftest import random_feasible_chain
from oracles import fk_homogeneous, point_segment_distance


def test_tip_at_zero_is_base_frame(three_bend_chain):
    pose = tip_pose_at(GrowthState(three_bend_chain, 0.0))
    np.testing.assert_array_equal(pose.rotation, np.eye(3))
    np.testing.assert_array_equal(pose.translation, np.zeros(3))


def test_tip_at_full_length_matches_fk(three_bend_chain):
    pose = tip_pose_at(GrowthState(three_bend_chain, 300.0))
    tip = fk_chain(three_bend_chain)[-1]
    np.testing.assert_allclose(pose.translation, tip.translation, atol=1e-9)
    np.testing.assert_allclose(pose.rotation, tip.rotation, atol=1e-12)


def test_tip_mid_link_matches_matrix_oracle(three_bend_chain):
    # 150 mm everted: one full link, the joint-2 bend, then 50 mm into link 2
    pose = tip_pose_at(GrowthState(three_bend_chain, 150.0))
    frames = fk_homogeneous(three_bend_chain.lengths(),
                            three_bend_chain.alphas(),
                            three_bend_chain.thetas())
    rz = np.eye(4)
    rz[:3, :3] = rot_z(math.pi / 4)
    tx = np.eye(4)
    tx[0, 3] = 50.0
    ref = frames[1] @ rz @ tx
    np.testing.assert_allclose(pose.translation, ref[:3, 3], atol=1e-9)


def test_everted_length_out_of_range(three_bend_chain):
    with pytest.raises(ValidationError):
        GrowthState(three_bend_chain, -1.0)
    with pytest.raises(ValidationError):
        GrowthState(three_bend_chain, 300.1)


def test_translation_continuity_rotation_piecewise(three_bend_chain):
    step = 0.5
    lengths = np.arange(0.0, 300.0 + step, step)
    prev = None
    for of in lengths:
        pose = tip_pose_at(GrowthState(three_bend_chain, float(of)))
        if prev is not None:
            jump = np.linalg.norm(pose.translation - prev.translation)
            assert jump <= step * 1.01
        prev = pose
    # rotation is constant strictly inside a link
    r_a = tip_pose_at(GrowthState(three_bend_chain, 120.0)).rotation
    r_b = tip_pose_at(GrowthState(three_bend_chain, 180.0)).rotation
    np.testing.assert_allclose(r_a, r_b, atol=1e-12)


def test_sweep_sample_counts():
    chain = DHChain.from_arrays([100, 100], [0, 0], [0, 0], 16.5)
    body = sweep_samples(GrowthState(chain, 200.0), step=200.0)
    assert body.centers.shape[0] >= 2
    assert body.arc_lengths[0] == 0.0 and body.arc_lengths[-1] == 200.0
    for L, step in ((200.0, 7.0), (155.5, 10.0), (0.0, 5.0)):
        body = sweep_samples(GrowthState(chain, L), step=step)
        assert body.centers.shape[0] == math.floor(L / step) + 2
    with pytest.raises(ValidationError):
        sweep_samples(GrowthState(chain, 100.0), step=0.0)


def test_sweep_samples_lie_on_centerline(three_bend_chain):
    body = sweep_samples(GrowthState(three_bend_chain, 300.0), step=3.7)
    verts = dh_to_polyline(three_bend_chain)
    for p in body.centers:
        d = min(point_segment_distance(p, verts[i], verts[i + 1])
                for i in range(len(verts) - 1))
        assert d < 1e-6
    assert body.radius == 16.5


def test_centerline_points_domain(three_bend_chain):
    from vinefab.growth import centerline_points

    state = GrowthState(three_bend_chain, 150.0)
    pts = centerline_points(state, np.array([0.0, 100.0, 150.0]))
    np.testing.assert_allclose(pts[0], [0.0, 0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(pts[1], [100.0, 0.0, 0.0], atol=1e-12)
    with pytest.raises(ValidationError):
        centerline_points(state, np.array([200.0]))


def test_clearance_point_to_sphere_hand_geometry():
    chain = DHChain.from_arrays([300], [0], [0], 16.5)
    scene = ObstacleScene(spheres=(Sphere(center=[150.0, 100.0, 0.0], radius=30.0),))
    res = clearance(GrowthState(chain, 300.0), scene, step=1.0)
    assert res.clearance == pytest.approx(100.0 - 30.0 - 16.5, abs=1e-9)
    np.testing.assert_allclose(res.location, [150.0, 0.0, 0.0], atol=1e-9)


def test_clearance_penetration_is_negative():
    chain = DHChain.from_arrays([300], [0], [0], 16.5)
    scene = ObstacleScene(spheres=(Sphere(center=[150.0, 0.0, 0.0], radius=20.0),))
    res = clearance(GrowthState(chain, 300.0), scene, step=1.0)
    assert res.clearance == pytest.approx(-20.0 - 16.5, abs=1e-9)
    assert res.clearance < 0.0


def test_clearance_empty_scene():
    chain = DHChain.from_arrays([300], [0], [0], 16.5)
    res = clearance(GrowthState(chain, 300.0), ObstacleScene())
    assert isinstance(res, ClearanceResult)
    assert res.no_obstacles and res.clearance == math.inf
    assert res.location is None


def test_clearance_monotone_under_inflation():
    rng = np.random.default_rng(37)
    chain = random_feasible_chain(rng, max_links=4)
    state = GrowthState(chain, chain.total_length)
    center = dh_to_polyline(chain)[-1] + np.array([50.0, 40.0, 30.0])
    base = clearance(state, ObstacleScene(spheres=(Sphere(center, 10.0),)), 2.0)
    for delta in (1.0, 5.0, 20.0):
        grown = clearance(state,
                          ObstacleScene(spheres=(Sphere(center, 10.0 + delta),)),
                          2.0)
        assert grown.clearance == pytest.approx(base.clearance - delta, abs=1e-9)


def test_box_signed_distance():
    box = Box(min_corner=[0, 0, 0], max_corner=[10, 10, 10])
    np.testing.assert_allclose(box.surface_distance(np.array([[5, 5, 5]])), [-5.0])
    np.testing.assert_allclose(box.surface_distance(np.array([[15, 5, 5]])), [5.0])
    np.testing.assert_allclose(box.surface_distance(np.array([[13, 14, 5]])),
                               [5.0])  # corner: hypot(3, 4)
    np.testing.assert_allclose(box.surface_distance(np.array([[5, 5, 9]])), [-1.0])


def test_scene_validation():
    with pytest.raises(ValidationError):
        Sphere(center=[0, 0, 0], radius=0.0)
    with pytest.raises(ValidationError):
        Box(min_corner=[0, 0, 0], max_corner=[10, -1, 10])
