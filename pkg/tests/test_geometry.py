import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from taxelsim import geometry
from taxelsim.errors import ConfigError, InvalidModelError, InvalidStateError
from taxelsim.geometry import (
    ObjectModel,
    ObjectState,
    TaxelGrid,
    TaxelSpec,
    penetrations,
    penetrations_batched,
    transform_points,
)


def random_state(rng, speed=0.05):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    return ObjectState(position=rng.normal(size=3) * 0.05, orientation=q,
                       linear_velocity=rng.normal(size=3) * speed,
                       angular_velocity=rng.normal(size=3) * speed)


def cloud_model(points, volume=1e-3):
    return ObjectModel(surface_points=np.asarray(points, dtype=float), volume=volume)


def naive_penetrations(origin, R, points):
    """Independent O(N) oracle: pure-python distances and running sum."""
    idx, pens = [], []
    total = 0.0
    for i, p in enumerate(points):
        dx = p[0] - origin[0]
        dy = p[1] - origin[1]
        dz = p[2] - origin[2]
        l = math.sqrt(dx * dx + dy * dy + dz * dz)
        if l <= R:
            idx.append(i)
            pens.append(R - l)
            total += R - l
    return np.array(idx), np.array(pens), total


# ---------------------------------------------------------------------------
# transform_points
# ---------------------------------------------------------------------------

def test_identity_pose_keeps_cloud():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(32, 3))
    model = cloud_model(pts)
    out = transform_points(model, ObjectState())
    np.testing.assert_array_equal(out, pts)


def test_half_turn_about_z():
    model = cloud_model([[1.0, 0.0, 0.0]])
    state = ObjectState(orientation=geometry.quat_from_axis_angle([0, 0, 1], np.pi))
    out = transform_points(model, state)
    np.testing.assert_allclose(out[0], [-1.0, 0.0, 0.0], atol=1e-12)


def test_transform_matches_homogeneous_matrix_oracle():
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(64, 3))
    model = cloud_model(pts)
    for _ in range(20):
        state = random_state(rng)
        out = transform_points(model, state)
        # independent oracle: scipy rotation packed into a 4x4 matrix
        H = np.eye(4)
        H[:3, :3] = Rotation.from_quat(state.orientation).as_matrix()
        H[:3, 3] = state.position
        hom = np.hstack([pts, np.ones((64, 1))])
        expected = (H @ hom.T).T[:, :3]
        np.testing.assert_allclose(out, expected, atol=1e-9)


def test_transform_preserves_pairwise_lengths():
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(16, 3))
    model = cloud_model(pts)
    state = random_state(rng)
    out = transform_points(model, state)
    d_in = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
    d_out = np.linalg.norm(out[:, None] - out[None, :], axis=-1)
    np.testing.assert_allclose(d_out, d_in, atol=1e-9)


def test_transform_rejects_non_unit_quaternion():
    model = cloud_model([[0.0, 0.0, 0.0]])
    with pytest.raises(InvalidStateError):
        ObjectState(orientation=np.array([0.0, 0.0, 0.0, 1.1]))
    state = ObjectState()
    state.orientation = np.array([0.0, 0.0, 0.0, 1.1])  # mutate past the constructor
    with pytest.raises(InvalidStateError):
        transform_points(model, state)


# ---------------------------------------------------------------------------
# penetrations (single taxel)
# ---------------------------------------------------------------------------

def test_point_at_origin_full_penetration():
    taxel = TaxelSpec(origin=np.zeros(3), sensing_range=0.03)
    res = penetrations(taxel, np.zeros((1, 3)))
    assert res.indices.tolist() == [0]
    assert res.penetrations[0] == pytest.approx(0.03, abs=0)
    assert res.penetration_sum == pytest.approx(0.03, abs=0)


def test_point_exactly_on_boundary_included_with_zero():
    taxel = TaxelSpec(origin=np.zeros(3), sensing_range=0.03)
    res = penetrations(taxel, np.array([[0.03, 0.0, 0.0]]))
    assert res.indices.tolist() == [0]
    assert res.penetrations[0] == 0.0
    assert res.penetration_sum == 0.0


def test_cube_corner_points_sum():
    a = 0.01 / math.sqrt(3.0)
    corners = np.array([[sx * a, sy * a, sz * a]
                        for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)])
    # oracle check: all eight corners sit at distance 0.01
    _, pens, total = naive_penetrations(np.zeros(3), 0.03, corners)
    assert total == pytest.approx(8 * 0.02, abs=1e-15)
    taxel = TaxelSpec(origin=np.zeros(3), sensing_range=0.03)
    res = penetrations(taxel, corners)
    assert len(res.indices) == 8
    assert res.penetration_sum == pytest.approx(0.16, abs=1e-15)
    np.testing.assert_allclose(res.penetrations, pens, atol=0)


def test_empty_point_list_is_valid_zero():
    taxel = TaxelSpec(origin=np.zeros(3))
    res = penetrations(taxel, np.empty((0, 3)))
    assert res.indices.size == 0
    assert res.penetration_sum == 0.0


def test_inclusion_is_exactly_distance_rule():
    rng = np.random.default_rng(3)
    taxel = TaxelSpec(origin=rng.normal(size=3) * 0.01, sensing_range=0.04)
    for _ in range(50):
        pts = rng.normal(size=(rng.integers(1, 200), 3)) * 0.04
        res = penetrations(taxel, pts)
        idx, pens, total = naive_penetrations(taxel.origin, taxel.sensing_range, pts)
        np.testing.assert_array_equal(res.indices, idx)
        np.testing.assert_array_equal(res.penetrations, pens)
        assert res.penetration_sum == total  # identical ordered accumulation
        assert np.all(res.penetrations >= 0.0)
        assert np.all(res.penetrations <= taxel.sensing_range)


def test_rigid_invariance_of_penetrations():
    rng = np.random.default_rng(4)
    pts = rng.normal(size=(128, 3)) * 0.03
    origin = rng.normal(size=3) * 0.02
    base = naive_penetrations(origin, 0.035, pts)
    for _ in range(10):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        shift = rng.normal(size=3)
        Rm = geometry.rotation_matrix(q)
        taxel = TaxelSpec(origin=Rm @ origin + shift, sensing_range=0.035)
        res = penetrations(taxel, (Rm @ pts.T).T + shift)
        np.testing.assert_array_equal(res.indices, base[0])
        np.testing.assert_allclose(res.penetrations, base[1], atol=1e-9)
        assert res.penetration_sum == pytest.approx(base[2], abs=1e-9)


def test_larger_range_never_decreases_sum():
    rng = np.random.default_rng(5)
    pts = rng.normal(size=(300, 3)) * 0.05
    origin = np.zeros(3)
    sums = []
    for R in [0.01, 0.02, 0.03, 0.05, 0.08, 0.2]:
        res = penetrations(TaxelSpec(origin=origin, collision_radius=0.005, sensing_range=R), pts)
        sums.append(res.penetration_sum)
    assert all(b >= a for a, b in zip(sums, sums[1:]))


# ---------------------------------------------------------------------------
# penetrations_batched
# ---------------------------------------------------------------------------

def test_batched_empty_cloud_gives_empty_results():
    grid = TaxelGrid.default_palm()
    results = penetrations_batched(grid, np.empty((0, 3)))
    assert len(results) == 16
    assert all(r.penetration_sum == 0.0 and r.indices.size == 0 for r in results)


def test_batched_equals_per_taxel_calls():
    rng = np.random.default_rng(6)
    grid = TaxelGrid.default_palm()
    for _ in range(30):
        pts = rng.uniform([-0.08, -0.04, -0.02], [0.08, 0.04, 0.05],
                          size=(int(rng.integers(1, 600)), 3))
        batched = penetrations_batched(grid, pts)
        for taxel, res in zip(grid.taxels, batched):
            single = penetrations(taxel, pts)
            np.testing.assert_array_equal(res.indices, single.indices)
            np.testing.assert_array_equal(res.penetrations, single.penetrations)
            assert res.penetration_sum == single.penetration_sum


def test_culling_never_changes_results():
    rng = np.random.default_rng(7)
    grid = TaxelGrid.default_palm()
    # cloud far from the palm: the bounding-sphere cull skips every taxel
    far = rng.normal(size=(200, 3)) * 0.01 + np.array([1.0, 1.0, 1.0])
    near = rng.normal(size=(200, 3)) * 0.05
    for pts in (far, near, np.vstack([far, near])):
        culled = penetrations_batched(grid, pts, use_culling=True)
        plain = penetrations_batched(grid, pts, use_culling=False)
        for a, b in zip(culled, plain):
            np.testing.assert_array_equal(a.indices, b.indices)
            np.testing.assert_array_equal(a.penetrations, b.penetrations)
            assert a.penetration_sum == b.penetration_sum


def test_point_shared_by_adjacent_taxels():
    t0 = TaxelSpec(origin=np.array([-0.005, 0.0, 0.0]), sensing_range=0.03)
    t1 = TaxelSpec(origin=np.array([0.005, 0.0, 0.0]), sensing_range=0.03)
    grid = TaxelGrid(taxels=(t0, t1), palm_extent=(0.037, 0.096))
    res = penetrations_batched(grid, np.array([[0.0, 0.0, 0.01]]))
    assert res[0].indices.tolist() == [0]
    assert res[1].indices.tolist() == [0]


# ---------------------------------------------------------------------------
# domain types and files
# ---------------------------------------------------------------------------

def test_taxel_spec_validation():
    with pytest.raises(ConfigError):
        TaxelSpec(origin=np.zeros(3), sensing_range=0.0)
    with pytest.raises(ConfigError):
        TaxelSpec(origin=np.zeros(3), collision_radius=0.05, sensing_range=0.03)


def test_grid_rejects_taxels_outside_palm():
    bad = TaxelSpec(origin=np.array([0.1, 0.0, 0.0]))
    with pytest.raises(ConfigError):
        TaxelGrid(taxels=(bad,))


def test_default_palm_layout():
    grid = TaxelGrid.default_palm()
    assert len(grid) == 16
    o = grid.origins()
    w, l = grid.palm_extent
    assert np.all(np.abs(o[:, 0]) <= l / 2)
    assert np.all(np.abs(o[:, 1]) <= w / 2)
    assert len(np.unique(o[:, 0])) == 8
    assert len(np.unique(o[:, 1])) == 2


def test_object_model_density_is_definitional():
    rng = np.random.default_rng(8)
    pts = rng.normal(size=(50, 3))
    model = ObjectModel(surface_points=pts, volume=7.3666e-4)
    assert model.density == 50 / 7.3666e-4
    assert model.density * model.volume == pytest.approx(50, rel=1e-12)


def test_object_model_validation():
    with pytest.raises(InvalidModelError):
        ObjectModel(surface_points=np.empty((0, 3)), volume=1.0)
    with pytest.raises(InvalidModelError):
        ObjectModel(surface_points=np.zeros((4, 3)), volume=0.0)


def test_object_file_roundtrip(tmp_path):
    rng = np.random.default_rng(9)
    model = ObjectModel(surface_points=rng.normal(size=(40, 3)), volume=2.5e-4,
                        mass=0.108, com=np.array([0.01, -0.02, 0.003]))
    path = tmp_path / "object.txt"
    geometry.save_object(model, path)
    back = geometry.load_object(path)
    np.testing.assert_array_equal(back.surface_points, model.surface_points)
    assert back.volume == model.volume
    assert back.mass == model.mass
    np.testing.assert_array_equal(back.com, model.com)


def test_grid_file_roundtrip(tmp_path):
    grid = TaxelGrid.default_palm(palm_position=(0.01, 0.0, 0.002))
    path = tmp_path / "grid.json"
    geometry.save_grid(grid, path)
    back = geometry.load_grid(path)
    assert len(back) == len(grid)
    np.testing.assert_array_equal(back.world_origins(), grid.world_origins())
    np.testing.assert_array_equal(back.sensing_ranges(), grid.sensing_ranges())
