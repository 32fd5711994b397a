import numpy as np
import pytest

from taxelsim import batch, scene
from taxelsim.errors import ConfigError, InvalidStateError
from taxelsim.geometry import ObjectState, TaxelGrid, quat_from_axis_angle
from taxelsim.scene import make_cylinder, step
from taxelsim.sensor import Modality, ThresholdConfig, grid_signals

CFG = ThresholdConfig(shear=1e-10, normal=1e-9)


def random_batch(rng, n):
    positions = rng.uniform([-0.05, -0.02, 0.02], [0.05, 0.02, 0.06], size=(n, 3))
    quats = rng.normal(size=(n, 4))
    quats /= np.linalg.norm(quats, axis=1, keepdims=True)
    lin = rng.normal(size=(n, 3)) * 0.02
    ang = rng.normal(size=(n, 3)) * 0.1
    return positions, quats, lin, ang


@pytest.fixture(scope="module")
def setup():
    grid = TaxelGrid.default_palm()
    model = make_cylinder(0.0325, 0.222, point_count=256, seed=0, mass=0.108)
    return grid, model


def test_batch_matches_per_scene_loop_bitwise(setup):
    grid, model = setup
    rng = np.random.default_rng(1)
    positions, quats, lin, ang = random_batch(rng, 64)
    for modality in (Modality.SIGNED_3AXIS, Modality.UNSIGNED_3AXIS, Modality.NORMAL_ONLY):
        raw_b, tern_b = batch.batch_signals(grid, model, positions, quats, lin, ang,
                                            CFG, modality)
        for s in range(64):
            state = ObjectState(position=positions[s], orientation=quats[s],
                                linear_velocity=lin[s], angular_velocity=ang[s])
            raw_1, tern_1 = grid_signals(grid, model, state, CFG, modality)
            np.testing.assert_array_equal(raw_b[s], raw_1)
            np.testing.assert_array_equal(tern_b[s], tern_1)


def test_batch_collision_baseline_matches_loop(setup):
    grid, model = setup
    rng = np.random.default_rng(2)
    positions, quats, lin, ang = random_batch(rng, 32)
    raw_b, tern_b = batch.batch_signals(grid, model, positions, quats, lin, ang,
                                        CFG, collision_baseline=True)
    for s in range(32):
        state = ObjectState(position=positions[s], orientation=quats[s],
                            linear_velocity=lin[s], angular_velocity=ang[s])
        raw_1, tern_1 = grid_signals(grid, model, state, CFG, collision_baseline=True)
        np.testing.assert_array_equal(raw_b[s], raw_1)
        np.testing.assert_array_equal(tern_b[s], tern_1)


def test_empty_batch(setup):
    grid, model = setup
    raw, tern = batch.batch_signals(grid, model, np.empty((0, 3)), np.empty((0, 4)),
                                    np.empty((0, 3)), np.empty((0, 3)), CFG)
    assert raw.shape == (0, 16, 3) and tern.shape == (0, 16, 3)


def test_batch_shape_mismatch_reports(setup):
    grid, model = setup
    rng = np.random.default_rng(3)
    positions, quats, lin, ang = random_batch(rng, 8)
    with pytest.raises(ConfigError, match="lin_vels"):
        batch.batch_signals(grid, model, positions, quats, lin[:5], ang, CFG)
    with pytest.raises(ConfigError, match="orientations"):
        batch.batch_signals(grid, model, positions, quats[:, :3], lin, ang, CFG)


def test_batch_flags_non_unit_quaternion_with_index(setup):
    grid, model = setup
    rng = np.random.default_rng(4)
    positions, quats, lin, ang = random_batch(rng, 8)
    quats[5] = (0.0, 0.0, 0.0, 1.5)
    with pytest.raises(InvalidStateError, match="index 5"):
        batch.batch_signals(grid, model, positions, quats, lin, ang, CFG)


def test_step_states_matches_scalar_step():
    rng = np.random.default_rng(5)
    positions, quats, lin, ang = random_batch(rng, 16)
    new_p, new_q = batch.step_states(positions, quats, lin, ang, dt=0.005)
    for s in range(16):
        state = ObjectState(position=positions[s], orientation=quats[s],
                            linear_velocity=lin[s], angular_velocity=ang[s])
        out = step(state, 0.005)
        np.testing.assert_allclose(new_p[s], out.position, atol=0)
        np.testing.assert_allclose(new_q[s], out.orientation, atol=1e-15)


def test_benchmark_smoke():
    stats = batch.benchmark(n_envs=8, n_steps=3, n_points=64)
    assert stats["ticks_per_sec"] > 0
    assert stats["taxel_evals_per_sec"] == pytest.approx(
        stats["ticks_per_sec"] * stats["taxels"])
