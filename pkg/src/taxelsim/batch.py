"""Vectorized multi-scene signal evaluation.

One fused kernel transforms each scene's point cloud and accumulates
per-taxel penetration sums in a single pass. It performs the identical
sequence of IEEE operations as the single-scene numpy path (explicit
component transforms, sequential in-index-order penetration sums, no FMA
contraction), so its outputs are bit-identical to looping
:func:`taxelsim.sensor.grid_signals` over the scenes. The per-scene loop is
the correctness oracle; this module is the throughput path.
"""

import time

import numpy as np
from numba import njit

from . import geometry, sensor
from .errors import ConfigError, InvalidModelError, InvalidStateError
from .sensor import Modality


@njit(cache=True)
def _penetration_kernel(points, rot, pos, origins, ranges, psums):
    n_scenes = rot.shape[0]
    n_points = points.shape[0]
    n_taxels = origins.shape[0]
    for s in range(n_scenes):
        r00 = rot[s, 0, 0]; r01 = rot[s, 0, 1]; r02 = rot[s, 0, 2]
        r10 = rot[s, 1, 0]; r11 = rot[s, 1, 1]; r12 = rot[s, 1, 2]
        r20 = rot[s, 2, 0]; r21 = rot[s, 2, 1]; r22 = rot[s, 2, 2]
        tx = pos[s, 0]; ty = pos[s, 1]; tz = pos[s, 2]
        for t in range(n_taxels):
            ox = origins[t, 0]; oy = origins[t, 1]; oz = origins[t, 2]
            R = ranges[t]
            acc = 0.0
            for n in range(n_points):
                px = points[n, 0]; py = points[n, 1]; pz = points[n, 2]
                wx = r00 * px + r01 * py + r02 * pz + tx
                wy = r10 * px + r11 * py + r12 * pz + ty
                wz = r20 * px + r21 * py + r22 * pz + tz
                dx = wx - ox; dy = wy - oy; dz = wz - oz
                d = np.sqrt(dx * dx + dy * dy + dz * dz)
                if d <= R:
                    acc = acc + (R - d)
            psums[s, t] = acc


def batch_penetration_sums(grid, model, positions, orientations, ranges=None):
    """ΣP per (scene, taxel): (S, T) array; membership radius per taxel from
    ``ranges`` (default: sensing ranges)."""
    positions = np.ascontiguousarray(positions, dtype=float)
    orientations = np.ascontiguousarray(orientations, dtype=float)
    rot = geometry.rotation_matrix(orientations)
    origins = np.ascontiguousarray(grid.world_origins())
    if ranges is None:
        ranges = grid.sensing_ranges()
    psums = np.empty((positions.shape[0], origins.shape[0]))
    _penetration_kernel(np.ascontiguousarray(model.surface_points), rot,
                        positions, origins, np.ascontiguousarray(ranges), psums)
    return psums


def _validate_batch(positions, orientations, lin_vels, ang_vels):
    S = positions.shape[0]
    for name, arr, width in (("positions", positions, 3), ("orientations", orientations, 4),
                             ("lin_vels", lin_vels, 3), ("ang_vels", ang_vels, 3)):
        if arr.ndim != 2 or arr.shape != (S, width):
            raise ConfigError(
                f"batch shape mismatch: {name} has shape {arr.shape}, expected ({S}, {width})"
            )
    norms = np.linalg.norm(orientations, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > geometry.QUAT_TOL)
    if bad.size:
        raise InvalidStateError(
            f"non-unit quaternion at batch index {int(bad[0])} (|q| = {norms[bad[0]]!r})"
        )


def batch_signals(grid, model, positions, orientations, lin_vels, ang_vels,
                  cfg, modality=Modality.SIGNED_3AXIS, collision_baseline=False):
    """Raw and ternary signals for S scenes sharing one grid and object model.

    Arrays: positions/lin_vels/ang_vels (S, 3), orientations (S, 4) scalar-last
    unit quaternions. Returns ``(raw (S, T, 3), ternary (S, T, 3))``,
    elementwise identical to evaluating the scenes one at a time.
    """
    positions = np.asarray(positions, dtype=float)
    orientations = np.asarray(orientations, dtype=float)
    lin_vels = np.asarray(lin_vels, dtype=float)
    ang_vels = np.asarray(ang_vels, dtype=float)
    if positions.shape[0] == 0:
        T = len(grid)
        return np.empty((0, T, 3)), np.empty((0, T, 3), dtype=np.int8)
    _validate_batch(positions, orientations, lin_vels, ang_vels)
    if not model.density > 0.0:
        raise InvalidModelError("point density must be > 0")

    if collision_baseline:
        psums = batch_penetration_sums(grid, model, positions, orientations,
                                       ranges=grid.collision_radii())
        k = psums / model.density
        raw = np.stack([k, k, k], axis=2)
    else:
        psums = batch_penetration_sums(grid, model, positions, orientations)
        k = psums / model.density
        raw = np.empty(psums.shape + (3,))
        raw[..., 0] = k * (lin_vels[:, 0] + ang_vels[:, 0])[:, None]
        raw[..., 1] = k * (lin_vels[:, 1] + ang_vels[:, 1])[:, None]
        raw[..., 2] = k
    return raw, sensor.threshold(raw, cfg, modality)


def step_states(positions, orientations, lin_vels, ang_vels, dt):
    """Vectorized kinematic step for S states (same semantics as scene.step)."""
    if not dt > 0.0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    new_pos = positions + lin_vels * dt
    w = ang_vels
    q = orientations
    dq = np.empty_like(q)
    dq[:, 0] = w[:, 0] * q[:, 3] + w[:, 1] * q[:, 2] - w[:, 2] * q[:, 1]
    dq[:, 1] = -w[:, 0] * q[:, 2] + w[:, 1] * q[:, 3] + w[:, 2] * q[:, 0]
    dq[:, 2] = w[:, 0] * q[:, 1] - w[:, 1] * q[:, 0] + w[:, 2] * q[:, 3]
    dq[:, 3] = -w[:, 0] * q[:, 0] - w[:, 1] * q[:, 1] - w[:, 2] * q[:, 2]
    new_q = q + 0.5 * dt * dq
    new_q /= np.linalg.norm(new_q, axis=1, keepdims=True)
    return new_pos, new_q


def benchmark(n_envs=1024, n_steps=20, n_points=512, n_taxels=16, seed=0,
              dt=0.005, cfg=None):
    """Throughput measurement: step S envs for M control ticks, evaluating
    the full signal pipeline each tick. Returns a dict with ticks/sec and
    taxel-signal evaluations/sec (wall clock, excludes JIT warm-up)."""
    rng = np.random.default_rng(seed)
    rows = max(1, n_taxels // 2)
    grid = geometry.TaxelGrid.default_palm(rows=rows, cols=max(1, n_taxels // rows))
    from .scene import make_cylinder
    model = make_cylinder(0.0325, 0.222, point_count=n_points, seed=seed, mass=0.108)
    cfg = cfg or sensor.ThresholdConfig(shear=1e-10, normal=1e-9)

    positions = rng.uniform([-0.04, -0.01, 0.03], [0.04, 0.01, 0.05], size=(n_envs, 3))
    orientations = np.tile(geometry.quat_from_axis_angle([1, 0, 0], -np.pi / 2), (n_envs, 1))
    lin = rng.uniform(-0.02, 0.02, size=(n_envs, 3))
    ang = rng.uniform(-0.1, 0.1, size=(n_envs, 3))

    # warm-up compiles the kernel outside the timed section
    batch_signals(grid, model, positions, orientations, lin, ang, cfg)

    t0 = time.perf_counter()
    p, q = positions.copy(), orientations.copy()
    for _ in range(n_steps):
        batch_signals(grid, model, p, q, lin, ang, cfg)
        p, q = step_states(p, q, lin, ang, dt)
    elapsed = time.perf_counter() - t0
    ticks = n_envs * n_steps
    return {
        "envs": n_envs, "steps": n_steps, "points": n_points, "taxels": len(grid),
        "elapsed_s": elapsed,
        "ticks_per_sec": ticks / elapsed,
        "taxel_evals_per_sec": ticks * len(grid) / elapsed,
    }
