"""Continuous 3-axis taxel signals and their ternary/binary thresholding.

Signal model per taxel, with ΣP the penetration sum, D the object point
density and (v, ω) the object twist::

    S_x = (ΣP / D) * (v_x + ω_x)
    S_y = (ΣP / D) * (v_y + ω_y)
    S_z =  ΣP / D

The x/y axes are tangential to the sensor surface, z is out of plane, and
all quantities are expressed in the global frame. v and ω components are
added literally (no length scale is applied to ω). Thresholding maps the
continuous signals to s_x, s_y ∈ {-1, 0, 1} and s_z ∈ {0, 1}.

Signals are carried as float arrays with the last axis = (x, y, z); ternary
outputs are int8 arrays of the same shape.
"""

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import geometry
from .errors import ConfigError, InvalidModelError


class Modality(Enum):
    """Sensing-channel ablations. NORMAL_ONLY zeroes shear, SIGNED_SHEAR_ONLY
    zeroes normal, PROPRIO_ONLY zeroes everything; UNSIGNED_3AXIS drops shear
    signs. The mask is applied after sign/abs mapping."""

    SIGNED_3AXIS = "signed3"
    UNSIGNED_3AXIS = "unsigned3"
    SIGNED_SHEAR_ONLY = "shear_only"
    NORMAL_ONLY = "normal_only"
    PROPRIO_ONLY = "proprio_only"

    @property
    def channel_mask(self):
        """(mask_x, mask_y, mask_z) as 0/1 ints."""
        return _MASKS[self]


_MASKS = {
    Modality.SIGNED_3AXIS: (1, 1, 1),
    Modality.UNSIGNED_3AXIS: (1, 1, 1),
    Modality.SIGNED_SHEAR_ONLY: (1, 1, 0),
    Modality.NORMAL_ONLY: (0, 0, 1),
    Modality.PROPRIO_ONLY: (0, 0, 0),
}


@dataclass(frozen=True)
class ThresholdConfig:
    """Activation thresholds in raw signal units: one for both shear axes,
    one for the normal axis. The model gives no physical values; calibrate
    per object fixture (see :func:`calibrate_thresholds`)."""

    shear: float
    normal: float

    def __post_init__(self):
        if not (self.shear > 0.0 and self.normal > 0.0):
            raise ConfigError(
                f"thresholds must be > 0, got shear={self.shear} normal={self.normal}"
            )


def raw_signal(penetration_sum, density, linear_velocity, angular_velocity):
    """Continuous (S_x, S_y, S_z) for one taxel; literal formula evaluation.

    ``penetration_sum`` may be a scalar or a (T,) array (then the result is
    (T, 3)).
    """
    if not density > 0.0:
        raise InvalidModelError(f"point density must be > 0, got {density}")
    psum = np.asarray(penetration_sum, dtype=float)
    if np.any(psum < 0.0):
        raise InvalidModelError("penetration sums must be >= 0")
    v = geometry.as_vec3(linear_velocity)
    w = geometry.as_vec3(angular_velocity)
    k = psum / density
    out = np.empty(psum.shape + (3,))
    out[..., 0] = k * (v[0] + w[0])
    out[..., 1] = k * (v[1] + w[1])
    out[..., 2] = k
    return out


def threshold(raw, cfg, modality=Modality.SIGNED_3AXIS):
    """Ternary signals from raw signals; vectorized over leading axes.

    s_x = sign(S_x) if |S_x| > shear threshold else 0 (same for y);
    s_z = 1 if S_z > normal threshold else 0. UNSIGNED_3AXIS takes |s_x|,
    |s_y|; the modality channel mask is applied last.
    """
    r = np.asarray(raw, dtype=float)
    if r.shape[-1] != 3:
        raise ConfigError(f"raw signal last axis must be 3, got shape {r.shape}")
    out = np.zeros(r.shape, dtype=np.int8)
    sx, sy, sz = r[..., 0], r[..., 1], r[..., 2]
    out[..., 0] = np.where(np.abs(sx) > cfg.shear, np.sign(sx), 0).astype(np.int8)
    out[..., 1] = np.where(np.abs(sy) > cfg.shear, np.sign(sy), 0).astype(np.int8)
    out[..., 2] = (sz > cfg.normal).astype(np.int8)
    if modality is Modality.UNSIGNED_3AXIS:
        out[..., 0] = np.abs(out[..., 0])
        out[..., 1] = np.abs(out[..., 1])
    mask = modality.channel_mask
    out[..., 0] *= mask[0]
    out[..., 1] *= mask[1]
    out[..., 2] *= mask[2]
    return out


def grid_signals(grid, model, state, cfg, modality=Modality.SIGNED_3AXIS,
                 frame="world", collision_baseline=False):
    """Raw and ternary signals for every taxel of a grid in one scene.

    Composes transform_points -> penetrations_batched -> raw_signal ->
    threshold. Returns ``(raw, ternary)`` with shapes (T, 3) / (T, 3).

    ``collision_baseline=True`` switches to the collision-geometry-only
    comparison mode: membership uses each taxel's collision_radius instead of
    its sensing range and the raw signal carries no velocity weighting
    (S_x = S_y = S_z = ΣP / D), mimicking simulators that report contact from
    collision penetration alone.

    ``frame="palm"`` re-expresses the signal vectors in the palm frame (only
    differs from "world" when the palm pose is rotated).
    """
    world_pts = geometry.transform_points(model, state)
    if collision_baseline:
        psums = geometry.penetration_sums(grid, world_pts, ranges=grid.collision_radii())
        k = psums / model.density
        raw = np.stack([k, k, k], axis=1)
    else:
        psums = geometry.penetration_sums(grid, world_pts)
        raw = raw_signal(psums, model.density, state.linear_velocity, state.angular_velocity)
    if frame == "palm":
        R = geometry.rotation_matrix(grid.palm_quat)
        raw = raw @ R  # row-vector form of R.T @ s
    elif frame != "world":
        raise ConfigError(f"frame must be 'world' or 'palm', got {frame!r}")
    return raw, threshold(raw, cfg, modality)


def calibrate_thresholds(raw_signals, shear_fraction=0.1, normal_fraction=0.1):
    """Thresholds as a fraction of the peak |signal| seen in a reference run.

    ``raw_signals``: any array with last axis (x, y, z), e.g. a stacked
    (ticks, taxels, 3) trace. Raises if the reference run never produced a
    nonzero channel (nothing to calibrate against).
    """
    r = np.asarray(raw_signals, dtype=float)
    peak_shear = float(np.abs(r[..., :2]).max()) if r.size else 0.0
    peak_normal = float(np.abs(r[..., 2]).max()) if r.size else 0.0
    if peak_shear <= 0.0 or peak_normal <= 0.0:
        raise ConfigError(
            "cannot calibrate thresholds: reference run has an all-zero channel "
            f"(peak shear {peak_shear}, peak normal {peak_normal})"
        )
    return ThresholdConfig(shear=shear_fraction * peak_shear,
                           normal=normal_fraction * peak_normal)


# ---------------------------------------------------------------------------
# signal trace CSV (t, taxel_id, Sx_raw, Sy_raw, Sz_raw, sx, sy, sz)
# ---------------------------------------------------------------------------

TRACE_CSV_FIELDS = ["t", "taxel_id", "Sx_raw", "Sy_raw", "Sz_raw", "sx", "sy", "sz"]


def write_trace_csv(path, times, raw, ternary, taxel_ids=None):
    """Emit per-tick, per-taxel signal rows. ``raw``/``ternary``: (K, T, 3)."""
    raw = np.asarray(raw, dtype=float)
    ternary = np.asarray(ternary)
    K, T, _ = raw.shape
    if taxel_ids is None:
        taxel_ids = np.arange(T)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(TRACE_CSV_FIELDS)
        for k in range(K):
            for t in range(T):
                writer.writerow([
                    repr(float(times[k])), int(taxel_ids[t]),
                    repr(float(raw[k, t, 0])), repr(float(raw[k, t, 1])), repr(float(raw[k, t, 2])),
                    int(ternary[k, t, 0]), int(ternary[k, t, 1]), int(ternary[k, t, 2]),
                ])


def read_trace_csv(path):
    """Read a signal trace CSV back into (times (K,), taxel_ids (T,),
    raw (K, T, 3), ternary (K, T, 3)). Rows must be grouped by tick."""
    rows = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != TRACE_CSV_FIELDS:
            raise ConfigError(f"unexpected trace CSV header in {path}: {reader.fieldnames}")
        for row in reader:
            rows.append((float(row["t"]), int(row["taxel_id"]),
                         float(row["Sx_raw"]), float(row["Sy_raw"]), float(row["Sz_raw"]),
                         int(row["sx"]), int(row["sy"]), int(row["sz"])))
    if not rows:
        raise ConfigError(f"trace CSV {path} is empty")
    taxel_ids = sorted({r[1] for r in rows})
    id_index = {tid: i for i, tid in enumerate(taxel_ids)}
    T = len(taxel_ids)
    times = sorted({r[0] for r in rows})
    t_index = {t: i for i, t in enumerate(times)}
    K = len(times)
    raw = np.zeros((K, T, 3))
    ternary = np.zeros((K, T, 3), dtype=np.int8)
    for t, tid, rx, ry, rz, sx, sy, sz in rows:
        k, i = t_index[t], id_index[tid]
        raw[k, i] = (rx, ry, rz)
        ternary[k, i] = (sx, sy, sz)
    return np.array(times), np.array(taxel_ids), raw, ternary
