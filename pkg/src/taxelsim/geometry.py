"""Point-cloud objects, rigid transforms, and per-taxel penetration queries.

Conventions used throughout the package:

* vectors are float64 numpy arrays of shape (3,), SI units (m, m/s, rad/s)
* quaternions are scalar-last ``(x, y, z, w)`` unit quaternions
* the palm plane is z = 0; palm x spans the long side (``length``),
  palm y the short side (``width``)

A taxel senses every object point within ``sensing_range`` of its origin;
point i at distance l_i contributes penetration ``P_i = sensing_range - l_i``
(boundary inclusive, contributing zero). Penetration sums are accumulated
left-to-right in point-index order so that the naive loop, the vectorized
query, and the batched kernel in :mod:`taxelsim.batch` agree bit-for-bit.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InvalidModelError, InvalidStateError

QUAT_TOL = 1e-9


def vec3(x=0.0, y=0.0, z=0.0):
    """Build a finite (3,) float64 vector."""
    v = np.array([x, y, z], dtype=float)
    if not np.all(np.isfinite(v)):
        raise InvalidStateError(f"non-finite vector components: {v}")
    return v


def as_vec3(v):
    """Coerce to a finite (3,) float64 array."""
    a = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise InvalidStateError(f"non-finite vector components: {a}")
    return a


# ---------------------------------------------------------------------------
# quaternion helpers (scalar-last x, y, z, w)
# ---------------------------------------------------------------------------

def quat_identity():
    return np.array([0.0, 0.0, 0.0, 1.0])


def quat_normalize(q):
    q = np.asarray(q, dtype=float).reshape(4)
    n = np.sqrt(float(np.dot(q, q)))
    if n == 0.0 or not np.isfinite(n):
        raise InvalidStateError("cannot normalize zero/non-finite quaternion")
    return q / n


def quat_from_axis_angle(axis, angle):
    axis = as_vec3(axis)
    n = np.linalg.norm(axis)
    if n == 0.0:
        raise InvalidStateError("rotation axis must be nonzero")
    half = 0.5 * float(angle)
    return np.concatenate([np.sin(half) * axis / n, [np.cos(half)]])


def quat_multiply(a, b):
    """Hamilton product a ⊗ b for scalar-last quaternions."""
    ax, ay, az, aw = a
    bx, by, bz, bw = b
    return np.array([
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
        aw * bw - ax * bx - ay * by - az * bz,
    ])


def rotation_matrix(quat):
    """Rotation matrix (or matrices) for unit quaternion(s), shape (..., 3, 3).

    The same component formula is used by the single-scene path and the
    batched kernel, which keeps their outputs bit-identical.
    """
    q = np.asarray(quat, dtype=float)
    x, y, z, w = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    R = np.empty(q.shape[:-1] + (3, 3))
    R[..., 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    R[..., 0, 1] = 2.0 * (x * y - z * w)
    R[..., 0, 2] = 2.0 * (x * z + y * w)
    R[..., 1, 0] = 2.0 * (x * y + z * w)
    R[..., 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    R[..., 1, 2] = 2.0 * (y * z - x * w)
    R[..., 2, 0] = 2.0 * (x * z - y * w)
    R[..., 2, 1] = 2.0 * (y * z + x * w)
    R[..., 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return R


def _check_unit_quat(q, where="quaternion"):
    n = float(np.linalg.norm(q))
    if abs(n - 1.0) > QUAT_TOL:
        raise InvalidStateError(f"{where} is not unit length (|q| = {n!r})")


def rotate_points(points, quat, translation=None):
    """Apply ``R(quat) @ p + t`` to an (N, 3) array of points.

    Written as explicit component arithmetic (not matmul) so every code path
    that transforms points performs the identical sequence of IEEE ops.
    """
    R = rotation_matrix(quat)
    px, py, pz = points[:, 0], points[:, 1], points[:, 2]
    wx = R[0, 0] * px + R[0, 1] * py + R[0, 2] * pz
    wy = R[1, 0] * px + R[1, 1] * py + R[1, 2] * pz
    wz = R[2, 0] * px + R[2, 1] * py + R[2, 2] * pz
    if translation is not None:
        wx = wx + translation[0]
        wy = wy + translation[1]
        wz = wz + translation[2]
    return np.stack([wx, wy, wz], axis=1)


def ordered_sum(values):
    """Left-to-right sum of a 1-D array; 0.0 when empty.

    This is the package's canonical reduction for penetration sums: it matches
    a streamed ``acc += v`` accumulation bit-for-bit, which numpy's default
    pairwise reduction does not.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return 0.0
    return float(v.cumsum()[-1])


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TaxelSpec:
    """One sensing element: origin (palm frame, m), collision radius and
    sensing range in meters. The sensing volume is the sphere of radius
    ``sensing_range`` about the origin; ``collision_radius`` is kept for the
    collision-geometry baseline mode."""

    origin: np.ndarray
    collision_radius: float = 0.015
    sensing_range: float = 0.03

    def __post_init__(self):
        object.__setattr__(self, "origin", as_vec3(self.origin))
        if not self.sensing_range > 0.0:
            raise ConfigError(f"sensing_range must be > 0, got {self.sensing_range}")
        if self.sensing_range < self.collision_radius:
            raise ConfigError(
                f"sensing_range {self.sensing_range} must extend beyond "
                f"collision_radius {self.collision_radius}"
            )


@dataclass(frozen=True)
class TaxelGrid:
    """Ordered taxel layout plus the palm's pose in the world.

    ``palm_extent`` is (width, length) in meters: width along palm y,
    length along palm x. All taxel origins must lie inside that rectangle.
    """

    taxels: tuple
    palm_extent: tuple = (0.037, 0.096)
    palm_position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    palm_quat: np.ndarray = field(default_factory=quat_identity)

    def __post_init__(self):
        object.__setattr__(self, "taxels", tuple(self.taxels))
        object.__setattr__(self, "palm_position", as_vec3(self.palm_position))
        q = quat_normalize(self.palm_quat)
        _check_unit_quat(q, "palm_quat")
        object.__setattr__(self, "palm_quat", q)
        w, l = self.palm_extent
        if w <= 0 or l <= 0:
            raise ConfigError(f"palm_extent must be positive, got {self.palm_extent}")
        for i, t in enumerate(self.taxels):
            x, y, _ = t.origin
            if abs(x) > l / 2 + 1e-12 or abs(y) > w / 2 + 1e-12:
                raise ConfigError(
                    f"taxel {i} origin {t.origin} lies outside palm extent {self.palm_extent}"
                )

    def __len__(self):
        return len(self.taxels)

    def origins(self):
        """Taxel origins in the palm frame, shape (T, 3)."""
        return np.array([t.origin for t in self.taxels])

    def world_origins(self):
        """Taxel origins expressed in the world frame, shape (T, 3)."""
        return rotate_points(self.origins(), self.palm_quat, self.palm_position)

    def sensing_ranges(self):
        return np.array([t.sensing_range for t in self.taxels])

    def collision_radii(self):
        return np.array([t.collision_radius for t in self.taxels])

    @classmethod
    def default_palm(cls, rows=8, cols=2, palm_extent=(0.037, 0.096),
                     collision_radius=0.015, sensing_range=0.03,
                     palm_position=(0.0, 0.0, 0.0), palm_quat=None):
        """Canonical 16-taxel layout: ``rows`` positions along palm x,
        ``cols`` across palm y, centered margins. The magnetometer layout is
        an assumption (configurable), not a measured datum."""
        w, l = palm_extent
        xs = (np.arange(rows) + 0.5) / rows * l - l / 2
        ys = (np.arange(cols) + 0.5) / cols * w - w / 2
        taxels = [
            TaxelSpec(origin=np.array([x, y, 0.0]),
                      collision_radius=collision_radius,
                      sensing_range=sensing_range)
            for x in xs for y in ys
        ]
        return cls(taxels=tuple(taxels), palm_extent=palm_extent,
                   palm_position=np.asarray(palm_position, dtype=float),
                   palm_quat=quat_identity() if palm_quat is None else palm_quat)


@dataclass
class ObjectModel:
    """Surface point cloud with exact closed-form volume.

    ``density`` is the point density D = count / volume (points per m³); it
    normalizes signals across object scales. ``sample_seed`` records the RNG
    seed used by the surface sampler. ``bounding_center``/``bounding_radius``
    (object frame) support conservative culling and never affect results.
    """

    surface_points: np.ndarray
    volume: float
    mass: float = 0.0
    com: np.ndarray = field(default_factory=lambda: np.zeros(3))
    sample_seed: int | None = None
    bounding_center: np.ndarray = field(default=None)
    bounding_radius: float = field(default=None)

    def __post_init__(self):
        pts = np.asarray(self.surface_points, dtype=float).reshape(-1, 3)
        if pts.shape[0] < 1:
            raise InvalidModelError("object model needs at least one surface point")
        if not np.all(np.isfinite(pts)):
            raise InvalidModelError("surface points must be finite")
        if not self.volume > 0.0 or not np.isfinite(self.volume):
            raise InvalidModelError(f"volume must be positive, got {self.volume}")
        self.surface_points = pts
        self.com = as_vec3(self.com)
        if self.bounding_center is None:
            self.bounding_center = pts.mean(axis=0)
        if self.bounding_radius is None:
            self.bounding_radius = float(np.linalg.norm(pts - self.bounding_center, axis=1).max())

    @property
    def point_count(self):
        return self.surface_points.shape[0]

    @property
    def density(self):
        """Point density D = point count / volume (points / m³)."""
        return self.point_count / self.volume

    def scaled(self, factor):
        """Geometrically similar model: lengths × factor, volume and mass × factor³."""
        if not factor > 0:
            raise InvalidModelError(f"scale factor must be positive, got {factor}")
        return ObjectModel(
            surface_points=self.surface_points * factor,
            volume=self.volume * factor**3,
            mass=self.mass * factor**3,
            com=self.com * factor,
            sample_seed=self.sample_seed,
        )


@dataclass
class ObjectState:
    """Rigid pose and twist: position (m), scalar-last unit quaternion,
    linear velocity (m/s), angular velocity (rad/s)."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=quat_identity)
    linear_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    angular_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.position = as_vec3(self.position)
        self.orientation = np.asarray(self.orientation, dtype=float).reshape(4)
        _check_unit_quat(self.orientation, "orientation")
        self.linear_velocity = as_vec3(self.linear_velocity)
        self.angular_velocity = as_vec3(self.angular_velocity)

    def copy(self):
        return ObjectState(self.position.copy(), self.orientation.copy(),
                           self.linear_velocity.copy(), self.angular_velocity.copy())


@dataclass(frozen=True)
class PenetrationResult:
    """Per-taxel query result: contributing point indices, their penetrations
    P_i = R - l_i (each in [0, R]) and the ordered sum ΣP."""

    indices: np.ndarray
    penetrations: np.ndarray
    penetration_sum: float


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def transform_points(model, state):
    """Object-frame surface points -> world frame, shape (N, 3)."""
    _check_unit_quat(state.orientation, "orientation")
    return rotate_points(model.surface_points, state.orientation, state.position)


def _distances(world_points, origin):
    dx = world_points[:, 0] - origin[0]
    dy = world_points[:, 1] - origin[1]
    dz = world_points[:, 2] - origin[2]
    return np.sqrt(dx * dx + dy * dy + dz * dz)


def penetrations(taxel, world_points, sensing_range=None):
    """Penetration query for a single taxel against world-frame points.

    Includes exactly the points with l_i <= R (boundary contributes P = 0).
    ``sensing_range`` overrides the taxel's R (used by the collision-geometry
    baseline, which passes collision_radius).
    """
    R = taxel.sensing_range if sensing_range is None else float(sensing_range)
    if not R > 0.0:
        raise ConfigError(f"sensing range must be > 0, got {R}")
    pts = np.asarray(world_points, dtype=float).reshape(-1, 3)
    if pts.shape[0] == 0:
        return PenetrationResult(np.empty(0, dtype=np.intp), np.empty(0), 0.0)
    origin = taxel.origin
    d = _distances(pts, origin)
    idx = np.flatnonzero(d <= R)
    P = R - d[idx]
    return PenetrationResult(idx, P, ordered_sum(P))


def penetrations_batched(grid, world_points, use_culling=True, ranges=None):
    """Per-taxel penetration results for a whole grid (world-frame origins).

    Elementwise identical to calling :func:`penetrations` per taxel; the
    bounding-sphere cull only skips taxels that provably contain no points
    (strict margin well above fp noise), so it cannot change results.
    """
    pts = np.asarray(world_points, dtype=float).reshape(-1, 3)
    origins = grid.world_origins()
    if ranges is None:
        ranges = grid.sensing_ranges()
    if pts.shape[0] == 0:
        empty = np.empty(0, dtype=np.intp)
        return [PenetrationResult(empty, np.empty(0), 0.0) for _ in range(len(grid))]

    cull = None
    if use_culling and pts.shape[0] > 64:
        center = pts.mean(axis=0)
        bound = float(np.linalg.norm(pts - center, axis=1).max())
        center_dist = np.linalg.norm(origins - center, axis=1)
        margin = 1e-9 * (1.0 + bound + center_dist)
        cull = center_dist - bound > ranges + margin

    results = []
    empty = np.empty(0, dtype=np.intp)
    for t in range(len(grid)):
        if cull is not None and cull[t]:
            results.append(PenetrationResult(empty, np.empty(0), 0.0))
            continue
        R = float(ranges[t])
        d = _distances(pts, origins[t])
        idx = np.flatnonzero(d <= R)
        P = R - d[idx]
        results.append(PenetrationResult(idx, P, ordered_sum(P)))
    return results


def penetration_sums(grid, world_points, ranges=None):
    """ΣP per taxel as a (T,) array (thin wrapper over penetrations_batched)."""
    res = penetrations_batched(grid, world_points, ranges=ranges)
    return np.array([r.penetration_sum for r in res])


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def save_object(model, path):
    """Write the point-cloud text format: a header line
    ``volume <m3> mass <kg> com <x> <y> <z>`` followed by one ``x y z``
    triple per line (meters)."""
    with open(path, "w") as f:
        cx, cy, cz = (float(c) for c in model.com)
        f.write(f"volume {float(model.volume)!r} mass {float(model.mass)!r} "
                f"com {cx!r} {cy!r} {cz!r}\n")
        for p in model.surface_points:
            f.write(f"{float(p[0])!r} {float(p[1])!r} {float(p[2])!r}\n")


def load_object(path):
    """Read the point-cloud text format written by :func:`save_object`."""
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 8 or header[0] != "volume" or header[2] != "mass" or header[4] != "com":
            raise InvalidModelError(f"bad object file header in {path}")
        volume = float(header[1])
        mass = float(header[3])
        com = np.array([float(header[5]), float(header[6]), float(header[7])])
        pts = np.loadtxt(f, dtype=float, ndmin=2)
    if pts.size == 0:
        raise InvalidModelError(f"object file {path} has no points")
    return ObjectModel(surface_points=pts, volume=volume, mass=mass, com=com)


def save_grid(grid, path):
    """Write a taxel grid as JSON (palm extent, pose, per-taxel specs)."""
    doc = {
        "palm_extent": list(grid.palm_extent),
        "palm_position": grid.palm_position.tolist(),
        "palm_quat": grid.palm_quat.tolist(),
        "taxels": [
            {"origin": t.origin.tolist(),
             "collision_radius": t.collision_radius,
             "sensing_range": t.sensing_range}
            for t in grid.taxels
        ],
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)


def grid_from_dict(doc):
    taxels = tuple(
        TaxelSpec(origin=np.asarray(t["origin"], dtype=float),
                  collision_radius=float(t.get("collision_radius", 0.015)),
                  sensing_range=float(t.get("sensing_range", 0.03)))
        for t in doc["taxels"]
    )
    return TaxelGrid(
        taxels=taxels,
        palm_extent=tuple(doc.get("palm_extent", (0.037, 0.096))),
        palm_position=np.asarray(doc.get("palm_position", (0.0, 0.0, 0.0)), dtype=float),
        palm_quat=np.asarray(doc.get("palm_quat", (0.0, 0.0, 0.0, 1.0)), dtype=float),
    )


def load_grid(path):
    """Read a taxel grid from the JSON schema written by :func:`save_grid`."""
    with open(path) as f:
        doc = json.load(f)
    return grid_from_dict(doc)
