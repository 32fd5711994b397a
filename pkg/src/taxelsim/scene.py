"""Kinematic scene stepping, object fixtures, and scripted episodes.

The engine integrates object pose from scripted twists (no contact dynamics:
the object follows its script, the skin only senses). Episodes sample taxel
signals at the control rate while integrating at the (higher) sim rate, and
are recorded as :class:`EpisodeTrace` rows, serializable as JSON Lines.

Object fixtures are surface point clouds sampled area-uniformly with
stratified jittered grids (low within-patch count variance), with exact
closed-form volumes.
"""

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry
from .errors import ConfigError, InvalidModelError
from .geometry import ObjectModel, ObjectState, TaxelGrid, quat_from_axis_angle
from .sensor import Modality, ThresholdConfig, calibrate_thresholds, grid_signals

N_JOINTS = 16


# ---------------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------------

def step(state, dt):
    """First-order kinematic step: position += v dt, orientation integrated
    from the world-frame angular velocity and renormalized. Velocities are
    left unchanged (scripts override them between steps)."""
    if not dt > 0.0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    w = state.angular_velocity
    q = state.orientation
    wq = np.array([w[0], w[1], w[2], 0.0])
    dq = 0.5 * dt * geometry.quat_multiply(wq, q)
    return ObjectState(
        position=state.position + state.linear_velocity * dt,
        orientation=geometry.quat_normalize(q + dq),
        linear_velocity=state.linear_velocity.copy(),
        angular_velocity=state.angular_velocity.copy(),
    )


# ---------------------------------------------------------------------------
# trajectory scripts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantSlide:
    """Constant twist for the whole episode."""

    v: np.ndarray = field(default_factory=lambda: np.zeros(3))
    w: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "v", geometry.as_vec3(self.v))
        object.__setattr__(self, "w", geometry.as_vec3(self.w))

    duration = np.inf

    def velocity(self, t):
        return self.v, self.w

    def joints(self, t):
        return None


@dataclass(frozen=True)
class PeriodicGait:
    """Sinusoidal per-axis position oscillation plus steady transport.

    Velocity per axis: transport + amplitude * (2π/period) * cos(2π t/period
    + phase). The default phase puts the vertical (z) oscillation a quarter
    period ahead of x, so the object descends into contact while moving
    forward, like a transport stroke. Joint positions are synthesized as
    phase-staggered sinusoids with the same period (for gait analysis).
    """

    amplitude: np.ndarray = field(default_factory=lambda: np.array([0.01, 0.0, 0.01]))
    period: float = 2.0
    transport: np.ndarray = field(default_factory=lambda: np.zeros(3))
    phase: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, np.pi / 2]))
    joint_amplitude: float = 0.35

    def __post_init__(self):
        object.__setattr__(self, "amplitude", geometry.as_vec3(self.amplitude))
        object.__setattr__(self, "transport", geometry.as_vec3(self.transport))
        object.__setattr__(self, "phase", geometry.as_vec3(self.phase))
        if not self.period > 0.0:
            raise ConfigError(f"gait period must be > 0, got {self.period}")

    duration = np.inf

    def velocity(self, t):
        wf = 2.0 * np.pi / self.period
        v = self.transport + self.amplitude * wf * np.cos(wf * t + self.phase)
        return v, np.zeros(3)

    def joints(self, t):
        wf = 2.0 * np.pi / self.period
        offsets = 2.0 * np.pi * np.arange(N_JOINTS) / N_JOINTS
        return self.joint_amplitude * np.sin(wf * t + offsets)


@dataclass(frozen=True)
class Waypoints:
    """Timed poses; piecewise-constant twist between consecutive waypoints."""

    times: np.ndarray
    positions: np.ndarray
    quats: np.ndarray = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        if t.ndim != 1 or t.shape[0] != p.shape[0] or t.shape[0] < 2:
            raise ConfigError("waypoints need matching times/positions, at least 2")
        if np.any(np.diff(t) <= 0):
            raise ConfigError("waypoint times must be strictly increasing")
        q = self.quats
        if q is None:
            q = np.tile(geometry.quat_identity(), (t.shape[0], 1))
        q = np.asarray(q, dtype=float).reshape(-1, 4)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "quats", q)

    @property
    def duration(self):
        return float(self.times[-1])

    def velocity(self, t):
        if t >= self.times[-1]:
            return np.zeros(3), np.zeros(3)
        i = int(np.searchsorted(self.times, t, side="right") - 1)
        i = max(i, 0)
        dt = self.times[i + 1] - self.times[i]
        v = (self.positions[i + 1] - self.positions[i]) / dt
        q0, q1 = self.quats[i], self.quats[i + 1]
        q0_conj = np.array([-q0[0], -q0[1], -q0[2], q0[3]])
        q_rel = geometry.quat_multiply(q1, q0_conj)
        sin_half = np.linalg.norm(q_rel[:3])
        if sin_half < 1e-15:
            w = np.zeros(3)
        else:
            angle = 2.0 * np.arctan2(sin_half, q_rel[3])
            w = q_rel[:3] / sin_half * angle / dt
        return v, w

    def joints(self, t):
        return None


# ---------------------------------------------------------------------------
# object fixtures (stratified area-uniform surface sampling)
# ---------------------------------------------------------------------------

def _stratified_rect(n, width, height, rng):
    """n jittered points on [0, width] x [0, height]; grid strata plus a
    uniform remainder."""
    if n <= 0:
        return np.empty((0, 2))
    cols = max(1, int(round(np.sqrt(n * width / max(height, 1e-300)))))
    cols = min(cols, n)
    rows = max(1, n // cols)
    m = rows * cols
    i, j = np.meshgrid(np.arange(cols), np.arange(rows), indexing="ij")
    u = (i.ravel() + rng.random(m)) / cols * width
    v = (j.ravel() + rng.random(m)) / rows * height
    rest = n - m
    if rest > 0:
        u = np.concatenate([u, rng.random(rest) * width])
        v = np.concatenate([v, rng.random(rest) * height])
    return np.column_stack([u, v])


def _stratified_disc(n, radius, rng):
    """n area-uniform jittered points on a disc (strata in (r², θ))."""
    uv = _stratified_rect(n, 1.0, 1.0, rng)
    r = radius * np.sqrt(uv[:, 0])
    theta = 2.0 * np.pi * uv[:, 1]
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def _allocate(n, areas):
    """Largest-remainder proportional allocation of n points to strata."""
    areas = np.asarray(areas, dtype=float)
    quota = n * areas / areas.sum()
    counts = np.floor(quota).astype(int)
    rest = n - counts.sum()
    if rest > 0:
        order = np.argsort(-(quota - counts), kind="stable")
        counts[order[:rest]] += 1
    return counts


def make_cylinder(radius, length, point_count=2048, seed=0, mass=0.0):
    """Cylinder surface cloud, axis along local z, centered at the origin.

    Volume is the closed form π r² l; the canonical test object is
    radius 0.0325 m x length 0.222 m (0.108 kg).
    """
    if radius <= 0 or length <= 0:
        raise InvalidModelError(f"degenerate cylinder: r={radius} l={length}")
    if point_count < 8:
        raise InvalidModelError(f"point_count must be >= 8, got {point_count}")
    rng = np.random.default_rng(seed)
    lateral = 2.0 * np.pi * radius * length
    cap = np.pi * radius**2
    n_lat, n_top, n_bot = _allocate(point_count, [lateral, cap, cap])

    uv = _stratified_rect(n_lat, 2.0 * np.pi * radius, length, rng)
    theta = uv[:, 0] / radius
    side = np.column_stack([radius * np.cos(theta), radius * np.sin(theta),
                            uv[:, 1] - length / 2])
    top = _stratified_disc(n_top, radius, rng)
    bot = _stratified_disc(n_bot, radius, rng)
    top = np.column_stack([top, np.full(n_top, length / 2)])
    bot = np.column_stack([bot, np.full(n_bot, -length / 2)])
    pts = np.vstack([side, top, bot])
    return ObjectModel(surface_points=pts, volume=np.pi * radius**2 * length,
                       mass=mass, com=np.zeros(3), sample_seed=seed)


_BOX_FACES = [  # (fixed axis, sign, u axis, v axis)
    (0, +1, 1, 2), (0, -1, 1, 2),
    (1, +1, 0, 2), (1, -1, 0, 2),
    (2, +1, 0, 1), (2, -1, 0, 1),
]


def _box_surface(size, point_count, rng):
    sx, sy, sz = size
    areas = [sy * sz, sy * sz, sx * sz, sx * sz, sx * sy, sx * sy]
    counts = _allocate(point_count, areas)
    pts = []
    for (axis, sign, ua, va), n in zip(_BOX_FACES, counts):
        uv = _stratified_rect(n, size[ua], size[va], rng)
        face = np.empty((n, 3))
        face[:, axis] = sign * size[axis] / 2
        face[:, ua] = uv[:, 0] - size[ua] / 2
        face[:, va] = uv[:, 1] - size[va] / 2
        pts.append(face)
    return np.vstack(pts)


def make_box(size, point_count=2048, seed=0, mass=0.0):
    """Axis-aligned box surface cloud centered at the origin; exact volume."""
    size = geometry.as_vec3(size)
    if np.any(size <= 0):
        raise InvalidModelError(f"degenerate box size {size}")
    if point_count < 8:
        raise InvalidModelError(f"point_count must be >= 8, got {point_count}")
    rng = np.random.default_rng(seed)
    pts = _box_surface(size, point_count, rng)
    return ObjectModel(surface_points=pts, volume=float(np.prod(size)),
                       mass=mass, com=np.zeros(3), sample_seed=seed)


def make_composite(parts, point_count=2048, seed=0, mass=0.0):
    """Union of non-overlapping axis-aligned boxes: ``parts`` is a list of
    (size, center_offset) pairs. Parts may touch but not overlap, so the
    volume is the exact sum of part volumes. Points on buried interface
    faces are retained (they feed the density proxy, not rendering).
    Center of mass assumes uniform solid density across parts."""
    if not parts:
        raise InvalidModelError("composite needs at least one part")
    sizes = [geometry.as_vec3(s) for s, _ in parts]
    offsets = [geometry.as_vec3(o) for _, o in parts]
    for s in sizes:
        if np.any(s <= 0):
            raise InvalidModelError(f"degenerate part size {s}")
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            gap = np.abs(offsets[i] - offsets[j]) - (sizes[i] + sizes[j]) / 2
            if np.all(gap < -1e-12):
                raise InvalidModelError(f"parts {i} and {j} overlap")
    rng = np.random.default_rng(seed)
    areas = [2.0 * (s[0] * s[1] + s[1] * s[2] + s[0] * s[2]) for s in sizes]
    counts = _allocate(point_count, areas)
    pts = np.vstack([
        _box_surface(s, n, rng) + o for s, o, n in zip(sizes, offsets, counts)
    ])
    volumes = np.array([float(np.prod(s)) for s in sizes])
    volume = float(volumes.sum())
    com = np.sum(np.stack(offsets) * volumes[:, None], axis=0) / volume
    return ObjectModel(surface_points=pts, volume=volume, mass=mass, com=com,
                       sample_seed=seed)


def make_hammer(point_count=2048, seed=0, mass=0.284):
    """Hammer-like composite (box head + box handle), 0.37 x 0.064 x 0.20 m
    bounding size, 284 g: handle along x, head across z at the +x end."""
    handle = (np.array([0.306, 0.048, 0.048]), np.array([-0.032, 0.0, 0.0]))
    head = (np.array([0.064, 0.064, 0.20]), np.array([0.153, 0.0, 0.0]))
    return make_composite([handle, head], point_count=point_count, seed=seed, mass=mass)


def canonical_cylinder(point_count=2048, seed=7):
    """The in-domain test cylinder: 6.5 cm diameter x 22.2 cm length, 108 g."""
    return make_cylinder(radius=0.0325, length=0.222, point_count=point_count,
                         seed=seed, mass=0.108)


# ---------------------------------------------------------------------------
# episodes
# ---------------------------------------------------------------------------

@dataclass
class EpisodeTrace:
    """Per-control-tick rollout record.

    Required channels: time, object pose/twist, joint positions (rad) and
    per-taxel raw + ternary signals. Torques, actions and fingertip forces
    are optional (None when the source provides none).
    """

    times: np.ndarray
    positions: np.ndarray
    orientations: np.ndarray
    linear_velocities: np.ndarray
    angular_velocities: np.ndarray
    joint_positions: np.ndarray
    raw_signals: np.ndarray
    ternary_signals: np.ndarray
    taxel_ids: np.ndarray
    control_rate: float
    joint_torques: np.ndarray | None = None
    actions: np.ndarray | None = None
    fingertip_forces: np.ndarray | None = None
    dropped: bool = False
    drop_time: float | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1:
            raise ConfigError("trace times must be a 1-D array")
        d = np.diff(t)
        if np.any(d <= 0):
            raise ConfigError("trace timestamps must be strictly increasing")
        if d.size and np.max(np.abs(d - 1.0 / self.control_rate)) > 1e-9:
            raise ConfigError("trace tick spacing must equal 1/control_rate")
        self.times = t

    def __len__(self):
        return self.times.shape[0]

    def save_jsonl(self, path):
        """One JSON object per tick: t, pos, quat, v, w, q, tau, a, F,
        taxels:[{id,Sx,Sy,Sz,sx,sy,sz}]."""
        with open(path, "w") as f:
            for k in range(len(self)):
                row = {
                    "t": float(self.times[k]),
                    "pos": self.positions[k].tolist(),
                    "quat": self.orientations[k].tolist(),
                    "v": self.linear_velocities[k].tolist(),
                    "w": self.angular_velocities[k].tolist(),
                    "q": self.joint_positions[k].tolist(),
                    "tau": None if self.joint_torques is None else self.joint_torques[k].tolist(),
                    "a": None if self.actions is None else self.actions[k].tolist(),
                    "F": None if self.fingertip_forces is None else self.fingertip_forces[k].tolist(),
                    "taxels": [
                        {"id": int(self.taxel_ids[i]),
                         "Sx": float(self.raw_signals[k, i, 0]),
                         "Sy": float(self.raw_signals[k, i, 1]),
                         "Sz": float(self.raw_signals[k, i, 2]),
                         "sx": int(self.ternary_signals[k, i, 0]),
                         "sy": int(self.ternary_signals[k, i, 1]),
                         "sz": int(self.ternary_signals[k, i, 2])}
                        for i in range(self.taxel_ids.shape[0])
                    ],
                }
                f.write(json.dumps(row) + "\n")

    @classmethod
    def load_jsonl(cls, path):
        rows = []
        with open(path) as f:
            for line in f:
                line = line.strip()
                if line:
                    rows.append(json.loads(line))
        if not rows:
            raise ConfigError(f"trace file {path} is empty")
        K = len(rows)
        T = len(rows[0]["taxels"])
        times = np.array([r["t"] for r in rows])
        control_rate = 1.0 / (times[1] - times[0]) if K > 1 else 1.0
        has_tau = rows[0]["tau"] is not None
        has_a = rows[0]["a"] is not None
        has_F = rows[0]["F"] is not None
        raw = np.zeros((K, T, 3))
        tern = np.zeros((K, T, 3), dtype=np.int8)
        for k, r in enumerate(rows):
            for i, tx in enumerate(r["taxels"]):
                raw[k, i] = (tx["Sx"], tx["Sy"], tx["Sz"])
                tern[k, i] = (tx["sx"], tx["sy"], tx["sz"])
        return cls(
            times=times,
            positions=np.array([r["pos"] for r in rows]),
            orientations=np.array([r["quat"] for r in rows]),
            linear_velocities=np.array([r["v"] for r in rows]),
            angular_velocities=np.array([r["w"] for r in rows]),
            joint_positions=np.array([r["q"] for r in rows]),
            joint_torques=np.array([r["tau"] for r in rows]) if has_tau else None,
            actions=np.array([r["a"] for r in rows]) if has_a else None,
            fingertip_forces=np.array([r["F"] for r in rows]) if has_F else None,
            raw_signals=raw,
            ternary_signals=tern,
            taxel_ids=np.array([tx["id"] for tx in rows[0]["taxels"]]),
            control_rate=float(control_rate),
        )


@dataclass
class SceneConfig:
    """Everything needed to roll out one scripted episode.

    ``thresholds="auto"`` calibrates activation thresholds from a dry run of
    the same scene (10% of the peak |signal| per axis pair). ``hand_tilt_deg``
    rotates the desired translation axis used by metrics (about palm y) and,
    with ``tilt_bias_speed`` > 0, adds a downhill bias velocity — a kinematic
    stand-in, no force simulation. ``sensor_mode`` is "skin" or
    "collision_baseline" (see :func:`taxelsim.sensor.grid_signals`).
    """

    grid: TaxelGrid
    object_model: ObjectModel
    initial_state: ObjectState
    script: object
    sim_rate: float = 200.0
    control_rate: float = 10.0
    episode_steps: int = 400
    hand_tilt_deg: float = 0.0
    tilt_bias_speed: float = 0.0
    seed: int = 0
    modality: Modality = Modality.SIGNED_3AXIS
    thresholds: object = "auto"
    sensor_mode: str = "skin"
    drop_margin: float = 0.05

    def __post_init__(self):
        if self.episode_steps < 1:
            raise ConfigError(f"episode_steps must be >= 1, got {self.episode_steps}")
        if self.sim_rate < self.control_rate:
            raise ConfigError("sim_rate must be >= control_rate")
        sub = self.sim_rate / self.control_rate
        if abs(sub - round(sub)) > 1e-9:
            raise ConfigError(
                f"sim_rate {self.sim_rate} must be an integer multiple of "
                f"control_rate {self.control_rate}"
            )
        if self.sensor_mode not in ("skin", "collision_baseline"):
            raise ConfigError(f"unknown sensor_mode {self.sensor_mode!r}")
        duration = self.episode_steps / self.control_rate
        if getattr(self.script, "duration", np.inf) < duration - 1e-9:
            raise ConfigError("trajectory script does not cover the episode")

    @property
    def substeps(self):
        return int(round(self.sim_rate / self.control_rate))

    def desired_axis(self):
        """Unit translation axis for metrics: palm +x pitched by the hand tilt."""
        th = np.deg2rad(self.hand_tilt_deg)
        return np.array([np.cos(th), 0.0, -np.sin(th)])

    def _bias_velocity(self):
        th = np.deg2rad(self.hand_tilt_deg)
        return -self.tilt_bias_speed * np.sin(th) * np.array([1.0, 0.0, 0.0])

    @classmethod
    def default(cls, point_count=2048, **overrides):
        """Canonical scene: test cylinder lying across the palm (axis along
        palm y), sliding slowly toward +x from the palm's low end."""
        grid = TaxelGrid.default_palm()
        model = canonical_cylinder(point_count=point_count)
        state = ObjectState(
            position=np.array([-0.04, 0.0, 0.0325]),
            orientation=quat_from_axis_angle([1.0, 0.0, 0.0], -np.pi / 2),
        )
        script = ConstantSlide(v=np.array([0.002, 0.0, 0.0]))
        cfg = dict(grid=grid, object_model=model, initial_state=state, script=script)
        cfg.update(overrides)
        return cls(**cfg)


def _is_dropped(cfg, position):
    """Object center past the palm boundary plus margin (palm frame)."""
    R = geometry.rotation_matrix(cfg.grid.palm_quat)
    p = R.T @ (position - cfg.grid.palm_position)
    w, l = cfg.grid.palm_extent
    m = cfg.drop_margin
    return (abs(p[0]) > l / 2 + m) or (abs(p[1]) > w / 2 + m) or (p[2] < -m)


def _roll_episode(cfg, thresholds):
    """Single rollout; thresholds=None records raw signals only."""
    K = cfg.episode_steps
    T = len(cfg.grid)
    dt = 1.0 / cfg.sim_rate
    bias = cfg._bias_velocity()
    baseline = cfg.sensor_mode == "collision_baseline"
    placeholder = ThresholdConfig(shear=np.inf, normal=np.inf) if thresholds is None else thresholds

    times = np.arange(K) / cfg.control_rate
    pos = np.zeros((K, 3))
    quat = np.zeros((K, 4))
    lin = np.zeros((K, 3))
    ang = np.zeros((K, 3))
    joints = np.zeros((K, N_JOINTS))
    raw = np.zeros((K, T, 3))
    tern = np.zeros((K, T, 3), dtype=np.int8)

    state = cfg.initial_state.copy()
    dropped = False
    drop_time = None
    n = 0
    for k in range(K):
        t = times[k]
        v, w = cfg.script.velocity(t)
        state.linear_velocity = geometry.as_vec3(v) + bias
        state.angular_velocity = geometry.as_vec3(w)
        r, s = grid_signals(cfg.grid, cfg.object_model, state, placeholder,
                            modality=cfg.modality, collision_baseline=baseline)
        q = cfg.script.joints(t)
        pos[k] = state.position
        quat[k] = state.orientation
        lin[k] = state.linear_velocity
        ang[k] = state.angular_velocity
        joints[k] = np.zeros(N_JOINTS) if q is None else q
        raw[k] = r
        tern[k] = s
        n = k + 1
        if _is_dropped(cfg, state.position):
            dropped = True
            drop_time = float(t)
            break
        for j in range(cfg.substeps):
            ts = t + j * dt
            v, w = cfg.script.velocity(ts)
            state.linear_velocity = geometry.as_vec3(v) + bias
            state.angular_velocity = geometry.as_vec3(w)
            state = step(state, dt)

    return EpisodeTrace(
        times=times[:n], positions=pos[:n], orientations=quat[:n],
        linear_velocities=lin[:n], angular_velocities=ang[:n],
        joint_positions=joints[:n], raw_signals=raw[:n], ternary_signals=tern[:n],
        taxel_ids=np.arange(T), control_rate=cfg.control_rate,
        dropped=dropped, drop_time=drop_time,
    )


def resolve_thresholds(cfg):
    """The scene's ThresholdConfig, calibrating from a dry run when "auto"."""
    if isinstance(cfg.thresholds, ThresholdConfig):
        return cfg.thresholds
    if cfg.thresholds == "auto":
        dry = _roll_episode(cfg, thresholds=None)
        return calibrate_thresholds(dry.raw_signals)
    raise ConfigError(f"thresholds must be a ThresholdConfig or 'auto', got {cfg.thresholds!r}")


def simulate_episode(cfg):
    """Roll out one episode: integrate at sim_rate, sample signals at control
    ticks, terminate early (drop flag) when the object leaves the palm region.
    Deterministic for a given config and seed."""
    return _roll_episode(cfg, resolve_thresholds(cfg))


def run_episodes(cfg, episodes, seed=None, scale_range=(0.8, 1.2), goal_span=(0.0, 0.04)):
    """Batch of independent episodes with per-episode isolated RNG streams.

    Episode i rescales the object by a random factor from ``scale_range`` and
    draws a goal x position from ``goal_span`` (recorded in the returned meta
    dict; the kinematic script is unchanged). Results are ordered by episode
    index. Returns a list of (EpisodeTrace, meta) pairs.
    """
    seed = cfg.seed if seed is None else seed
    children = np.random.SeedSequence(seed).spawn(episodes)
    out = []
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        factor = float(rng.uniform(*scale_range))
        goal_x = float(rng.uniform(*goal_span))
        episode_cfg = replace(cfg, object_model=cfg.object_model.scaled(factor))
        trace = simulate_episode(episode_cfg)
        meta = {"episode": i, "scale": factor, "goal_x": goal_x,
                "seed": int(child.generate_state(1)[0]), "dropped": trace.dropped}
        out.append((trace, meta))
    return out


# ---------------------------------------------------------------------------
# config files (JSON)
# ---------------------------------------------------------------------------

_SCRIPTS = {"constant_slide": ConstantSlide, "periodic_gait": PeriodicGait,
            "waypoints": Waypoints}


def _script_from_dict(doc):
    kind = doc.get("type", "constant_slide")
    if kind == "constant_slide":
        return ConstantSlide(v=np.asarray(doc.get("v", (0.0, 0.0, 0.0)), dtype=float),
                             w=np.asarray(doc.get("w", (0.0, 0.0, 0.0)), dtype=float))
    if kind == "periodic_gait":
        kwargs = {}
        for key in ("amplitude", "transport", "phase"):
            if key in doc:
                kwargs[key] = np.asarray(doc[key], dtype=float)
        for key in ("period", "joint_amplitude"):
            if key in doc:
                kwargs[key] = float(doc[key])
        return PeriodicGait(**kwargs)
    if kind == "waypoints":
        return Waypoints(times=np.asarray(doc["times"], dtype=float),
                         positions=np.asarray(doc["positions"], dtype=float),
                         quats=np.asarray(doc["quats"], dtype=float) if "quats" in doc else None)
    raise ConfigError(f"unknown script type {kind!r}")


def _object_from_dict(doc):
    kind = doc.get("type", "cylinder")
    common = dict(point_count=int(doc.get("points", 2048)), seed=int(doc.get("seed", 0)),
                  mass=float(doc.get("mass", 0.0)))
    if kind == "cylinder":
        return make_cylinder(radius=float(doc.get("radius", 0.0325)),
                             length=float(doc.get("length", 0.222)), **common)
    if kind == "box":
        return make_box(size=np.asarray(doc.get("size", (0.05, 0.05, 0.05)), dtype=float), **common)
    if kind == "hammer":
        return make_hammer(point_count=common["point_count"], seed=common["seed"],
                           mass=common["mass"] or 0.284)
    if kind == "file":
        return geometry.load_object(doc["path"])
    raise ConfigError(f"unknown object type {kind!r}")


def scene_config_from_dict(doc):
    """Build a SceneConfig from the CLI's JSON configuration schema. All keys
    are optional; `{}` yields the canonical default scene."""
    grid_doc = doc.get("grid", "default")
    if grid_doc == "default":
        grid = TaxelGrid.default_palm()
    elif isinstance(grid_doc, str):
        grid = geometry.load_grid(grid_doc)
    elif "taxels" in grid_doc:
        grid = geometry.grid_from_dict(grid_doc)
    else:
        grid = TaxelGrid.default_palm(
            rows=int(grid_doc.get("rows", 8)), cols=int(grid_doc.get("cols", 2)),
            palm_extent=tuple(grid_doc.get("palm_extent", (0.037, 0.096))),
            collision_radius=float(grid_doc.get("collision_radius", 0.015)),
            sensing_range=float(grid_doc.get("sensing_range", 0.03)))

    default = SceneConfig.default()
    model = _object_from_dict(doc["object"]) if "object" in doc else default.object_model
    if "initial_state" in doc:
        sdoc = doc["initial_state"]
        state = ObjectState(
            position=np.asarray(sdoc.get("position", (0.0, 0.0, 0.05)), dtype=float),
            orientation=np.asarray(sdoc.get("quat", (0.0, 0.0, 0.0, 1.0)), dtype=float))
    else:
        state = default.initial_state
    script = _script_from_dict(doc["script"]) if "script" in doc else default.script

    thresholds = doc.get("thresholds", "auto")
    if isinstance(thresholds, dict):
        thresholds = ThresholdConfig(shear=float(thresholds["shear"]),
                                     normal=float(thresholds["normal"]))
    return SceneConfig(
        grid=grid, object_model=model, initial_state=state, script=script,
        sim_rate=float(doc.get("sim_rate", 200.0)),
        control_rate=float(doc.get("control_rate", 10.0)),
        episode_steps=int(doc.get("episode_steps", 400)),
        hand_tilt_deg=float(doc.get("hand_tilt_deg", 0.0)),
        tilt_bias_speed=float(doc.get("tilt_bias_speed", 0.0)),
        seed=int(doc.get("seed", 0)),
        modality=Modality(doc.get("modality", "signed3")),
        thresholds=thresholds,
        sensor_mode=doc.get("sensor_mode", "skin"),
        drop_margin=float(doc.get("drop_margin", 0.05)),
    )


def load_scene_config(path):
    with open(path) as f:
        return scene_config_from_dict(json.load(f))
