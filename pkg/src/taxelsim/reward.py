"""Oracle-policy reward terms and rollout task metrics.

Reward terms, evaluated literally per tick (x denotes the coordinate along
the translation axis):

=========  ====================================================  =======
term       definition                                            scale
=========  ====================================================  =======
iht        -(x_obj - x_goal)^2                                      700
rotp       -(x_left_end - x_right_end)^2                            500
goal       1 if sqrt((x_obj - x_goal)^2) < eps else 0                10
drop       min(max(x_obj - x_threshold, -1), 0)                    1000
pose       -||q - q_init||^2                                       -0.3
work       -tau . qdot                                             -2.0
torque     -||tau||^2                                              -0.1
force      -(1/4) sum_i (F_i - mu)^2                                500
=========  ====================================================  =======

Scales are applied exactly as tabled, signs included (the pose/work/torque
scales are negative and multiply already-negative terms); pass
``abs_scales=True`` to use |scale| instead for sensitivity studies.
"""

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import ConfigError

TERMS = ("iht", "rotp", "goal", "drop", "pose", "work", "torque", "force")

DEFAULT_SCALES = {
    "iht": 700.0, "rotp": 500.0, "goal": 10.0, "drop": 1000.0,
    "pose": -0.3, "work": -2.0, "torque": -0.1, "force": 500.0,
}


@dataclass
class RewardConfig:
    """Scales and references for the per-tick reward.

    ``mu`` is the fingertip-force target in the force-evenness term: "mean"
    uses the per-tick mean of F1..F4 (default), or pass a constant.
    ``end_offset`` is the body-frame vector from the object center to one
    end; the two ends are center ± rotated offset, and their x difference
    feeds the rotation penalty. ``x_threshold`` is the drop plane (default:
    palm low edge minus 0.05 m)."""

    scales: dict = field(default_factory=lambda: dict(DEFAULT_SCALES))
    goal_x: float = 0.04
    epsilon: float = 0.01
    x_threshold: float = -0.098
    q_init: np.ndarray | None = field(default_factory=lambda: np.zeros(16))
    mu: object = "mean"
    end_offset: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 0.111]))
    abs_scales: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        unknown = set(self.scales) - set(TERMS)
        if unknown:
            raise ConfigError(f"unknown reward terms: {sorted(unknown)}")
        for term in TERMS:
            self.scales.setdefault(term, DEFAULT_SCALES[term])
        if self.q_init is not None:
            self.q_init = np.asarray(self.q_init, dtype=float).reshape(-1)
        self.end_offset = geometry.as_vec3(self.end_offset)

    def scale(self, term):
        s = self.scales[term]
        return abs(s) if self.abs_scales else s


@dataclass
class TickSnapshot:
    """One tick's channels: pose, joints, and optional torque/action/force."""

    position: np.ndarray
    orientation: np.ndarray
    q: np.ndarray
    qd: np.ndarray | None = None
    tau: np.ndarray | None = None
    action: np.ndarray | None = None
    forces: np.ndarray | None = None


@dataclass(frozen=True)
class RewardBreakdown:
    """Raw and scaled values per term; total is the ordered sum of the scaled
    values (in TERMS order). ``warnings`` names optional channels that were
    missing and zeroed their terms."""

    raw: dict
    scaled: dict
    total: float
    warnings: tuple = ()


def reward_terms(snapshot, cfg):
    """Evaluate all Table terms for one tick snapshot."""
    warnings = []
    x_obj = float(snapshot.position[0])

    d = x_obj - cfg.goal_x
    r_iht = -(d * d)
    r_goal = 1.0 if np.sqrt(d * d) < cfg.epsilon else 0.0
    r_drop = min(max(x_obj - cfg.x_threshold, -1.0), 0.0)

    end = geometry.rotate_points(cfg.end_offset[None, :], snapshot.orientation)[0]
    x_left = x_obj - end[0]
    x_right = x_obj + end[0]
    r_rotp = -((x_left - x_right) ** 2)

    if cfg.q_init is None:
        raise ConfigError("reward pose term needs q_init")
    dq = np.asarray(snapshot.q, dtype=float) - cfg.q_init
    r_pose = -float(np.dot(dq, dq))

    if snapshot.tau is None:
        warnings.append("tau")
        r_work = 0.0
        r_torque = 0.0
    else:
        tau = np.asarray(snapshot.tau, dtype=float)
        if snapshot.qd is None:
            warnings.append("qd")
            r_work = 0.0
        else:
            r_work = -float(np.dot(tau, np.asarray(snapshot.qd, dtype=float)))
        r_torque = -float(np.dot(tau, tau))

    if snapshot.forces is None:
        warnings.append("F")
        r_force = 0.0
    else:
        F = np.asarray(snapshot.forces, dtype=float)
        mu = float(np.mean(F)) if cfg.mu == "mean" else float(cfg.mu)
        r_force = -float(np.mean((F - mu) ** 2))

    raw = {"iht": r_iht, "rotp": r_rotp, "goal": r_goal, "drop": r_drop,
           "pose": r_pose, "work": r_work, "torque": r_torque, "force": r_force}
    scaled = {term: cfg.scale(term) * raw[term] for term in TERMS}
    total = 0.0
    for term in TERMS:
        total += scaled[term]
    return RewardBreakdown(raw=raw, scaled=scaled, total=total, warnings=tuple(warnings))


def snapshots_from_trace(trace):
    """Per-tick snapshots from an EpisodeTrace; joint velocities by backward
    difference at the control rate (zero at the first tick)."""
    K = len(trace)
    qd = np.zeros_like(trace.joint_positions)
    if K > 1:
        qd[1:] = np.diff(trace.joint_positions, axis=0) * trace.control_rate
    snaps = []
    for k in range(K):
        snaps.append(TickSnapshot(
            position=trace.positions[k],
            orientation=trace.orientations[k],
            q=trace.joint_positions[k],
            qd=qd[k],
            tau=None if trace.joint_torques is None else trace.joint_torques[k],
            action=None if trace.actions is None else trace.actions[k],
            forces=None if trace.fingertip_forces is None else trace.fingertip_forces[k],
        ))
    return snaps


def episode_return(trace, cfg):
    """Sum of per-tick totals over the trace; returns (return, [breakdowns])."""
    breakdowns = [reward_terms(s, cfg) for s in snapshots_from_trace(trace)]
    total = 0.0
    for b in breakdowns:
        total += b.total
    return total, breakdowns


# ---------------------------------------------------------------------------
# task metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Metrics:
    """Success plus distance/velocity along the desired translation axis.

    Success = displacement exceeded 0 within the timeout. The distance,
    velocity and first-motion fields follow the successful-rollouts-only
    convention: they are None on failures. avg_velocity_cmps is the max
    displacement divided by the time it is first reached (from trace start),
    which makes it invariant to hold-resampling of the trace."""

    success: bool
    max_distance_cm: float | None = None
    avg_velocity_cmps: float | None = None
    time_to_first_motion_s: float | None = None


_AXES = {"x": np.array([1.0, 0.0, 0.0]),
         "y": np.array([0.0, 1.0, 0.0]),
         "z": np.array([0.0, 0.0, 1.0])}


def compute_metrics(trace, axis="x", timeout_s=120.0):
    """Metrics along ``axis`` ("x"/"y"/"z" or a direction vector)."""
    if isinstance(axis, str):
        try:
            u = _AXES[axis]
        except KeyError:
            raise ConfigError(f"axis must be one of {sorted(_AXES)} or a vector, got {axis!r}")
    else:
        u = geometry.as_vec3(axis)
        n = np.linalg.norm(u)
        if n == 0:
            raise ConfigError("axis vector must be nonzero")
        u = u / n

    if len(trace) == 0:
        return Metrics(success=False)
    t = trace.times
    disp = (trace.positions - trace.positions[0]) @ u
    in_time = (t - t[0]) <= timeout_s + 1e-9
    d = disp[in_time]
    tt = t[in_time]
    max_d = float(d.max())
    if max_d <= 0.0:
        return Metrics(success=False)
    j_max = int(np.argmax(d))  # first tick reaching the max
    elapsed = float(tt[j_max] - tt[0])
    j_first = int(np.argmax(d > 0.0))
    return Metrics(
        success=True,
        max_distance_cm=max_d * 100.0,
        avg_velocity_cmps=(max_d / elapsed) * 100.0 if elapsed > 0 else None,
        time_to_first_motion_s=float(tt[j_first] - tt[0]),
    )
