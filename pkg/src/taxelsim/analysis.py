"""Gait analysis: joint phase portraits and Poincaré-section crossings.

A phase portrait is the (q, q̇) curve of one joint; q̇ is estimated from the
position samples by central differences (second-order one-sided at the
endpoints), since real traces carry positions only. A Poincaré section is a
line in that plane (anchor + normal); the dispersion of the 1-D crossing
coordinates along the section measures how much a gait wanders between
cycles.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class PhasePortrait:
    joint: int
    q: np.ndarray
    qd: np.ndarray

    @property
    def points(self):
        """(K, 2) array of (q, q̇) samples."""
        return np.column_stack([self.q, self.qd])


@dataclass(frozen=True)
class PoincareSection:
    """Section line through ``anchor`` with unit-normalized ``normal``;
    ``direction`` selects which sign changes of the signed distance count as
    crossings ("positive": - to +, "negative": + to -, or "both")."""

    anchor: np.ndarray
    normal: np.ndarray
    direction: str = "positive"

    def __post_init__(self):
        a = np.asarray(self.anchor, dtype=float).reshape(2)
        n = np.asarray(self.normal, dtype=float).reshape(2)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise ConfigError("section normal must be nonzero")
        if self.direction not in ("positive", "negative", "both"):
            raise ConfigError(f"bad crossing direction {self.direction!r}")
        object.__setattr__(self, "anchor", a)
        object.__setattr__(self, "normal", n / norm)

    @property
    def tangent(self):
        """Unit direction along the section (normal rotated -90°)."""
        return np.array([self.normal[1], -self.normal[0]])


@dataclass(frozen=True)
class CrossingResult:
    points: np.ndarray          # (M, 2) crossing locations on the section
    coords: np.ndarray          # (M,) 1-D coordinate along the section line
    dispersion: float | None    # population std of coords; None when empty


def phase_portrait(trace_or_q, joint=0, control_rate=None):
    """Portrait for one joint of a trace (or a raw q array + control_rate).

    Needs at least 3 ticks. q̇ comes from np.gradient (central differences,
    exact on linear signals; 2nd-order one-sided at the ends).
    """
    if hasattr(trace_or_q, "joint_positions"):
        q = np.asarray(trace_or_q.joint_positions[:, joint], dtype=float)
        rate = trace_or_q.control_rate
    else:
        q = np.asarray(trace_or_q, dtype=float).reshape(-1)
        if control_rate is None:
            raise ConfigError("control_rate is required for raw joint arrays")
        rate = control_rate
    if q.shape[0] < 3:
        raise ConfigError(f"phase portrait needs >= 3 ticks, got {q.shape[0]}")
    qd = np.gradient(q, 1.0 / rate, edge_order=2)
    return PhasePortrait(joint=joint, q=q, qd=qd)


def default_section(portrait):
    """Vertical section at q = median(q), positive crossings only (scale-free)."""
    return PoincareSection(anchor=np.array([float(np.median(portrait.q)), 0.0]),
                           normal=np.array([1.0, 0.0]), direction="positive")


def poincare_crossings(portrait, section=None):
    """Crossing points of a portrait through a section, by linear interpolation
    between consecutive samples that straddle the line.

    A sample exactly on the line closes the crossing started on the previous
    side (s_j < 0 <= s_{j+1} counts as one positive crossing; symmetrically
    for negative), so crossings are never double-counted. Dispersion is the
    population standard deviation of the crossing coordinates along the
    section; a portrait that never crosses yields an empty result with
    dispersion None.
    """
    if section is None:
        section = default_section(portrait)
    pts = portrait.points if isinstance(portrait, PhasePortrait) else np.asarray(portrait, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ConfigError(f"portrait points must be (K, 2), got {pts.shape}")
    s = (pts - section.anchor) @ section.normal
    s0, s1 = s[:-1], s[1:]
    pos = (s0 < 0.0) & (s1 >= 0.0)
    neg = (s0 > 0.0) & (s1 <= 0.0)
    if section.direction == "positive":
        hit = pos
    elif section.direction == "negative":
        hit = neg
    else:
        hit = pos | neg
    j = np.flatnonzero(hit)
    if j.size == 0:
        return CrossingResult(points=np.empty((0, 2)), coords=np.empty(0), dispersion=None)
    frac = s[j] / (s[j] - s[j + 1])
    crossing = pts[j] + frac[:, None] * (pts[j + 1] - pts[j])
    coords = (crossing - section.anchor) @ section.tangent
    return CrossingResult(points=crossing, coords=coords,
                          dispersion=float(np.std(coords)))


def dominant_period(series, min_lag=1, max_lag=None):
    """Lag (in samples) of the autocorrelation peak of a centered series,
    searched over [min_lag, max_lag] (default len/2). Each lag is normalized
    by its overlap length, otherwise the shrinking overlap biases the peak
    toward lag 1. Returns None for constant series."""
    x = np.asarray(series, dtype=float)
    x = x - x.mean()
    if not np.any(x):
        return None
    n = x.size
    ac = np.correlate(x, x, mode="full")[n - 1:]
    ac = ac / (n - np.arange(n))
    hi = n // 2 + 1 if max_lag is None else min(int(max_lag) + 1, n)
    if min_lag >= hi:
        return None
    return int(min_lag + np.argmax(ac[min_lag:hi]))


def plot_portrait(portrait, crossings=None, section=None, path=None):
    """Save the portrait (and optional section/crossings) as an SVG/PNG."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(portrait.q, portrait.qd, lw=0.8, color="tab:blue")
    if section is not None:
        t = section.tangent
        span = np.array([-1.0, 1.0]) * (np.ptp(portrait.q) + np.ptp(portrait.qd) + 1e-12)
        line = section.anchor[None, :] + span[:, None] * t[None, :]
        ax.plot(line[:, 0], line[:, 1], "--", color="gray", lw=1.0)
    if crossings is not None and crossings.points.size:
        ax.plot(crossings.points[:, 0], crossings.points[:, 1], "o",
                color="tab:red", ms=4)
    ax.set_xlabel(f"q[{portrait.joint}] (rad)")
    ax.set_ylabel(f"qd[{portrait.joint}] (rad/s)")
    ax.set_title(f"joint {portrait.joint} phase portrait")
    fig.tight_layout()
    if path is not None:
        fig.savefig(path)
    plt.close(fig)
    return path
