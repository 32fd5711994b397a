import numpy as np
import pytest
from helpers import gait_scene_config

from taxelsim.analysis import (
    PoincareSection,
    default_section,
    dominant_period,
    phase_portrait,
    plot_portrait,
    poincare_crossings,
)
from taxelsim.errors import ConfigError
from taxelsim.scene import simulate_episode


def circle_points(radius, revolutions=1, per_rev=40):
    """Closed-cycle samples placed so one sample per revolution lands exactly
    on the +q axis (angle 0.0), making interpolated crossings exact. Angles
    are built per revolution (not cumulatively) so every revolution revisits
    the identical sample positions."""
    angles = (np.arange(per_rev) - per_rev / 4) * (2.0 * np.pi / per_rev)
    angles = np.tile(angles, revolutions)
    return np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])


PLUS_Q_AXIS = PoincareSection(anchor=np.zeros(2), normal=np.array([0.0, 1.0]),
                              direction="positive")


# ---------------------------------------------------------------------------
# phase portraits
# ---------------------------------------------------------------------------

def test_constant_joint_sits_on_zero_velocity_line():
    p = phase_portrait(np.full(50, 0.7), control_rate=20.0)
    np.testing.assert_array_equal(p.qd, np.zeros(50))
    assert p.points.shape == (50, 2)


def test_linear_ramp_gives_exact_unit_velocity():
    t = np.arange(100) / 20.0
    p = phase_portrait(t, control_rate=20.0)
    np.testing.assert_allclose(p.qd, np.ones(100), atol=1e-9)


def test_sine_portrait_approximates_unit_circle():
    t = np.arange(200) / 20.0
    q = np.sin(2 * np.pi * t)
    p = phase_portrait(q, control_rate=20.0)
    radii = np.hypot(p.q, p.qd / (2 * np.pi))
    assert np.max(np.abs(radii - 1.0)) < 0.05


def test_portrait_needs_three_ticks():
    with pytest.raises(ConfigError):
        phase_portrait(np.array([0.0, 1.0]), control_rate=10.0)


def test_portrait_from_trace_joint_column():
    cfg = gait_scene_config(point_count=128, episode_steps=40)
    trace = simulate_episode(cfg)
    p = phase_portrait(trace, joint=3)
    np.testing.assert_array_equal(p.q, trace.joint_positions[:, 3])
    assert p.joint == 3
    assert len(p.qd) == len(trace)


# ---------------------------------------------------------------------------
# Poincaré crossings
# ---------------------------------------------------------------------------

def test_circle_crossings_coincide_with_zero_dispersion():
    pts = circle_points(1.0, revolutions=4)
    res = poincare_crossings(pts, PLUS_Q_AXIS)
    assert res.coords.shape[0] == 4
    np.testing.assert_array_equal(res.coords, np.ones(4))
    assert res.dispersion == 0.0


def test_two_concentric_circles_std_half():
    pts = np.vstack([circle_points(1.0), circle_points(2.0)])
    res = poincare_crossings(pts, PLUS_Q_AXIS)
    assert sorted(res.coords.tolist()) == [1.0, 2.0]
    assert res.dispersion == 0.5


def test_no_crossings_yields_empty_with_null_dispersion():
    pts = circle_points(1.0) + np.array([10.0, 10.0])  # far from the section
    res = poincare_crossings(pts, PLUS_Q_AXIS)
    assert res.points.shape == (0, 2)
    assert res.coords.shape == (0,)
    assert res.dispersion is None


def test_single_crossing_has_zero_dispersion():
    pts = np.array([[1.0, -0.5], [1.0, 0.5]])
    res = poincare_crossings(pts, PLUS_Q_AXIS)
    assert res.coords.shape[0] == 1
    assert res.dispersion == 0.0


def test_closed_loops_cross_even_number_of_times_counting_both():
    rng = np.random.default_rng(0)
    theta = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    for _ in range(20):
        r = 1.0 + 0.3 * np.sin(3 * theta + rng.uniform(0, 2 * np.pi))
        pts = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        pts = np.vstack([pts, pts[:1]])  # close the loop
        section = PoincareSection(anchor=rng.normal(size=2) * 0.3,
                                  normal=rng.normal(size=2), direction="both")
        res = poincare_crossings(pts, section)
        assert res.coords.shape[0] % 2 == 0


def test_crossings_lie_on_the_section_line():
    rng = np.random.default_rng(1)
    t = np.linspace(0, 40 * np.pi, 5000)
    pts = np.column_stack([np.cos(t) * (1 + 0.2 * np.sin(0.3 * t)),
                           np.sin(t) * (1 + 0.2 * np.cos(0.41 * t))])
    for _ in range(10):
        section = PoincareSection(anchor=rng.normal(size=2) * 0.2,
                                  normal=rng.normal(size=2), direction="both")
        res = poincare_crossings(pts, section)
        assert res.coords.size > 0
        offsets = (res.points - section.anchor) @ section.normal
        assert np.max(np.abs(offsets)) < 1e-9


def test_dispersion_invariant_under_rigid_translation():
    rng = np.random.default_rng(2)
    pts = np.vstack([circle_points(1.0, 3), circle_points(1.7, 3)])
    base = poincare_crossings(pts, PLUS_Q_AXIS)
    for _ in range(10):
        shift = rng.normal(size=2) * 5
        moved = PoincareSection(anchor=PLUS_Q_AXIS.anchor + shift,
                                normal=PLUS_Q_AXIS.normal, direction="positive")
        res = poincare_crossings(pts + shift, moved)
        assert res.dispersion == pytest.approx(base.dispersion, rel=1e-9, abs=1e-12)


def test_direction_filtering():
    pts = circle_points(1.0, revolutions=2)
    both = poincare_crossings(pts, PoincareSection(np.zeros(2), [0.0, 1.0], "both"))
    neg = poincare_crossings(pts, PoincareSection(np.zeros(2), [0.0, 1.0], "negative"))
    assert both.coords.shape[0] == 4   # two per revolution
    assert neg.coords.shape[0] == 2
    np.testing.assert_allclose(neg.coords, [-1.0, -1.0], atol=1e-9)


def test_default_section_counts_cycles_of_a_sine():
    t = np.arange(400) / 20.0
    q = np.sin(2 * np.pi * (t + 0.3) / 2.0)  # 2 s period -> 10 cycles in 20 s
    p = phase_portrait(q, control_rate=20.0)
    res = poincare_crossings(p, default_section(p))
    assert res.coords.shape[0] == 10


def test_section_validation():
    with pytest.raises(ConfigError):
        PoincareSection(anchor=np.zeros(2), normal=np.zeros(2))
    with pytest.raises(ConfigError):
        PoincareSection(anchor=np.zeros(2), normal=np.array([1.0, 0.0]), direction="up")


# ---------------------------------------------------------------------------
# utilities
# ---------------------------------------------------------------------------

def test_dominant_period_on_known_signal():
    t = np.arange(600)
    assert dominant_period(np.sin(2 * np.pi * t / 30)) == 30
    assert dominant_period(np.ones(100)) is None


def test_plot_portrait_writes_svg(tmp_path):
    t = np.arange(100) / 20.0
    p = phase_portrait(np.sin(2 * np.pi * t), control_rate=20.0)
    res = poincare_crossings(p, default_section(p))
    path = tmp_path / "portrait.svg"
    plot_portrait(p, res, default_section(p), path)
    assert path.exists() and path.stat().st_size > 0
