"""Shared fixture builders for the test suite."""

from dataclasses import replace

import numpy as np

from taxelsim.geometry import ObjectState, quat_from_axis_angle
from taxelsim.scene import PeriodicGait, SceneConfig

GAIT_PERIOD_S = 2.0


def gait_scene_config(point_count=1024, **overrides):
    """Periodic-gait episode over the canonical cylinder: the vertical stroke
    cycles contact within the sensing range but only grazes the collision
    radius, so the skin model stays dense while the collision-geometry
    baseline goes sparse on the same script."""
    state = ObjectState(position=np.array([-0.02, 0.0, 0.0655]),
                        orientation=quat_from_axis_angle([1, 0, 0], -np.pi / 2))
    script = PeriodicGait(amplitude=np.array([0.01, 0.0, 0.02]), period=GAIT_PERIOD_S,
                          transport=np.array([0.001, 0.0, 0.0]),
                          phase=np.zeros(3))
    cfg = SceneConfig.default(point_count=point_count)
    return replace(cfg, initial_state=state, script=script, **overrides)
