"""taxelsim: magnetometer-grid tactile skin simulation.

Penetration-based 3-axis taxel signals with ternary thresholding, a
real-device-style streaming binarizer, scripted kinematic episodes, oracle
reward/metrics evaluation, and Poincaré gait analysis.
"""

from .errors import ConfigError, InvalidModelError, InvalidStateError, TaxelSimError
from .geometry import (
    ObjectModel,
    ObjectState,
    PenetrationResult,
    TaxelGrid,
    TaxelSpec,
    load_grid,
    load_object,
    penetrations,
    penetrations_batched,
    save_grid,
    save_object,
    transform_points,
)
from .sensor import (
    Modality,
    ThresholdConfig,
    calibrate_thresholds,
    grid_signals,
    raw_signal,
    threshold,
)
from .binarizer import AxisConfig, Binarizer, BinarizerConfig, resample
from .scene import (
    ConstantSlide,
    EpisodeTrace,
    PeriodicGait,
    SceneConfig,
    Waypoints,
    canonical_cylinder,
    make_box,
    make_composite,
    make_cylinder,
    make_hammer,
    run_episodes,
    simulate_episode,
    step,
)
from .reward import Metrics, RewardBreakdown, RewardConfig, TickSnapshot, compute_metrics, episode_return, reward_terms
from .analysis import PhasePortrait, PoincareSection, phase_portrait, poincare_crossings

__version__ = "0.1.0"

__all__ = [
    "AxisConfig", "Binarizer", "BinarizerConfig", "ConfigError", "ConstantSlide",
    "EpisodeTrace", "InvalidModelError", "InvalidStateError", "Metrics", "Modality",
    "ObjectModel", "ObjectState", "PenetrationResult", "PeriodicGait", "PhasePortrait",
    "PoincareSection", "RewardBreakdown", "RewardConfig", "SceneConfig", "TaxelGrid",
    "TaxelSimError", "TaxelSpec", "ThresholdConfig", "TickSnapshot", "Waypoints",
    "calibrate_thresholds", "canonical_cylinder", "compute_metrics", "episode_return",
    "grid_signals", "load_grid", "load_object", "make_box", "make_composite",
    "make_cylinder", "make_hammer", "penetrations", "penetrations_batched",
    "phase_portrait", "poincare_crossings", "raw_signal", "reward_terms",
    "resample", "run_episodes", "save_grid", "save_object", "simulate_episode",
    "step", "threshold", "transform_points",
]
