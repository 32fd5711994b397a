"""Episode rollouts, per-tick reward breakdown, and task metrics.

Rolls out a batch of randomly rescaled cylinders sliding toward a goal,
evaluates the per-tick reward terms against each episode's goal, and
reports the translation metrics per episode.
"""

from dataclasses import replace
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from taxelsim.geometry import ObjectState, quat_from_axis_angle
from taxelsim.reward import RewardConfig, compute_metrics, episode_return
from taxelsim.scene import ConstantSlide, SceneConfig, run_episodes

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

cfg = SceneConfig.default(point_count=1024)
cfg = replace(cfg,
              initial_state=ObjectState(position=np.array([-0.04, 0.0, 0.0325]),
                                        orientation=quat_from_axis_angle([1, 0, 0], -np.pi / 2)),
              script=ConstantSlide(v=np.array([0.002, 0.0, 0.0])),
              episode_steps=200)

episodes = run_episodes(cfg, episodes=4, seed=42, scale_range=(0.9, 1.1),
                        goal_span=(0.0, 0.03))

print(f"{'ep':>3} {'scale':>6} {'goal_x':>7} {'return':>10} "
      f"{'dist (cm)':>9} {'vel (cm/s)':>10}")
fig, ax = plt.subplots(figsize=(8, 4.5))
for trace, meta in episodes:
    rcfg = RewardConfig(goal_x=meta["goal_x"])
    total, breakdowns = episode_return(trace, rcfg)
    m = compute_metrics(trace, axis=cfg.desired_axis())
    dist = f"{m.max_distance_cm:.2f}" if m.success else "fail"
    vel = f"{m.avg_velocity_cmps:.3f}" if m.success else "fail"
    print(f"{meta['episode']:>3} {meta['scale']:>6.3f} {meta['goal_x']:>7.3f} "
          f"{total:>10.1f} {dist:>9} {vel:>10}")
    ax.plot(trace.times, np.cumsum([b.total for b in breakdowns]),
            label=f"episode {meta['episode']} (goal {meta['goal_x']:.3f})")

ax.set_xlabel("time (s)")
ax.set_ylabel("cumulative reward")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "episode_rewards.png", dpi=120)
print(f"cumulative reward plot -> {OUT / 'episode_rewards.png'}")
