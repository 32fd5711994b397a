"""Dense vs. sparse taxel traces: skin model against a collision-only baseline.

Runs the same periodic-gait episode through the full skin model (membership
within the extended sensing range, velocity-weighted shear) and through the
collision-geometry-only baseline, then rasters the ternary outputs. The
skin model produces dense periodic activations; the baseline only fires on
deep penetration and carries no shear direction.
"""

from dataclasses import replace
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from taxelsim.scene import PeriodicGait, SceneConfig, simulate_episode
from taxelsim.geometry import ObjectState, quat_from_axis_angle
from taxelsim.sensor import write_trace_csv

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

state = ObjectState(position=np.array([-0.02, 0.0, 0.0655]),
                    orientation=quat_from_axis_angle([1, 0, 0], -np.pi / 2))
script = PeriodicGait(amplitude=np.array([0.01, 0.0, 0.02]), period=2.0,
                      transport=np.array([0.001, 0.0, 0.0]), phase=np.zeros(3))
cfg = replace(SceneConfig.default(point_count=2048), initial_state=state, script=script)

skin = simulate_episode(cfg)
baseline = simulate_episode(replace(cfg, sensor_mode="collision_baseline"))

fig, axes = plt.subplots(2, 2, figsize=(11, 6), sharex=True, sharey=True)
for row, (trace, label) in enumerate([(skin, "skin model"),
                                      (baseline, "collision-geometry baseline")]):
    for col, (axis, name) in enumerate([(0, "shear x"), (2, "normal z")]):
        ax = axes[row, col]
        ax.imshow(trace.ternary_signals[:, :, axis].T, aspect="auto",
                  cmap="coolwarm", vmin=-1, vmax=1, interpolation="nearest",
                  extent=[trace.times[0], trace.times[-1], 15.5, -0.5])
        ax.set_title(f"{label}: {name}")
        if col == 0:
            ax.set_ylabel("taxel")
        if row == 1:
            ax.set_xlabel("time (s)")
fig.tight_layout()
fig.savefig(OUT / "dense_vs_sparse.png", dpi=120)

duty_skin = np.abs(skin.ternary_signals[..., 0]).mean()
duty_base = np.abs(baseline.ternary_signals[..., 0]).mean()
print(f"mean shear duty: skin {duty_skin:.3f}, baseline {duty_base:.3f} "
      f"(ratio {duty_base / duty_skin:.2f})")

write_trace_csv(OUT / "skin_trace.csv", skin.times, skin.raw_signals,
                skin.ternary_signals, skin.taxel_ids)
print(f"figures and CSV -> {OUT}")
