"""Streaming binarization of a drifting, hysteretic raw channel.

Level thresholding fails on a signal whose baseline wanders (hysteresis
after each touch); the dual-buffer derivative rule recovers clean onset and
release events. Also bridges the 78 Hz sensor stream down to 20 Hz ticks.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from taxelsim.binarizer import AxisConfig, Binarizer, BinarizerConfig, resample

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

rng = np.random.default_rng(3)
rate = 78.0
n = int(rate * 20)
t = np.arange(n) / rate

# synthetic raw channel: touch plateaus + post-release offsets that never
# return to the original baseline (hysteresis) + sensor noise + slow drift
x = np.zeros(n)
baseline = 0.0
for start, width, level in ((2.0, 1.5, 1.0), (6.0, 2.0, 0.8), (12.0, 1.0, 1.2),
                            (16.0, 2.5, 0.9)):
    on = (t >= start) & (t < start + width)
    x[on] += level
    baseline += 0.12 * level  # residual offset after release
    x[t >= start + width] += 0.12 * level
x += 0.05 * np.sin(0.13 * t) + rng.normal(scale=0.02, size=n)

axis = AxisConfig(history_len=12, current_len=4, threshold=0.05)
b = Binarizer(BinarizerConfig(x=axis, y=axis, z=axis), n_taxels=1)
tern = np.stack([b.push(np.array([[v, v, v]]))[0] for v in x])

times20, held = resample(tern[:, 0], 78, 20, return_times=True)

fig, axes = plt.subplots(3, 1, figsize=(9, 6), sharex=True)
axes[0].plot(t, x, lw=0.7)
axes[0].set_ylabel("raw")
axes[0].set_title("raw channel with hysteresis and drift")
axes[1].step(t, tern[:, 0], where="post", lw=0.9)
axes[1].set_ylabel("ternary (78 Hz)")
axes[1].set_ylim(-1.3, 1.3)
axes[2].step(times20, held, where="post", lw=0.9, color="tab:red")
axes[2].set_ylabel("ternary (20 Hz)")
axes[2].set_xlabel("time (s)")
fig.tight_layout()
fig.savefig(OUT / "binarizer_stream.png", dpi=120)

onsets = int(np.sum((tern[1:, 0] == 1) & (tern[:-1, 0] != 1)))
releases = int(np.sum((tern[1:, 0] == -1) & (tern[:-1, 0] != -1)))
print(f"detected {onsets} onset groups and {releases} release groups "
      f"across 4 touches -> {OUT / 'binarizer_stream.png'}")
