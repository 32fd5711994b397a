"""Streaming binarization of raw tactile channels, real-device style.

Raw magnetometer streams carry too much hysteresis for direct level
thresholding, so each channel thresholds the *time derivative* of the
signal instead: two ring buffers track the recent samples ("current",
length C) and the samples just before them ("history", length H). When
``mean(current) - mean(history)`` exceeds the channel threshold the output
is +1 (or -1 for the opposite sign, 0 otherwise); the z axis reports
positive onsets only, clamping to {0, 1}. Outputs stay 0 until both
buffers have filled (the first H + C - 1 outputs).

Buffer means are ordered chronological sums divided by length, so a
streamed ring-buffer evaluation and a vectorized whole-stream evaluation
produce bit-identical results.

The device samples faster (default 78 Hz) than a policy consumes (default
20 Hz); :func:`resample` bridges the rates by latest-value hold on exact
output-tick multiples.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

AXES = ("x", "y", "z")


@dataclass(frozen=True)
class AxisConfig:
    """Per-axis buffer lengths (samples) and derivative threshold (raw units)."""

    history_len: int = 12
    current_len: int = 4
    threshold: float = 0.05

    def __post_init__(self):
        if self.history_len < 1 or self.current_len < 1:
            raise ConfigError(
                f"buffer lengths must be >= 1, got history={self.history_len} "
                f"current={self.current_len}"
            )
        if not self.threshold > 0.0:
            raise ConfigError(f"threshold must be > 0, got {self.threshold}")


@dataclass(frozen=True)
class BinarizerConfig:
    """Per-axis buffer/threshold tuning plus stream rates in Hz."""

    x: AxisConfig = field(default_factory=AxisConfig)
    y: AxisConfig = field(default_factory=AxisConfig)
    z: AxisConfig = field(default_factory=AxisConfig)
    sample_rate: float = 78.0
    output_rate: float = 20.0

    def __post_init__(self):
        if not (self.sample_rate > 0 and self.output_rate > 0):
            raise ConfigError("rates must be positive")
        if self.sample_rate < self.output_rate:
            raise ConfigError(
                f"sample_rate {self.sample_rate} must be >= output_rate {self.output_rate}"
            )

    def axis(self, i):
        return (self.x, self.y, self.z)[i]


class _AxisGroup:
    """Ring-buffer state for all channels of one axis (shared lengths)."""

    def __init__(self, cfg, n_channels, clamp_binary):
        self.cfg = cfg
        self.n = n_channels
        self.clamp_binary = clamp_binary
        self.hist = np.zeros((n_channels, cfg.history_len))
        self.cur = np.zeros((n_channels, cfg.current_len))
        self.count = np.zeros(n_channels, dtype=np.int64)
        self.last_out = np.zeros(n_channels, dtype=np.int8)
        self.error = np.zeros(n_channels, dtype=bool)

    @staticmethod
    def _ordered_mean(windows):
        # chronological left-to-right sum / length: bit-stable reduction
        return windows.cumsum(axis=-1)[:, -1] / windows.shape[-1]

    def push(self, samples):
        H, C = self.cfg.history_len, self.cfg.current_len
        s = np.asarray(samples, dtype=float).reshape(self.n)
        ok = np.isfinite(s)
        self.error |= ~ok
        ch = np.flatnonzero(ok)
        if ch.size:
            cnt = self.count[ch]
            full = cnt >= C
            if np.any(full):
                fch = ch[full]
                fcnt = cnt[full]
                evicted = self.cur[fch, fcnt % C]
                self.hist[fch, (fcnt - C) % H] = evicted
            self.cur[ch, cnt % C] = s[ch]
            self.count[ch] = cnt + 1

        out = self.last_out.copy()  # held for rejected channels
        out[ch] = 0
        ready = ch[self.count[ch] >= H + C]
        if ready.size:
            cnt = self.count[ready]
            cur_idx = (cnt[:, None] + np.arange(C)[None, :]) % C
            hist_idx = ((cnt - C)[:, None] + np.arange(H)[None, :]) % H
            cur_mean = self._ordered_mean(self.cur[ready[:, None], cur_idx])
            hist_mean = self._ordered_mean(self.hist[ready[:, None], hist_idx])
            diff = cur_mean - hist_mean
            if self.clamp_binary:
                val = (diff > self.cfg.threshold).astype(np.int8)
            else:
                val = np.where(np.abs(diff) > self.cfg.threshold,
                               np.sign(diff), 0).astype(np.int8)
            out[ready] = val
        self.last_out = out
        return out


class Binarizer:
    """Dual-buffer derivative binarizer for ``n_taxels`` x 3-axis channels.

    Each channel's state depends only on the samples it has been fed (a
    single writer per channel); ``push`` consumes one (n_taxels, 3) sample
    frame and returns the (n_taxels, 3) ternary output, with z in {0, 1}.
    Non-finite samples are rejected per channel: the previous output is held
    and the channel's error flag set (see :attr:`error_flags`).
    """

    def __init__(self, config=None, n_taxels=16):
        self.config = config or BinarizerConfig()
        self.n_taxels = n_taxels
        self._groups = [
            _AxisGroup(self.config.axis(i), n_taxels, clamp_binary=(i == 2))
            for i in range(3)
        ]

    def push(self, samples):
        s = np.asarray(samples, dtype=float).reshape(self.n_taxels, 3)
        out = np.empty((self.n_taxels, 3), dtype=np.int8)
        for i, g in enumerate(self._groups):
            out[:, i] = g.push(s[:, i])
        return out

    def process(self, stream):
        """Push a whole (K, n_taxels, 3) stream; returns (K, n_taxels, 3) int8."""
        stream = np.asarray(stream, dtype=float)
        return np.stack([self.push(frame) for frame in stream])

    @property
    def error_flags(self):
        """(n_taxels, 3) bool: channels that have rejected a sample."""
        return np.stack([g.error for g in self._groups], axis=1)

    @property
    def sample_counts(self):
        """(n_taxels, 3) int: accepted samples per channel."""
        return np.stack([g.count for g in self._groups], axis=1)


# ---------------------------------------------------------------------------
# rate bridging
# ---------------------------------------------------------------------------

def resample(values, in_rate, out_rate, return_times=False):
    """Latest-value hold from a uniform stream (t0 = 0) onto output ticks.

    Output tick k sits at the exact multiple k / out_rate and takes the value
    of the most recent input sample at or before it. Integer rates use exact
    integer arithmetic for the tick -> sample mapping.
    """
    v = np.asarray(values)
    if v.shape[0] == 0:
        return (np.empty(0), v) if return_times else v
    n = v.shape[0]
    if float(in_rate).is_integer() and float(out_rate).is_integer():
        ir, orr = int(in_rate), int(out_rate)
        k_max = (n - 1) * orr // ir
        k = np.arange(k_max + 1)
        idx = k * ir // orr
    else:
        k_max = int(np.floor((n - 1) * out_rate / in_rate + 1e-9))
        k = np.arange(k_max + 1)
        idx = np.floor(k * in_rate / out_rate + 1e-9).astype(np.int64)
    out = v[idx]
    if return_times:
        return k / float(out_rate), out
    return out


def resample_timestamped(times, values, out_rate):
    """Latest-value hold from a timestamped stream onto k / out_rate ticks.

    Ticks cover [first, last] sample time; values equal to a tick time
    (within 1e-12 s) count as arrived.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values)
    if t.shape[0] == 0:
        return np.empty(0), v
    k0 = int(np.ceil(t[0] * out_rate - 1e-9))
    k1 = int(np.floor(t[-1] * out_rate + 1e-9))
    ticks = np.arange(k0, k1 + 1) / float(out_rate)
    idx = np.searchsorted(t, ticks + 1e-12, side="right") - 1
    return ticks, v[idx]


# ---------------------------------------------------------------------------
# raw-log CSV processing (t, taxel_id, bx, by, bz)
# ---------------------------------------------------------------------------

RAW_CSV_FIELDS = ["t", "taxel_id", "bx", "by", "bz"]


def read_raw_csv(path):
    """Read a raw log; returns {taxel_id: (times (K,), values (K, 3))}."""
    per_taxel = {}
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != RAW_CSV_FIELDS:
            raise ConfigError(f"unexpected raw CSV header in {path}: {reader.fieldnames}")
        for row in reader:
            tid = int(row["taxel_id"])
            per_taxel.setdefault(tid, []).append(
                (float(row["t"]), float(row["bx"]), float(row["by"]), float(row["bz"]))
            )
    out = {}
    for tid, rows in per_taxel.items():
        arr = np.array(rows)
        out[tid] = (arr[:, 0], arr[:, 1:4])
    return out


def binarize_log(path, out_path, config=None):
    """Binarize a recorded raw log and bridge it to the output rate.

    Reads the raw CSV schema, streams each taxel's channels through a
    :class:`Binarizer`, holds the latest value onto exact output-rate ticks
    and writes the signal-trace CSV schema (raw columns = held raw inputs,
    ternary columns = held binarized outputs).
    """
    from .sensor import write_trace_csv

    config = config or BinarizerConfig()
    streams = read_raw_csv(path)
    taxel_ids = sorted(streams)
    ticks_ref = None
    raw_held, tern_held = [], []
    for tid in taxel_ids:
        times, values = streams[tid]
        b = Binarizer(config, n_taxels=1)
        tern = np.stack([b.push(frame[None, :])[0] for frame in values])
        ticks, raw_h = resample_timestamped(times, values, config.output_rate)
        _, tern_h = resample_timestamped(times, tern, config.output_rate)
        if ticks_ref is None:
            ticks_ref = ticks
        elif len(ticks) != len(ticks_ref) or not np.allclose(ticks, ticks_ref):
            raise ConfigError("taxel streams cover different time spans; cannot merge")
        raw_held.append(raw_h)
        tern_held.append(tern_h)
    raw = np.stack(raw_held, axis=1)       # (K, T, 3)
    tern = np.stack(tern_held, axis=1)
    write_trace_csv(out_path, ticks_ref, raw, tern, taxel_ids=taxel_ids)
    return ticks_ref, np.array(taxel_ids), raw, tern
