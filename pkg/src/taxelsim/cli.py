"""Command line entry points.

Subcommands: simulate (episodes -> JSONL traces), bench (throughput),
reward / metrics (trace evaluation), analyze (phase portrait + Poincaré
crossings), binarize (raw CSV logs -> ternary CSV). Lengths in config files
are meters; distances reported by `metrics` are centimeters.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, binarizer, reward, scene
from .sensor import write_trace_csv


def _cmd_simulate(args):
    if args.config:
        with open(args.config) as f:
            cfg = scene.scene_config_from_dict(json.load(f))
    else:
        cfg = scene.SceneConfig.default()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = scene.run_episodes(cfg, args.episodes, seed=args.seed)
    for trace, meta in results:
        stem = out / f"episode_{meta['episode']:03d}"
        trace.save_jsonl(f"{stem}.jsonl")
        with open(f"{stem}.meta.json", "w") as f:
            json.dump(meta, f, indent=1)
        if args.trace_csv:
            write_trace_csv(f"{stem}.csv", trace.times, trace.raw_signals,
                            trace.ternary_signals, trace.taxel_ids)
        status = "dropped" if trace.dropped else "completed"
        print(f"episode {meta['episode']}: {len(trace)} ticks, scale "
              f"{meta['scale']:.3f}, {status} -> {stem}.jsonl")
    return 0


def _cmd_bench(args):
    from . import batch
    stats = batch.benchmark(n_envs=args.envs, n_steps=args.steps,
                            n_points=args.points, seed=args.seed)
    print(f"{stats['envs']} envs x {stats['steps']} steps "
          f"({stats['points']} points, {stats['taxels']} taxels): "
          f"{stats['elapsed_s']:.3f} s")
    print(f"ticks/sec:            {stats['ticks_per_sec']:,.0f}")
    print(f"taxel evals/sec:      {stats['taxel_evals_per_sec']:,.0f}")
    return 0


def _reward_config(args):
    cfg = {}
    if args.config:
        with open(args.config) as f:
            cfg = json.load(f)
    kwargs = {}
    if "scales" in cfg:
        kwargs["scales"] = {k: float(v) for k, v in cfg["scales"].items()}
    for key in ("goal_x", "epsilon", "x_threshold", "mu"):
        if key in cfg:
            kwargs[key] = cfg[key]
    if "q_init" in cfg:
        kwargs["q_init"] = np.asarray(cfg["q_init"], dtype=float)
    if "end_offset" in cfg:
        kwargs["end_offset"] = np.asarray(cfg["end_offset"], dtype=float)
    kwargs["abs_scales"] = bool(cfg.get("abs_scales", args.abs_scales))
    return reward.RewardConfig(**kwargs)


def _cmd_reward(args):
    trace = scene.EpisodeTrace.load_jsonl(args.trace)
    cfg = _reward_config(args)
    total, breakdowns = reward.episode_return(trace, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "reward_breakdown.csv"
    with open(csv_path, "w") as f:
        f.write("t," + ",".join(reward.TERMS) + ",total\n")
        for t, b in zip(trace.times, breakdowns):
            cells = [repr(float(t))] + [repr(b.scaled[term]) for term in reward.TERMS]
            f.write(",".join(cells) + f",{b.total!r}\n")
    summary = {
        "ticks": len(trace),
        "return": total,
        "per_term_sums": {term: sum(b.scaled[term] for b in breakdowns)
                          for term in reward.TERMS},
        "warnings": sorted({w for b in breakdowns for w in b.warnings}),
    }
    with open(out / "reward_summary.json", "w") as f:
        json.dump(summary, f, indent=1)
    print(json.dumps(summary, indent=1))
    return 0


def _cmd_metrics(args):
    trace = scene.EpisodeTrace.load_jsonl(args.trace)
    m = reward.compute_metrics(trace, axis=args.axis, timeout_s=args.timeout)
    doc = {"success": m.success, "max_distance_cm": m.max_distance_cm,
           "avg_velocity_cmps": m.avg_velocity_cmps,
           "time_to_first_motion_s": m.time_to_first_motion_s}
    print(json.dumps(doc, indent=1))
    if args.out:
        with open(args.out, "w") as f:
            json.dump(doc, f, indent=1)
    return 0


def _cmd_analyze(args):
    trace = scene.EpisodeTrace.load_jsonl(args.trace)
    portrait = analysis.phase_portrait(trace, joint=args.joint)
    if args.section == "auto":
        section = analysis.default_section(portrait)
    else:
        qv, qdv = (float(x) for x in args.section.split(","))
        section = analysis.PoincareSection(anchor=np.array([qv, qdv]),
                                           normal=np.array([1.0, 0.0]),
                                           direction=args.direction)
    crossings = analysis.poincare_crossings(portrait, section)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"crossings_joint{args.joint}.csv", "w") as f:
        f.write("q,qd,coord\n")
        for p, c in zip(crossings.points, crossings.coords):
            f.write(f"{p[0]!r},{p[1]!r},{c!r}\n")
    summary = {"joint": args.joint, "crossings": int(crossings.coords.shape[0]),
               "dispersion": crossings.dispersion,
               "section_anchor": section.anchor.tolist(),
               "section_normal": section.normal.tolist(),
               "direction": section.direction}
    with open(out / f"dispersion_joint{args.joint}.json", "w") as f:
        json.dump(summary, f, indent=1)
    print(json.dumps(summary, indent=1))
    if args.plot:
        analysis.plot_portrait(portrait, crossings, section, args.plot)
        print(f"portrait plot -> {args.plot}")
    return 0


def _cmd_binarize(args):
    axis_cfgs = {}
    for axis, thr in (("x", args.threshold_x), ("y", args.threshold_y),
                      ("z", args.threshold_z)):
        axis_cfgs[axis] = binarizer.AxisConfig(
            history_len=args.history_len, current_len=args.current_len, threshold=thr)
    cfg = binarizer.BinarizerConfig(sample_rate=args.in_rate, output_rate=args.out_rate,
                                    **axis_cfgs)
    ticks, taxel_ids, _, _ = binarizer.binarize_log(args.infile, args.out, cfg)
    print(f"{args.infile} -> {args.out}: {len(taxel_ids)} taxels, "
          f"{len(ticks)} ticks at {args.out_rate} Hz")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="taxelsim",
                                description="taxel-grid tactile skin simulator")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="roll out scripted episodes to JSONL traces")
    s.add_argument("--config", help="scene config JSON (omit for the canonical scene)")
    s.add_argument("--episodes", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--trace-csv", action="store_true",
                   help="also write per-episode signal CSVs")
    s.set_defaults(func=_cmd_simulate)

    s = sub.add_parser("bench", help="batched signal-evaluation throughput")
    s.add_argument("--envs", type=int, default=1024)
    s.add_argument("--steps", type=int, default=20)
    s.add_argument("--points", type=int, default=512)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=_cmd_bench)

    s = sub.add_parser("reward", help="per-tick reward breakdown for a trace")
    s.add_argument("--trace", required=True)
    s.add_argument("--config", help="reward config JSON")
    s.add_argument("--abs-scales", action="store_true",
                   help="use |scale| for every term")
    s.add_argument("--out", default="reward_out")
    s.set_defaults(func=_cmd_reward)

    s = sub.add_parser("metrics", help="success/distance/velocity metrics")
    s.add_argument("--trace", required=True)
    s.add_argument("--axis", default="x")
    s.add_argument("--timeout", type=float, default=120.0)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_metrics)

    s = sub.add_parser("analyze", help="phase portrait + Poincaré crossings")
    s.add_argument("--trace", required=True)
    s.add_argument("--joint", type=int, default=0)
    s.add_argument("--section", default="auto",
                   help='"auto" or "q,qd" anchor of a vertical section')
    s.add_argument("--direction", default="positive",
                   choices=["positive", "negative", "both"])
    s.add_argument("--plot", help="optional SVG/PNG path for the portrait")
    s.add_argument("--out", default="analysis_out")
    s.set_defaults(func=_cmd_analyze)

    s = sub.add_parser("binarize", help="binarize a raw CSV log (t,taxel_id,bx,by,bz)")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--history-len", type=int, default=12)
    s.add_argument("--current-len", type=int, default=4)
    s.add_argument("--threshold-x", type=float, default=0.05)
    s.add_argument("--threshold-y", type=float, default=0.05)
    s.add_argument("--threshold-z", type=float, default=0.05)
    s.add_argument("--in-rate", type=float, default=78.0)
    s.add_argument("--out-rate", type=float, default=20.0)
    s.set_defaults(func=_cmd_binarize)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
