"""Command-line front end.

Subcommands:
  capacity        mean MIMO/SISO capacity per placement case (or channel file)
  fer             Monte Carlo FER/BER per MCS index
  sweep-distance  capacity vs front-of-body Tx-Rx distance, with the
                  5 bits/s/Hz crossing reported in a trailing comment
  gen-channel     synthesize a channel realization and write it as CSV

All outputs are CSV with '#' metadata comments (seed, config hash) and are
byte-identical across repeated runs of the same configuration.  Exit codes:
0 success, 1 configuration error, 2 runtime/data error.
"""

from __future__ import annotations

import argparse
import sys

from . import fer as fer_mod
from .channel import (ChannelFileError, UnknownCaseError, geometry_for_case,
                      load_channel_file, pairwise_distances, save_channel_file,
                      synthesize_channel)
from .capacity import siso_capacity, total_capacity
from .config import ConfigError, RunConfig, load_config
from .phy import mcs_table
from .units import linear_to_db, throughput_mbps

CAPACITY_THRESHOLD_BPS_HZ = 5.0


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _write_csv(out_path, comments, header, rows, trailing_comments=()):
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    lines.extend(f"# {c}" for c in trailing_comments)
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _meta(cfg: RunConfig) -> list[str]:
    return [f"seed={cfg.get('sim', 'seed')}", f"config_hash={cfg.config_hash()}"]


def cmd_capacity(cfg: RunConfig) -> None:
    header = ["case", "label", "distance_mm", "realizations",
              "mimo_bps_hz", "mimo_ci_low", "mimo_ci_high",
              "siso_bps_hz", "siso_ci_low", "siso_ci_high",
              "mimo_mbps", "siso_mbps"]
    bw = cfg.get("budget", "bandwidth_mhz") * 1e6
    rows = []
    channel_file = cfg.get("run", "channel_file")
    if channel_file:
        n_data = cfg.get("budget", "n_data")
        mimo = siso = None
        try:
            ch = load_channel_file(channel_file, n_data, 2)
            mimo = total_capacity(ch, cfg.budget(2)).total_bps_hz
        except ChannelFileError:
            ch = load_channel_file(channel_file, n_data, 1)
            siso = total_capacity(ch, cfg.budget(1)).total_bps_hz
        rows.append(["file", channel_file, None, 1,
                     mimo, None, None, siso, None, None,
                     mimo and throughput_mbps(mimo, bw), siso and throughput_mbps(siso, bw)])
    else:
        layouts = [geometry_for_case(c) for c in cfg.get("run", "cases")]
        points = fer_mod.sweep_capacity(
            layouts, cfg.path_model(), cfg.budget(2),
            n_realizations=cfg.get("sim", "capacity_realizations"),
            base_seed=cfg.get("sim", "seed"))
        for p in points:
            rows.append([p.case_id, p.label, p.distance_mm, p.realizations,
                         p.mimo_bps_hz, p.mimo_ci95[0], p.mimo_ci95[1],
                         p.siso_bps_hz, p.siso_ci95[0], p.siso_ci95[1],
                         throughput_mbps(p.mimo_bps_hz, bw),
                         throughput_mbps(p.siso_bps_hz, bw)])
    _write_csv(cfg.get("run", "out"), _meta(cfg), header, rows)


def _fer_plan(cfg: RunConfig, mcs_index: int) -> fer_mod.SimulationPlan:
    mcs = mcs_table(mcs_index)
    budget = cfg.budget(mcs.n_streams)
    channel_file = cfg.get("run", "channel_file")
    if channel_file:
        source = fer_mod.FixedSource.from_file(channel_file, budget)
    else:
        cases = cfg.get("run", "cases")
        source = fer_mod.SyntheticSource(geometry_for_case(cases[0]), cfg.path_model())
    return fer_mod.SimulationPlan(
        mcs_index=mcs_index,
        budget=budget,
        channel_source=source,
        detector=cfg.get("sim", "detector"),
        frame_length_bytes=cfg.get("sim", "frame_length_bytes"),
        max_frames=cfg.get("sim", "max_frames"),
        min_error_frames=cfg.get("sim", "min_error_frames"),
        base_seed=cfg.get("sim", "seed"),
    )


def cmd_fer(cfg: RunConfig, workers: int = 1) -> None:
    header = ["mode", "mcs", "snr_db", "frames", "frame_errors", "fer",
              "ci_low", "ci_high", "bits", "bit_errors", "ber", "error"]
    rows = []
    diag = cfg.get("sim", "uncoded_bpsk_snr_db")
    if diag:
        n_bits = 8 * cfg.get("sim", "frame_length_bytes") * cfg.get("sim", "max_frames")
        for snr_db in diag:
            st = fer_mod.uncoded_bpsk_ber(float(snr_db), n_bits, seed=cfg.get("sim", "seed"))
            rows.append(["uncoded-bpsk", None, float(snr_db), None, None, None,
                         st.ci95[0], st.ci95[1], st.bits_sent, st.bit_errors, st.ber, None])
    else:
        points = fer_mod.sweep_fer(cfg.get("sim", "mcs"),
                                   lambda i: _fer_plan(cfg, i), workers=workers)
        for p in points:
            if p.stats is None:
                rows.append(["coded", p.mcs_index] + [None] * 9 + [p.error])
                continue
            st = p.stats
            rows.append(["coded", p.mcs_index, None, st.frames_sent, st.frame_errors,
                         st.fer, st.ci95[0], st.ci95[1], st.bits_sent, st.bit_errors,
                         st.ber, None])
    _write_csv(cfg.get("run", "out"), _meta(cfg), header, rows)


def cmd_sweep_distance(cfg: RunConfig) -> None:
    header = ["distance_mm", "realizations",
              "mimo_bps_hz", "mimo_ci_low", "mimo_ci_high",
              "siso_bps_hz", "siso_ci_low", "siso_ci_high"]
    distances = cfg.get("run", "distances_mm")
    points = fer_mod.sweep_distance(
        distances, cfg.path_model(), cfg.budget(2),
        n_realizations=cfg.get("sim", "capacity_realizations"),
        base_seed=cfg.get("sim", "seed"))
    rows = [[p.distance_mm, p.realizations,
             p.mimo_bps_hz, p.mimo_ci95[0], p.mimo_ci95[1],
             p.siso_bps_hz, p.siso_ci95[0], p.siso_ci95[1]] for p in points]
    trailing = []
    if len(points) > 1:
        bw = cfg.get("budget", "bandwidth_mhz") * 1e6
        mbps = throughput_mbps(CAPACITY_THRESHOLD_BPS_HZ, bw)
        xd = fer_mod.crossing_distance(points, CAPACITY_THRESHOLD_BPS_HZ)
        if xd is not None:
            trailing.append(
                f"crossing: mimo capacity {_fmt(CAPACITY_THRESHOLD_BPS_HZ)} bits/s/Hz "
                f"({_fmt(mbps)} Mbps at {_fmt(bw / 1e6)} MHz) at distance "
                f"{_fmt(xd)} mm")
    _write_csv(cfg.get("run", "out"), _meta(cfg), header, rows, trailing)


def cmd_gen_channel(cfg: RunConfig, n_streams: int = 2) -> None:
    out = cfg.get("run", "out")
    if not out:
        raise ConfigError("gen-channel requires an output path (--out)")
    cases = cfg.get("run", "cases")
    layout = geometry_for_case(cases[0])
    budget = cfg.budget(n_streams)
    ch = synthesize_channel(layout, cfg.path_model(), budget, seed=cfg.get("sim", "seed"))
    save_channel_file(ch, out)
    gains = (abs(ch.matrices) ** 2).mean(axis=0)
    dists = pairwise_distances(layout)[0] if n_streams == 2 else [[layout.siso_distance_mm]]
    print(f"wrote {out}: case {layout.case_id} ({layout.label}), "
          f"{ch.n_data} subcarriers, {n_streams}x{n_streams}")
    for i in range(n_streams):
        for j in range(n_streams):
            print(f"  rx{i + 1}<-tx{j + 1}: {dists[i][j]:.2f} mm, "
                  f"mean gain {linear_to_db(float(gains[i, j])):.2f} dB")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="invivolink",
                             description="In-body MIMO/SISO link simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("capacity", "mean MIMO/SISO capacity per placement case"),
        ("fer", "Monte Carlo frame error rate per MCS"),
        ("sweep-distance", "capacity vs Tx-Rx distance"),
        ("gen-channel", "synthesize and save a channel realization"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="YAML configuration file")
        p.add_argument("--case", type=_int_list, metavar="N[,N...]",
                       help="placement case ids (1..8)")
        p.add_argument("--mcs", type=_int_list, metavar="N[,N...]",
                       help="MCS indices (0..15)")
        p.add_argument("--seed", type=int, metavar="N")
        p.add_argument("--frames", type=int, metavar="N", help="max frames per point")
        p.add_argument("--out", metavar="PATH", help="output CSV path (default stdout)")
        p.add_argument("--detector", choices=["zf", "mmse"])
        p.add_argument("--channel-file", metavar="PATH")
        p.add_argument("--workers", type=int, default=1,
                       help="worker processes for FER (does not affect results)")
        if name == "gen-channel":
            p.add_argument("--siso", action="store_true",
                           help="write a 1x1 (SISO) channel file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args.config, overrides={
            "run.cases": args.case,
            "sim.mcs": args.mcs,
            "sim.seed": args.seed,
            "sim.max_frames": args.frames,
            "run.out": args.out,
            "sim.detector": args.detector,
            "run.channel_file": args.channel_file,
        })
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "capacity":
            cmd_capacity(cfg)
        elif args.command == "fer":
            cmd_fer(cfg, workers=args.workers)
        elif args.command == "sweep-distance":
            cmd_sweep_distance(cfg)
        elif args.command == "gen-channel":
            cmd_gen_channel(cfg, n_streams=1 if args.siso else 2)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ChannelFileError, UnknownCaseError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
