"""Command-line surface: analyze, beats, meter, synth, plot.

Exit codes: 0 success, 2 input error, 3 degenerate analysis, 4 config error.
Config precedence: built-in defaults < JSON file (--config, else the
HARMO_CONFIG env var) < command-line flags.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import scipy.io.wavfile

from . import __version__
from .audio import detect_audio_beats, load_audio, onset_envelope
from .config import AnalysisConfig
from .harmony import HarmonyReport, evaluate_pair
from .meter import meter_report
from .motion import (detect_visual_beats, joint_velocity_sum, load_poses_csv,
                     load_poses_json, smooth_profile)
from .saliency import (apply_mask, audio_saliency_mask, visual_saliency_mask,
                       visual_saliency_transform)
from .synth import SynthSpec, gen_click_track, gen_motion_track

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_CONFIG = 4

CONFIG_ENV_VAR = "HARMO_CONFIG"

_INPUT_ERRORS = (OSError, ValueError, KeyError, json.JSONDecodeError)


class ConfigError(Exception):
    pass


def _atomic_write(path: str | Path, text: str) -> None:
    """Write-then-rename so concurrent readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.chmod(tmp, 0o644)  # mkstemp defaults to 0600
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: str | Path, doc: dict) -> None:
    _atomic_write(path, json.dumps(doc, indent=2) + "\n")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("analysis configuration")
    group.add_argument("--config", help="JSON config file (overrides HARMO_CONFIG)")
    group.add_argument("--lambda1", type=float, help="audio saliency threshold scale")
    group.add_argument("--lambda2", type=float, help="visual saliency threshold scale")
    group.add_argument("--t-delay", type=float, dest="t_delay",
                       help="perceptual delay tolerance in seconds")
    group.add_argument("--beta", type=float, help="audio-visual balance exponent")
    group.add_argument("--transition-beats", type=int, dest="transition_beats",
                       help="trailing previous-meter beats per meter unit")
    group.add_argument("--smooth-j", type=int, dest="smooth_j",
                       help="moving-average width (frames) for the velocity profile")


def _resolve_config(args: argparse.Namespace) -> AnalysisConfig:
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV_VAR) or None
    overrides = {name: getattr(args, name, None)
                 for name in ("lambda1", "lambda2", "t_delay", "beta",
                              "transition_beats", "smooth_j")}
    try:
        return AnalysisConfig.load(path, overrides)
    except _INPUT_ERRORS as exc:
        raise ConfigError(str(exc)) from exc


def _load_pose_file(path: str, fps: float):
    if path.endswith(".csv"):
        return load_poses_csv(path, fps)
    return load_poses_json(path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmo",
        description="Score rhythmic harmony between a music track and a "
                    "human-motion pose sequence.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full harmony report for an audio/pose pair")
    p.add_argument("audio", help="WAV file")
    p.add_argument("poses", help="pose JSON (or CSV with --fps)")
    p.add_argument("-o", "--output", default="report.json", help="report path")
    p.add_argument("--fps", type=float, default=15.0,
                   help="frame rate for CSV pose input (JSON carries its own)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="report format")
    p.add_argument("--plot", action="store_true",
                   help="also render timeline .svg and .csv next to the report")
    _add_config_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("beats", help="raw and salient beats for one stream")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--audio", help="WAV file")
    src.add_argument("--poses", help="pose JSON/CSV file")
    p.add_argument("-o", "--output", default="beats.json")
    p.add_argument("--fps", type=float, default=15.0)
    _add_config_flags(p)
    p.set_defaults(func=cmd_beats)

    p = sub.add_parser("meter", help="meter classification and unit segmentation")
    p.add_argument("audio", help="WAV file")
    p.add_argument("-o", "--output", default="meter.json")
    p.add_argument("--fps", type=float, default=15.0,
                   help="frame rate used for the units' temporal indices")
    _add_config_flags(p)
    p.set_defaults(func=cmd_meter)

    p = sub.add_parser("synth", help="generate a synthetic audio/pose pair")
    p.add_argument("spec", help="SynthSpec JSON file")
    p.add_argument("out_dir", help="directory for clicks.wav and poses.json")
    p.add_argument("--seed", type=int, help="override the spec's rng_seed")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("plot", help="render a report or beats JSON to .svg/.png/.csv")
    p.add_argument("input", help="report or beats JSON file")
    p.add_argument("output", help="output path; extension picks the format")
    p.set_defaults(func=cmd_plot)

    return parser


def cmd_analyze(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    clip = load_audio(args.audio)
    poses = _load_pose_file(args.poses, args.fps)
    report = evaluate_pair(clip, poses, config)

    out = Path(args.output)
    if args.format == "csv":
        rows = [",".join(HarmonyReport.CSV_FIELDS),
                ",".join("" if v is None else str(v) for v in report.to_csv_row())]
        _atomic_write(out, "\n".join(rows) + "\n")
    else:
        _write_json(out, report.to_dict())
    if args.plot:
        from .plotting import render_timeline, timeline_csv
        render_timeline(report.to_dict(), str(out.with_suffix(".svg")))
        timeline_csv(report.to_dict(), str(out.with_suffix(".beats.csv")))
    if report.warning:
        print(f"warning: {report.warning}", file=sys.stderr)
    print(f"h={report.h:.4f} hit_rate={report.hit_rate:.4f} loss={report.loss:.4f} "
          f"N'={report.n_audio} M'={report.n_visual} -> {out}")
    if report.degenerate:
        print("degenerate analysis: no salient beats on at least one stream",
              file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_beats(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    if args.audio:
        clip = load_audio(args.audio)
        raw = detect_audio_beats(onset_envelope(clip, config.stft()))
        salient = raw
        if len(raw):
            salient = apply_mask(raw, audio_saliency_mask(raw, config.lambda1))
        doc = {"stream": "audio", "raw": raw.to_dict(), "salient": salient.to_dict()}
    else:
        poses = _load_pose_file(args.poses, args.fps)
        profile = joint_velocity_sum(poses)
        if config.smooth_j > 1:
            profile = smooth_profile(profile, config.smooth_j)
        raw = detect_visual_beats(profile)
        salient = raw
        if len(raw):
            starred = visual_saliency_transform(raw, j_initial=profile.values[0])
            salient = apply_mask(starred, visual_saliency_mask(starred, config.lambda2))
        doc = {"stream": "visual", "raw": raw.to_dict(), "salient": salient.to_dict()}
    _write_json(args.output, doc)
    print(f"{doc['stream']}: {len(raw)} raw beats, "
          f"{len(doc['salient']['times'])} salient -> {args.output}")
    return EXIT_OK


def cmd_meter(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    clip = load_audio(args.audio)
    raw = detect_audio_beats(onset_envelope(clip, config.stft()))
    if len(raw) == 0:
        print("degenerate analysis: no audio beats detected", file=sys.stderr)
        return EXIT_DEGENERATE
    salient = apply_mask(raw, audio_saliency_mask(raw, config.lambda1))
    try:
        doc = meter_report(salient, args.fps, config.transition_beats)
    except ValueError as exc:
        print(f"degenerate analysis: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    _write_json(args.output, doc)
    print(f"meter={doc['meter']} beats_per_meter={doc['beats_per_meter']} "
          f"units={len(doc['units'])} -> {args.output}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    spec = SynthSpec.from_json(args.spec)
    if args.seed is not None:
        spec = SynthSpec.from_dict({**spec.to_dict(), "rng_seed": args.seed})
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    clip = gen_click_track(spec)
    poses = gen_motion_track(spec)
    wav_path = out_dir / "clicks.wav"
    scipy.io.wavfile.write(wav_path, spec.sample_rate,
                           clip.samples.astype(np.float32))
    _write_json(out_dir / "poses.json", poses.to_dict())
    _write_json(out_dir / "spec.json", spec.to_dict())
    print(f"wrote {wav_path} and {out_dir / 'poses.json'}")
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    with open(args.input) as handle:
        doc = json.load(handle)
    from .plotting import render_timeline, timeline_csv
    if args.output.endswith(".csv"):
        timeline_csv(doc, args.output)
    else:
        render_timeline(doc, args.output)
    print(f"wrote {args.output}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
