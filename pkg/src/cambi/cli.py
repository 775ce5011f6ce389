"""Command-line front end: ``cambi score|maps|gen``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from cambi import __version__
from cambi.config import CambiConfig
from cambi.errors import CambiError
from cambi.frameio import (
    RAW_PIXEL_FORMATS,
    Y4M_MAGIC,
    VideoStream,
    open_raw_yuv,
    open_y4m,
    write_pgm,
    write_ppm,
    write_y4m,
)
from cambi.pipeline import frame_maps, score_stream, set_threads
from cambi.pooling import frame_score, per_pixel_combined, scale_weight, select_frames
from cambi.synthgen import DITHERS, PATTERNS, SyntheticSpec, parse_spec_text

log = logging.getLogger("cambi")


class UsageError(CambiError):
    pass


def _canvas(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got '{text}'") from None


def _rate(text: str) -> Fraction:
    try:
        rate = Fraction(text.replace(":", "/"))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad frame rate '{text}'") from None
    if rate <= 0:
        raise argparse.ArgumentTypeError(f"frame rate must be positive, got '{text}'")
    return rate


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", "-i", required=True, help="Y4M file, or raw planar file with --width/--height/--pixfmt/--fps")
    raw = p.add_argument_group("raw input geometry")
    raw.add_argument("--width", type=int)
    raw.add_argument("--height", type=int)
    raw.add_argument("--pixfmt", choices=RAW_PIXEL_FORMATS)
    raw.add_argument("--bit-depth", type=int, choices=(8, 10), default=None, help="for --pixfmt gray (default 8)")
    raw.add_argument("--fps", type=_rate)

    d = CambiConfig()
    cfg = p.add_argument_group("hyperparameters")
    cfg.add_argument("--canvas", type=_canvas, default=(d.canvas_width, d.canvas_height), help="analysis canvas WxH (default %(default)s)")
    cfg.add_argument("--window", type=int, default=d.window)
    cfg.add_argument("--tau-g", type=int, default=d.tau_g)
    cfg.add_argument("--max-k", type=int, default=d.max_k)
    cfg.add_argument("--scales", type=int, default=d.num_scales)
    cfg.add_argument("--top-percent", type=float, default=d.top_percent)
    cfg.add_argument("--t-sec", type=float, default=d.t_sec)
    p.add_argument("--threads", type=int, default=None, help="kernel threads (env CAMBI_THREADS; default all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cambi", description="Banding visibility index for video.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    score = sub.add_parser("score", help="score a video")
    _add_common(score)
    score.add_argument("--json", type=Path, help="report path (default: standard output)")
    score.add_argument("--csv", type=Path, help="per-frame CSV path")

    maps = sub.add_parser("maps", help="export per-frame confidence maps")
    _add_common(maps)
    maps.add_argument("--maps-dir", type=Path, required=True)
    maps.add_argument("--color", action="store_true", help="write false-color PPM instead of PGM")

    gen = sub.add_parser("gen", help="generate a synthetic stimulus")
    gen.add_argument("--output", "-o", type=Path, required=True)
    gen.add_argument("--config", type=Path, help="key=value spec file; flags override it")
    gen.add_argument("--width", type=int)
    gen.add_argument("--height", type=int)
    gen.add_argument("--frames", type=int)
    gen.add_argument("--pattern", choices=PATTERNS)
    gen.add_argument("--start", dest="start_value", type=int)
    gen.add_argument("--end", dest="end_value", type=int)
    gen.add_argument("--quant-step", type=int)
    gen.add_argument("--dither", choices=DITHERS)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--fps", dest="frame_rate", type=_rate)
    return parser


def config_from_args(args) -> CambiConfig:
    return CambiConfig(
        canvas_width=args.canvas[0],
        canvas_height=args.canvas[1],
        window=args.window,
        tau_g=args.tau_g,
        max_k=args.max_k,
        num_scales=args.scales,
        top_percent=args.top_percent,
        t_sec=args.t_sec,
    )


def _is_y4m(path: Path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(len(Y4M_MAGIC)) == Y4M_MAGIC


def load_input(args) -> VideoStream:
    path = args.input
    raw_given = [n for n in ("width", "height", "pixfmt", "fps") if getattr(args, n) is not None]
    if _is_y4m(path):
        if raw_given:
            raise UsageError(f"raw geometry flags ({', '.join(raw_given)}) are not allowed for Y4M input")
        return open_y4m(path)
    missing = [n for n in ("width", "height", "pixfmt", "fps") if getattr(args, n) is None]
    if missing:
        raise UsageError(f"input is not Y4M; raw input needs --{', --'.join(missing)}")
    depth = {"yuv420": 8, "yuv420p10le": 10}.get(args.pixfmt, args.bit_depth or 8)
    return open_raw_yuv(path, args.width, args.height, depth, args.pixfmt, args.fps)


def build_report(stream: VideoStream, report, input_name: str) -> dict:
    return {
        "version": __version__,
        "input": input_name,
        "config": report.config_echo.to_dict(),
        "video_score": round(report.video_score, 6),
        "banding_flag": report.banding_flag,
        "frames": [
            {"index": f.frame_index, "time_sec": round(f.time_sec, 6), "score": round(f.score, 6)}
            for f in report.frame_scores
        ],
    }


def _atomic_write(path: Path, text: str, written: list) -> None:
    tmp = path.with_name(f".{path.name}.partial")
    written.append(tmp)
    tmp.write_text(text)
    os.replace(tmp, path)
    written.append(path)


def run_score(args) -> int:
    config = config_from_args(args)
    stream = load_input(args)
    report = score_stream(stream, config)
    doc = json.dumps(build_report(stream, report, str(args.input)), indent=2) + "\n"
    written = []
    try:
        if args.csv:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["index", "time_sec", "score"])
            for f in report.frame_scores:
                writer.writerow([f.frame_index, f"{f.time_sec:.6f}", f"{f.score:.6f}"])
            _atomic_write(args.csv, buf.getvalue(), written)
        if args.json:
            _atomic_write(args.json, doc, written)
        else:
            sys.stdout.write(doc)
    except BaseException:
        _remove(written)
        raise
    log.info("video score %.6f over %d frames", report.video_score, len(report.frame_scores))
    return 0


def combined_ceiling(config: CambiConfig) -> float:
    """Largest possible combined value: every confidence at its 0.5 bound."""
    k_sum = config.max_k * (config.max_k + 1) / 2
    return 0.5 * k_sum * sum(scale_weight(s) for s in range(config.num_scales))


def run_maps(args) -> int:
    config = config_from_args(args)
    stream = load_input(args)
    out_dir = args.maps_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    writer, ext = (write_ppm, "ppm") if args.color else (write_pgm, "pgm")
    ceiling = combined_ceiling(config)
    written = []
    try:
        for index, time_sec in select_frames(stream, config.t_sec):
            map_set = frame_maps(stream.frames[index], config, index, time_sec)
            for (k, scale), cmap in sorted(map_set.maps.items()):
                path = out_dir / f"f{index}_k{k}_s{scale}.{ext}"
                written.append(path)
                writer(cmap.values, path)
            combined = per_pixel_combined(map_set, config)
            path = out_dir / f"f{index}_combined.{ext}"
            written.append(path)
            writer(np.clip(combined / ceiling, 0.0, 1.0) if ceiling > 0 else combined * 0, path)
            log.info("frame %d: score %.6f", index, frame_score(map_set, config).score)
    except BaseException:
        _remove(written)
        raise
    return 0


def spec_from_args(args) -> SyntheticSpec:
    values = {}
    if args.config:
        values = vars(parse_spec_text(args.config.read_text()))
    for name in ("width", "height", "frames", "pattern", "start_value", "end_value",
                 "quant_step", "dither", "seed", "frame_rate"):
        value = getattr(args, name)
        if value is not None:
            values[name] = value
    return SyntheticSpec(**values)


def run_gen(args) -> int:
    from cambi.synthgen import generate

    stream = generate(spec_from_args(args))
    written = [args.output]
    try:
        write_y4m(stream, args.output)
    except BaseException:
        _remove(written)
        raise
    print(args.output)
    return 0


def _remove(paths) -> None:
    for path in paths:
        try:
            Path(path).unlink()
        except FileNotFoundError:
            pass


def _resolve_threads(args) -> int | None:
    threads = getattr(args, "threads", None)
    if threads is None and os.environ.get("CAMBI_THREADS"):
        try:
            threads = int(os.environ["CAMBI_THREADS"])
        except ValueError:
            raise UsageError(f"CAMBI_THREADS must be an integer, got '{os.environ['CAMBI_THREADS']}'") from None
    if threads is not None and threads < 1:
        raise UsageError(f"thread count must be >= 1, got {threads}")
    return threads


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    handlers = {"score": run_score, "maps": run_maps, "gen": run_gen}
    try:
        if args.command != "gen":
            set_threads(_resolve_threads(args))
        return handlers[args.command](args)
    except (CambiError, ValueError, OSError) as exc:
        message = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"cambi: error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
