"""Command-line entry point.

Subcommands: synth, rasterize, augment, viz, stats, bench, verify.
Exit codes are a stable contract: 0 success, 1 runtime failure,
2 usage error.  EVZ_LOG={error,info,debug} controls log verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import codec, pipeline, raster, synth, verify
from .baselines import STRATEGY_TOKENS
from .core import AugConfig

logger = logging.getLogger("evzoom")


def _parse_size(text: str):
    try:
        h, w = text.lower().split("x")
        return int(h), int(w)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected HxW, got {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evz", description="Event-stream augmentation toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic moving-shape dataset")
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--per-class", type=int, default=10)
    p.add_argument("--size", type=_parse_size, default=(48, 48), metavar="HxW")
    p.add_argument("--bins", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("rasterize", help="convert an EVT1 stream to an EVZF tensor")
    p.add_argument("--bins", type=int, default=8)
    p.add_argument("--size", type=_parse_size, default=None, metavar="HxW")
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("augment", help="augment a dataset manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--strategy", default="eventzoom")
    p.add_argument("--mixnum", type=int, default=1)
    p.add_argument("--lambda-min", type=float, default=0.5, dest="lambda_min")
    p.add_argument("--lambda-max", type=float, default=1.5, dest="lambda_max")
    p.add_argument("--anchor", choices=["center", "top_left"], default="center")
    p.add_argument("--bins", type=int, default=8)
    p.add_argument("--size", type=_parse_size, default=(48, 48), metavar="HxW")
    p.add_argument("--drop-ratio", type=float, default=0.25, dest="drop_ratio")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("viz", help="dump an EVZF tensor as grayscale PGM images")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["pgm"], default="pgm")
    p.add_argument("--compare", default=None, metavar="OTHER.evzf")

    p = sub.add_parser("stats", help="label-weight histogram over an augmented dataset")
    p.add_argument("--manifest", required=True)
    p.add_argument("--bins", type=int, default=20)

    p = sub.add_parser("bench", help="per-sample timing report")
    p.add_argument("--strategy", default="eventzoom")
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--mixnum", type=int, default=2)

    sub.add_parser("verify", help="run the full invariant and oracle suite")
    return parser


def _check_strategy(parser, token: str):
    if token not in STRATEGY_TOKENS:
        parser.error(f"unknown strategy {token!r} (choose from {', '.join(STRATEGY_TOKENS)})")


def _normalize(img: np.ndarray) -> np.ndarray:
    lo = float(img.min())
    hi = float(img.max())
    if hi <= lo:
        return np.zeros(img.shape, dtype=np.uint8)
    return np.round((img - lo) / (hi - lo) * 255.0).astype(np.uint8)


def _write_pgm(path: Path, img: np.ndarray) -> None:
    lines = ["P2", f"{img.shape[1]} {img.shape[0]}", "255"]
    for row in img:
        lines.append(" ".join(str(int(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _cmd_viz(args) -> int:
    frames, _ = codec.read_evzf(Path(args.input).read_bytes())
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for t in range(frames.bins):
        for c in range(frames.channels):
            _write_pgm(out_dir / f"t{t}_c{c}.pgm", _normalize(frames.values[t, c]))
    if args.compare:
        other, _ = codec.read_evzf(Path(args.compare).read_bytes())
        if other.shape != frames.shape:
            raise ValueError("shape mismatch")
        h, w = frames.height, frames.width
        for c in range(frames.channels):
            strip = np.zeros((2 * h + 2, frames.bins * (w + 2) - 2), dtype=np.float32)
            for t in range(frames.bins):
                x0 = t * (w + 2)
                strip[:h, x0:x0 + w] = frames.values[t, c]
                strip[h + 2:, x0:x0 + w] = other.values[t, c]
            _write_pgm(out_dir / f"compare_c{c}.pgm", _normalize(strip))
    logger.info("wrote images to %s", out_dir)
    return 0


def _cmd_augment(parser, args) -> int:
    _check_strategy(parser, args.strategy)
    if args.lambda_min <= 0 or args.lambda_min > args.lambda_max:
        parser.error("invalid lambda bounds: need 0 < min <= max")
    if args.mixnum < 0:
        parser.error("mixnum must be non-negative")
    cfg = AugConfig(
        mixnum=args.mixnum,
        scale_min=args.lambda_min,
        scale_max=args.lambda_max,
        bins=args.bins,
        height=args.size[0],
        width=args.size[1],
        anchor_mode=args.anchor,
        strategy=args.strategy,
        master_seed=args.seed,
        drop_ratio=args.drop_ratio,
    )
    manifest_path = Path(args.manifest)
    manifest = pipeline.load_manifest(manifest_path)
    _, stats = pipeline.augment_dataset(
        manifest, manifest_path.parent, cfg, args.out, workers=args.workers
    )
    for index, error in stats["errors"]:
        print(f"sample {index}: {error}", file=sys.stderr)
    print(f"augmented {stats['num_samples']} samples, {stats['num_errors']} errors")
    return 1 if stats["num_samples"] == 0 else 0


def main(argv=None) -> int:
    level = os.environ.get("EVZ_LOG", "error").lower()
    logging.basicConfig(
        level={"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
            level, logging.ERROR
        ),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            manifest = synth.gen_dataset(
                args.classes,
                args.per_class,
                args.out,
                master_seed=args.seed,
                bins=args.bins,
                height=args.size[0],
                width=args.size[1],
            )
            print(f"wrote {len(manifest)} samples to {args.out}")
            return 0
        if args.command == "rasterize":
            stream = codec.read_evt(Path(args.input).read_bytes())
            frames = raster.rasterize(stream, args.bins, stream.height, stream.width)
            if args.size is not None and (frames.height, frames.width) != tuple(args.size):
                frames = raster.downscale_frames(frames, args.size[0], args.size[1])
            Path(args.output).write_bytes(codec.write_evzf(frames))
            print(f"wrote {args.output}")
            return 0
        if args.command == "augment":
            return _cmd_augment(parser, args)
        if args.command == "viz":
            return _cmd_viz(args)
        if args.command == "stats":
            manifest_path = Path(args.manifest)
            manifest = pipeline.load_manifest(manifest_path)
            hist = pipeline.label_weight_histogram(
                manifest, manifest_path.parent, num_bins=args.bins
            )
            print(pipeline.format_weight_histogram(hist), end="")
            return 0
        if args.command == "bench":
            _check_strategy(parser, args.strategy)
            cfg = AugConfig(mixnum=args.mixnum, strategy=args.strategy)
            rows = pipeline.bench(cfg, args.iterations, strategies=[args.strategy])
            print(pipeline.format_bench_report(rows), end="")
            return 0
        if args.command == "verify":
            results = verify.run_all()
            for result in results:
                print(result.line())
            return 0 if all(r.passed for r in results) else 1
        parser.error(f"unknown command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
