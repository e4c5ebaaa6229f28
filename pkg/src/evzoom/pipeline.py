"""Dataset-level augmentation with scheduling-independent determinism.

Every sample gets its own child RNG derived from the master seed, so
the output bytes are a pure function of (inputs, config) no matter how
many workers run or in what order they finish.  Donor selection happens
here, at dataset level: per donor slot the draws are donor index, the
two scale endpoints, then the two anchors, in that order.
"""

from __future__ import annotations

import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import baselines, codec, raster, zoom
from .codec import DatasetManifest
from .core import AugConfig, EventStream, FrameTensor, SoftLabelTrack, one_hot
from .rng import DeterministicRng, child_rng

logger = logging.getLogger("evzoom")

_worker_ctx = {}


def load_manifest(path) -> DatasetManifest:
    return codec.read_manifest(Path(path).read_text())


def save_manifest(manifest: DatasetManifest, path) -> None:
    Path(path).write_text(codec.write_manifest(manifest))


@lru_cache(maxsize=256)
def _cached_frames(path_str: str, stat_sig, kind: str, bins: int, height: int, width: int):
    path = Path(path_str)
    if kind == "frames":
        frames, _ = codec.read_evzf(path.read_bytes())
    else:
        stream = codec.read_evt(path.read_bytes())
        frames = raster.rasterize(stream, bins, stream.height, stream.width)
    if (frames.height, frames.width) != (height, width):
        frames = raster.downscale_frames(frames, height, width)
    if frames.shape != (bins, 2, height, width):
        raise ValueError(f"shape mismatch for {path}")
    return frames


def load_entry_frames(path, kind: str, cfg: AugConfig) -> FrameTensor:
    """Entry loader used for bases and donors; caches by file identity."""
    p = Path(path)
    st = p.stat()
    return _cached_frames(
        str(p), (st.st_mtime_ns, st.st_size), kind, cfg.bins, cfg.height, cfg.width
    )


def _draw_donor(rng: DeterministicRng, dataset_size: int, exclude: int) -> int:
    if dataset_size < 2:
        raise ValueError("no donor available")
    donor = rng.next_index(dataset_size)
    while donor == exclude:
        logger.debug("donor self-collision on index %d, re-drawing", donor)
        donor = rng.next_index(dataset_size)
    return donor


def _augment_sample(
    index: int,
    entries: Sequence[Tuple[str, int, str]],
    num_classes: int,
    in_dir: Path,
    cfg: AugConfig,
    cache_dir: Optional[Path],
) -> Tuple[FrameTensor, SoftLabelTrack]:
    """Augment one manifest entry; pure given (inputs, cfg, index)."""
    rng = child_rng(cfg.master_seed, index)
    path, class_id, kind = entries[index]
    y_base = one_hot(class_id, num_classes)

    def frames_of(entry_index: int) -> FrameTensor:
        epath, _, ekind = entries[entry_index]
        src = _resolve_source(in_dir, epath, ekind, cfg, cache_dir)
        return load_entry_frames(src[0], src[1], cfg)

    strategy = cfg.strategy
    if strategy == "eventzoom":
        params = [
            zoom.sample_zoom_params(rng, cfg, len(entries), exclude=index)
            for _ in range(cfg.mixnum)
        ]
        base = frames_of(index)
        donors = [
            (frames_of(p.donor_index), one_hot(entries[p.donor_index][1], num_classes))
            for p in params
        ]
        return zoom.eventzoom_frames(base, y_base, donors, cfg, params=params)

    if strategy == "eventdrop":
        if kind != "events":
            raise ValueError("eventdrop requires event streams")
        stream = codec.read_evt((in_dir / path).read_bytes())
        dropped = baselines.eventdrop(stream, cfg.drop_ratio, rng)
        frames = raster.rasterize(dropped, cfg.bins, stream.height, stream.width)
        if (frames.height, frames.width) != (cfg.height, cfg.width):
            frames = raster.downscale_frames(frames, cfg.height, cfg.width)
        return frames, SoftLabelTrack.constant(y_base, cfg.bins)

    donor_index = _draw_donor(rng, len(entries), index)
    base = frames_of(index)
    donor = frames_of(donor_index)
    y_donor = one_hot(entries[donor_index][1], num_classes)
    if strategy == "mixup":
        return baselines.mixup_frames(base, y_base, donor, y_donor, rng=rng)
    if strategy == "cutmix":
        return baselines.cutmix_frames(base, y_base, donor, y_donor, rng)
    if strategy == "eventmix":
        return baselines.eventmix_frames(base, y_base, donor, y_donor, rng)
    if strategy.startswith("ablation:"):
        variant = baselines.resolve_ablation(strategy)
        return baselines.ablation_augment(base, y_base, donor, y_donor, variant, cfg, rng)
    raise ValueError(f"unknown strategy {strategy!r}")


def _resolve_source(in_dir: Path, rel_path: str, kind: str, cfg: AugConfig, cache_dir):
    if cache_dir is not None:
        cached = Path(cache_dir) / _cache_name(rel_path, cfg)
        if cached.exists():
            return cached, "frames"
    return in_dir / rel_path, kind


def _cache_name(rel_path: str, cfg: AugConfig) -> str:
    stem = rel_path.replace("/", "__").rsplit(".", 1)[0]
    return f"{stem}__{cfg.bins}x{cfg.height}x{cfg.width}.evzf"


def build_raster_cache(manifest: DatasetManifest, in_dir, cfg: AugConfig, cache_dir) -> None:
    """Pre-rasterize every entry once; later loads skip event decoding."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    for path, _, kind in manifest.entries:
        target = cache_dir / _cache_name(path, cfg)
        if target.exists():
            continue
        frames = load_entry_frames(Path(in_dir) / path, kind, cfg)
        target.write_bytes(codec.write_evzf(frames))


def _out_rel_path(rel_path: str) -> str:
    stem = rel_path.rsplit(".", 1)[0]
    return f"{stem}.evzf"


def _run_one(index: int):
    ctx = _worker_ctx
    entries = ctx["entries"]
    rel_out = _out_rel_path(entries[index][0])
    try:
        frames, track = _augment_sample(
            index, entries, ctx["num_classes"], ctx["in_dir"], ctx["cfg"], ctx["cache_dir"]
        )
        out_path = ctx["out_dir"] / rel_out
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_bytes(codec.write_evzf(frames, track))
    except (ValueError, OSError) as exc:
        return index, rel_out, None, str(exc)
    weight = 1.0 - float(track.averaged[entries[index][1]])
    return index, rel_out, weight, None


def _init_worker(entries, num_classes, in_dir, cfg, out_dir, cache_dir):
    _worker_ctx.update(
        entries=entries,
        num_classes=num_classes,
        in_dir=Path(in_dir),
        cfg=cfg,
        out_dir=Path(out_dir),
        cache_dir=cache_dir,
    )


def augment_dataset(
    manifest: DatasetManifest,
    in_dir,
    cfg: AugConfig,
    out_dir,
    workers: int = 1,
    cache_dir=None,
) -> Tuple[DatasetManifest, dict]:
    """Augment every manifest entry and write an EVZF dataset.

    Unreadable or malformed entries are recorded in the stats and
    skipped; the run only counts as failed when nothing succeeds.
    Output bytes are independent of `workers`.
    """
    required = {"eventzoom": cfg.mixnum + 1, "eventdrop": 1}.get(cfg.strategy, 2)
    if len(manifest) < required:
        raise ValueError("no donor available")
    in_dir = Path(in_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if cache_dir is not None:
        build_raster_cache(manifest, in_dir, cfg, cache_dir)

    init_args = (manifest.entries, manifest.num_classes, in_dir, cfg, out_dir, cache_dir)
    indices = range(len(manifest))
    if workers <= 1:
        _init_worker(*init_args)
        results = [_run_one(i) for i in indices]
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=init_args
        ) as pool:
            results = list(pool.map(_run_one, indices))

    results.sort(key=lambda r: r[0])
    out_entries = []
    weights = []
    errors = []
    for index, rel_out, weight, error in results:
        if error is not None:
            errors.append((index, error))
            logger.info("sample %d failed: %s", index, error)
            continue
        out_entries.append((rel_out, manifest.entries[index][1], "frames"))
        weights.append(weight)
    out_manifest = DatasetManifest(manifest.num_classes, out_entries)
    save_manifest(out_manifest, out_dir / "manifest.txt")
    stats = {
        "num_samples": len(out_entries),
        "num_errors": len(errors),
        "errors": errors,
        "donor_weights": weights,
    }
    return out_manifest, stats


def label_weight_histogram(manifest: DatasetManifest, in_dir, num_bins: int = 20) -> dict:
    """Histogram of the averaged donor mixing weight across a dataset.

    The weight of a sample is 1 minus the averaged mass left on its own
    class, i.e. how much label moved to donors.
    """
    if num_bins < 1:
        raise ValueError("need at least one bin")
    in_dir = Path(in_dir)
    weights = []
    for path, class_id, kind in manifest.entries:
        if kind != "frames":
            raise ValueError("no label track")
        _, track = codec.read_evzf((in_dir / path).read_bytes())
        if track is None:
            raise ValueError("no label track")
        weights.append(1.0 - float(track.averaged[class_id]))
    edges = np.linspace(0.0, 1.0, num_bins + 1)
    counts, _ = np.histogram(np.array(weights), bins=edges)
    cumulative = np.cumsum(counts) / max(1, len(weights))
    return {
        "weights": weights,
        "edges": edges,
        "counts": counts,
        "cumulative": cumulative,
        "mean": float(np.mean(weights)) if weights else 0.0,
    }


def format_weight_histogram(hist: dict) -> str:
    lines = ["bin_lo\tbin_hi\tcount\tcumulative"]
    edges = hist["edges"]
    for i, count in enumerate(hist["counts"]):
        lines.append(
            f"{edges[i]:.4f}\t{edges[i + 1]:.4f}\t{int(count)}\t{hist['cumulative'][i]:.4f}"
        )
    lines.append(f"mean_weight\t{hist['mean']:.6f}")
    return "\n".join(lines) + "\n"


def _bench_inputs(cfg: AugConfig, seed: int):
    gen = np.random.default_rng(seed)
    shape = (cfg.bins, cfg.channels, cfg.height, cfg.width)
    a = FrameTensor(gen.poisson(0.1, shape).astype(np.float32))
    b = FrameTensor(gen.poisson(0.1, shape).astype(np.float32))
    n_events = 10_000
    t = np.sort(gen.integers(0, 80_000, n_events))
    stream = EventStream(
        cfg.width,
        cfg.height,
        80_000,
        t,
        gen.integers(0, cfg.width, n_events),
        gen.integers(0, cfg.height, n_events),
        gen.choice([-1, 1], n_events),
    )
    return a, b, stream


def _bench_call(strategy: str, cfg: AugConfig, a, b, stream, rng: DeterministicRng):
    y0 = one_hot(0, 3)
    y1 = one_hot(1, 3)
    if strategy == "eventzoom":
        donors = [(b, y1)] * cfg.mixnum
        return zoom.eventzoom_frames(a, y0, donors, cfg, rng=rng)
    if strategy == "mixup":
        return baselines.mixup_frames(a, y0, b, y1, rng=rng)
    if strategy == "cutmix":
        return baselines.cutmix_frames(a, y0, b, y1, rng)
    if strategy == "eventmix":
        return baselines.eventmix_frames(a, y0, b, y1, rng)
    if strategy == "eventdrop":
        return baselines.eventdrop(stream, cfg.drop_ratio, rng)
    if strategy.startswith("ablation:"):
        variant = baselines.resolve_ablation(strategy)
        return baselines.ablation_augment(a, y0, b, y1, variant, cfg, rng)
    raise ValueError(f"unknown strategy {strategy!r}")


def bench(
    cfg: AugConfig,
    iterations: int,
    strategies: Optional[List[str]] = None,
    workers: int = 4,
) -> List[dict]:
    """Per-sample wall-time report for each strategy.

    Timings are measured per call; the parallel mode runs the same
    calls on a thread pool (numpy releases the GIL for the hot loops).
    """
    if strategies is None:
        strategies = ["eventzoom", "mixup", "cutmix", "eventmix", "eventdrop"]
    rows = []
    if iterations <= 0:
        return rows
    a, b, stream = _bench_inputs(cfg, cfg.master_seed)

    def timed(i):
        rng = child_rng(cfg.master_seed, i)
        t0 = time.perf_counter()
        _bench_call(strategy, cfg, a, b, stream, rng)
        return (time.perf_counter() - t0) * 1e3

    for strategy in strategies:
        timed(0)  # warm up caches and code paths
        singles = [timed(i) for i in range(iterations)]
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            parallel = list(pool.map(timed, range(iterations)))
        for mode, samples in (("single", singles), ("parallel", parallel)):
            rows.append(
                {
                    "strategy": strategy,
                    "mode": mode,
                    "mean_ms": statistics.fmean(samples),
                    "median_ms": statistics.median(samples),
                    "p99_ms": float(np.percentile(samples, 99)),
                }
            )
    return rows


def format_bench_report(rows: List[dict]) -> str:
    lines = ["strategy\tmode\tmean_ms\tmedian_ms\tp99_ms"]
    for row in rows:
        lines.append(
            f"{row['strategy']}\t{row['mode']}\t{row['mean_ms']:.3f}"
            f"\t{row['median_ms']:.3f}\t{row['p99_ms']:.3f}"
        )
    return "\n".join(lines) + "\n"
