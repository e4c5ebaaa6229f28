"""Synthetic moving-shape event dataset for tests and toy experiments.

Each sample is one shape outline (square, circle or triangle) drifting
linearly across the frame; outline pixels emit Poisson-count events
with timestamps uniform in their bin, positive polarity on the leading
half of the outline and negative on the trailing half.  Everything is
reproducible from the master seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

from . import codec
from .codec import DatasetManifest
from .core import EventStream, sort_events
from .rng import DeterministicRng, child_rng
from .zoom import round_half_up

SHAPE_KINDS = ("square", "circle", "triangle")


@dataclass(frozen=True)
class ShapeSpec:
    """One moving shape: kind, size, start center, velocity, event rate.

    Velocity is in pixels per time bin; events_per_edge_pixel is the
    Poisson mean per outline pixel per bin.
    """

    kind: str
    size: int
    start: Tuple[float, float]
    velocity: Tuple[float, float]
    events_per_edge_pixel: float

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if self.size < 3:
            raise ValueError("shape size must be at least 3")
        if self.events_per_edge_pixel < 0:
            raise ValueError("event rate must be non-negative")


def _line_pixels(x0: int, y0: int, x1: int, y1: int):
    steps = max(abs(x1 - x0), abs(y1 - y0), 1)
    for k in range(steps + 1):
        f = k / steps
        yield round_half_up(x0 + f * (x1 - x0)), round_half_up(y0 + f * (y1 - y0))


def outline_offsets(kind: str, size: int) -> np.ndarray:
    """Integer outline pixels relative to the shape center, sorted."""
    half = size // 2
    cells = set()
    if kind == "square":
        for d in range(-half, half + 1):
            cells.update({(d, -half), (d, half), (-half, d), (half, d)})
    elif kind == "circle":
        r = size / 2.0
        reach = int(math.ceil(r)) + 1
        for dy in range(-reach, reach + 1):
            for dx in range(-reach, reach + 1):
                if abs(math.hypot(dx, dy) - r) < 0.6:
                    cells.add((dx, dy))
    else:  # triangle
        verts = [(0, -half), (-half, half), (half, half)]
        for (ax, ay), (bx, by) in zip(verts, verts[1:] + verts[:1]):
            cells.update(_line_pixels(ax, ay, bx, by))
    return np.array(sorted(cells), dtype=np.int64)


def _poisson(rng: DeterministicRng, rate: float) -> int:
    if rate <= 0.0:
        return 0
    threshold = math.exp(-rate)
    k = 0
    p = 1.0
    while True:
        p *= rng.uniform()
        if p <= threshold:
            return k
        k += 1


def gen_stream(
    spec: ShapeSpec,
    bins: int,
    height: int,
    width: int,
    duration: int,
    rng: DeterministicRng,
) -> EventStream:
    """Render one moving shape as a sorted event stream."""
    if bins < 1 or duration < 1:
        raise ValueError("bins and duration must be positive")
    offsets = outline_offsets(spec.kind, spec.size)
    vx, vy = spec.velocity
    # leading half of the outline (along the motion direction) fires +1
    lead = offsets[:, 0] * vx + offsets[:, 1] * vy >= 0.0
    ts, xs, ys, ps = [], [], [], []
    for k in range(bins):
        cx = spec.start[0] + k * vx
        cy = spec.start[1] + k * vy
        px = offsets[:, 0] + round_half_up(cx)
        py = offsets[:, 1] + round_half_up(cy)
        on_frame = (px >= 0) & (px < width) & (py >= 0) & (py < height)
        if not on_frame.any():
            raise ValueError("shape escapes frame")
        lo = k * duration / bins
        hi = (k + 1) * duration / bins
        for i in range(len(offsets)):
            if not on_frame[i]:
                continue
            polarity = 1 if lead[i] else -1
            for _ in range(_poisson(rng, spec.events_per_edge_pixel)):
                ts.append(int(rng.uniform(lo, hi)))
                xs.append(int(px[i]))
                ys.append(int(py[i]))
                ps.append(polarity)
    stream = EventStream(
        width,
        height,
        duration,
        np.array(ts, dtype=np.int64),
        np.array(xs, dtype=np.int64),
        np.array(ys, dtype=np.int64),
        np.array(ps, dtype=np.int64),
    )
    return sort_events(stream)


def _draw_spec(rng: DeterministicRng, kind: str, bins: int, height: int, width: int) -> ShapeSpec:
    size = 14 + rng.next_index(7)
    vx = rng.uniform(-1.0, 1.0)
    vy = rng.uniform(-1.0, 1.0)
    rate = rng.uniform(4.0, 7.0)
    margin = size / 2 + 2
    drift = bins - 1
    lo_x = margin + max(0.0, -vx * drift)
    hi_x = width - 1 - margin - max(0.0, vx * drift)
    lo_y = margin + max(0.0, -vy * drift)
    hi_y = height - 1 - margin - max(0.0, vy * drift)
    if lo_x >= hi_x or lo_y >= hi_y:
        raise ValueError("shape escapes frame")
    start = (rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y))
    return ShapeSpec(kind, size, start, (vx, vy), rate)


def gen_dataset(
    num_classes: int,
    samples_per_class: int,
    out_dir,
    master_seed: int,
    bins: int = 8,
    height: int = 48,
    width: int = 48,
    duration: int = None,
) -> DatasetManifest:
    """Write a labeled EVT1 dataset; class k is shape kind k.

    Fully reproducible: the same master seed produces byte-identical
    trees.
    """
    if num_classes not in (2, 3):
        raise ValueError("num_classes must be 2 or 3")
    if samples_per_class < 1:
        raise ValueError("samples_per_class must be positive")
    if duration is None:
        duration = bins * 10_000
    out_dir = Path(out_dir)
    entries = []
    for class_id in range(num_classes):
        kind = SHAPE_KINDS[class_id]
        for j in range(samples_per_class):
            index = class_id * samples_per_class + j
            rng = child_rng(master_seed, index)
            spec = _draw_spec(rng, kind, bins, height, width)
            stream = gen_stream(spec, bins, height, width, duration, rng)
            rel = f"class_{class_id}/sample_{index:04d}.evt"
            target = out_dir / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(codec.write_evt(stream))
            entries.append((rel, class_id, "events"))
    manifest = DatasetManifest(num_classes, entries)
    (out_dir / "manifest.txt").write_text(codec.write_manifest(manifest))
    return manifest
