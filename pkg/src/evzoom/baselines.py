"""Comparison augmentations and the spatial/temporal ablation variants.

The ablation grid crosses three scale modes x three position modes x
two embedding modes; the eight named presets are the combinations used
to isolate the value of progressive trajectories and of scaling versus
cropping.  `PS_PP` with a shared RNG reproduces the zoom transform with
one donor, bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .core import AugConfig, EventStream, FrameTensor, Rect, SoftLabelTrack, ZoomParams
from .rng import DeterministicRng
from .zoom import (
    _step_geometry,
    embed_step,
    interp_pos,
    interp_scale,
    mix_label_step,
)

SCALE_MODES = ("progressive", "random_per_step", "fixed")
POSITION_MODES = ("progressive", "random_per_step", "fixed")
EMBED_MODES = ("zoom_splat", "crop_replace")


@dataclass(frozen=True)
class AblationVariant:
    scale_mode: str
    position_mode: str
    embed_mode: str

    def __post_init__(self):
        if self.scale_mode not in SCALE_MODES:
            raise ValueError(f"unknown scale mode {self.scale_mode!r}")
        if self.position_mode not in POSITION_MODES:
            raise ValueError(f"unknown position mode {self.position_mode!r}")
        if self.embed_mode not in EMBED_MODES:
            raise ValueError(f"unknown embed mode {self.embed_mode!r}")


# The two crop presets with one random parameter are near-duplicates in
# their original description; the RS/RP suffixes here disambiguate which
# parameter varies per step.
ABLATION_PRESETS = {
    "PS_PP": AblationVariant("progressive", "progressive", "zoom_splat"),
    "RS_RP": AblationVariant("random_per_step", "random_per_step", "zoom_splat"),
    "RS_FP": AblationVariant("fixed", "random_per_step", "zoom_splat"),
    "FS_RP": AblationVariant("random_per_step", "fixed", "zoom_splat"),
    "FS_FP": AblationVariant("fixed", "fixed", "zoom_splat"),
    "C_RS_FP": AblationVariant("random_per_step", "fixed", "crop_replace"),
    "C_RP_FS": AblationVariant("fixed", "random_per_step", "crop_replace"),
    "C_PS_PP": AblationVariant("progressive", "progressive", "crop_replace"),
}

STRATEGY_TOKENS = (
    "eventzoom",
    "mixup",
    "cutmix",
    "eventmix",
    "eventdrop",
) + tuple(f"ablation:{name}" for name in ABLATION_PRESETS)


def resolve_ablation(token: str) -> AblationVariant:
    """Map an `ablation:<NAME>` strategy token to its variant."""
    _, _, name = token.partition(":")
    if name not in ABLATION_PRESETS:
        raise ValueError(f"unknown strategy {token!r}")
    return ABLATION_PRESETS[name]


def _check_pair(a: FrameTensor, b: FrameTensor, y_a, y_b):
    if a.shape != b.shape or len(y_a) != len(y_b):
        raise ValueError("shape mismatch")


def mixup_frames(
    a: FrameTensor,
    y_a: np.ndarray,
    b: FrameTensor,
    y_b: np.ndarray,
    weight: Optional[float] = None,
    rng: Optional[DeterministicRng] = None,
) -> Tuple[FrameTensor, SoftLabelTrack]:
    """Blend corresponding time bins of two samples with one weight.

    `weight` is the share of sample `a`; when not given it is drawn
    uniformly (Beta(1, 1)).
    """
    _check_pair(a, b, y_a, y_b)
    if weight is None:
        weight = rng.uniform(0.0, 1.0)
    if not 0.0 <= weight <= 1.0:
        raise ValueError("weight out of range")
    values = (weight * a.values.astype(np.float64) + (1.0 - weight) * b.values).astype(
        np.float32
    )
    label = weight * np.asarray(y_a, np.float64) + (1.0 - weight) * np.asarray(y_b, np.float64)
    return FrameTensor(values), SoftLabelTrack.constant(label, a.bins)


def cutmix_frames(
    a: FrameTensor,
    y_a: np.ndarray,
    b: FrameTensor,
    y_b: np.ndarray,
    rng: DeterministicRng,
) -> Tuple[FrameTensor, SoftLabelTrack]:
    """Paste one rectangle of `b` onto `a`, held fixed across all bins.

    Corner and size are uniform over the frame; the label weight is the
    clipped rectangle's area fraction, constant in time.
    """
    _check_pair(a, b, y_a, y_b)
    h, w = a.height, a.width
    rect = Rect(rng.next_index(w), rng.next_index(h), rng.next_index(w + 1), rng.next_index(h + 1))
    rect = rect.clipped(w, h)
    values = np.array(a.values)
    values[:, :, rect.y0:rect.y1, rect.x0:rect.x1] = b.values[
        :, :, rect.y0:rect.y1, rect.x0:rect.x1
    ]
    coverage = rect.area / (h * w)
    label = mix_label_step(y_a, y_b, coverage)
    return FrameTensor(values), SoftLabelTrack.constant(label, a.bins)


def eventmix_frames(
    a: FrameTensor,
    y_a: np.ndarray,
    b: FrameTensor,
    y_b: np.ndarray,
    rng: DeterministicRng,
) -> Tuple[FrameTensor, SoftLabelTrack]:
    """Replace a Gaussian-shaped region of `a` with `b`, fixed over time.

    The mask is the filled 1-sigma ellipse of a sampled 2-D Gaussian
    (uniform center, uniform axis spreads, uniform rotation); the label
    weight is the mask's pixel fraction.  This is a simplified take on
    Gaussian-region mixing, not a faithful reimplementation of any
    published variant.
    """
    _check_pair(a, b, y_a, y_b)
    h, w = a.height, a.width
    mu_x = rng.uniform(0.0, w)
    mu_y = rng.uniform(0.0, h)
    sigma_x = rng.uniform(w / 16.0, w / 4.0)
    sigma_y = rng.uniform(h / 16.0, h / 4.0)
    theta = rng.uniform(0.0, math.pi)
    ys, xs = np.mgrid[0:h, 0:w]
    dx = xs + 0.5 - mu_x
    dy = ys + 0.5 - mu_y
    u = dx * math.cos(theta) + dy * math.sin(theta)
    v = -dx * math.sin(theta) + dy * math.cos(theta)
    mask = (u / sigma_x) ** 2 + (v / sigma_y) ** 2 <= 1.0
    values = np.array(a.values)
    values[:, :, mask] = b.values[:, :, mask]
    coverage = float(mask.sum()) / (h * w)
    label = mix_label_step(y_a, y_b, coverage)
    return FrameTensor(values), SoftLabelTrack.constant(label, a.bins)


def eventdrop(stream: EventStream, drop_ratio: float, rng: DeterministicRng) -> EventStream:
    """Drop each event independently with probability `drop_ratio`."""
    if not 0.0 <= drop_ratio <= 1.0:
        raise ValueError("drop ratio out of range")
    keep = np.array([rng.uniform() >= drop_ratio for _ in range(len(stream))], dtype=bool)
    return EventStream(
        stream.width,
        stream.height,
        stream.duration,
        stream.t[keep],
        stream.x[keep],
        stream.y[keep],
        stream.p[keep],
    )


def _draw_scales(mode, cfg: AugConfig, rng: DeterministicRng, prm_holder):
    bins = cfg.bins
    if mode == "progressive":
        s = rng.uniform(cfg.scale_min, cfg.scale_max)
        e = rng.uniform(cfg.scale_min, cfg.scale_max)
        prm_holder["scale"] = (s, e)
        return None  # resolved per step through interp_scale
    if mode == "random_per_step":
        return [rng.uniform(cfg.scale_min, cfg.scale_max) for _ in range(bins)]
    value = rng.uniform(cfg.scale_min, cfg.scale_max)
    return [value] * bins


def _draw_anchors(mode, cfg: AugConfig, rng: DeterministicRng, prm_holder):
    bins = cfg.bins
    if mode == "progressive":
        start = (rng.uniform(0.0, cfg.width), rng.uniform(0.0, cfg.height))
        end = (rng.uniform(0.0, cfg.width), rng.uniform(0.0, cfg.height))
        prm_holder["anchor"] = (start, end)
        return None
    if mode == "random_per_step":
        return [(rng.uniform(0.0, cfg.width), rng.uniform(0.0, cfg.height)) for _ in range(bins)]
    value = (rng.uniform(0.0, cfg.width), rng.uniform(0.0, cfg.height))
    return [value] * bins


def ablation_augment(
    base: FrameTensor,
    y_base: np.ndarray,
    donor: FrameTensor,
    y_donor: np.ndarray,
    variant: AblationVariant,
    cfg: AugConfig,
    rng: DeterministicRng,
) -> Tuple[FrameTensor, SoftLabelTrack]:
    """Single-donor embedding under one ablation variant.

    Scale draws come first, then position draws (progressive modes
    consume the endpoints in the same order as the zoom transform, so
    PS_PP replays it exactly).  Labels are always the per-step
    area-ratio mix.
    """
    _check_pair(base, donor, y_base, y_donor)
    bins, _, height, width = base.shape

    holder = {}
    scales = _draw_scales(variant.scale_mode, cfg, rng, holder)
    anchors = _draw_anchors(variant.position_mode, cfg, rng, holder)
    prm = None
    if scales is None or anchors is None:
        s, e = holder.get("scale", (1.0, 1.0))
        a_s, a_e = holder.get("anchor", ((0.0, 0.0), (0.0, 0.0)))
        prm = ZoomParams(-1, s, e, a_s, a_e)

    values = np.array(base.values)
    per_step = np.tile(np.asarray(y_base, dtype=np.float64), (bins, 1))
    for t in range(bins):
        scale_t = interp_scale(prm, t, bins) if scales is None else scales[t]
        anchor_t = interp_pos(prm, t, bins) if anchors is None else anchors[t]
        if variant.embed_mode == "zoom_splat":
            mixed, _, coverage = embed_step(
                values[t], donor.values[t], scale_t, anchor_t, cfg.anchor_mode
            )
            values[t] = mixed
        else:
            _, rect = _step_geometry(scale_t, anchor_t, width, height, cfg.anchor_mode)
            values[t, :, rect.y0:rect.y1, rect.x0:rect.x1] = donor.values[
                t, :, rect.y0:rect.y1, rect.x0:rect.x1
            ]
            coverage = rect.area / (height * width)
        per_step[t] = mix_label_step(per_step[t], y_donor, coverage)
    return FrameTensor(values), SoftLabelTrack(per_step)
