"""Progressive zoom mixing: donors are scaled and shifted along linear
per-timestep trajectories, embedded into a base sample, and the labels
are re-weighted by the area each donor covers at each step.

The frame-domain (:func:`eventzoom_frames`) and event-domain
(:func:`eventzoom_events`) transforms consume identical random draws
and share the per-step geometry helper, so rasterizing the output of
one equals running the other on rasterized input, bit for bit.
"""

from __future__ import annotations

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import (
    AugConfig,
    EventStream,
    FrameTensor,
    Rect,
    SoftLabelTrack,
    ZoomParams,
)
from .raster import bin_indices, map_coords, splat, splat_extent
from .rng import DeterministicRng
from . import core

logger = logging.getLogger("evzoom")


def round_half_up(v: float) -> int:
    return math.floor(v + 0.5)


def sample_trajectory(rng: DeterministicRng, cfg: AugConfig, donor_index: int = -1) -> ZoomParams:
    """Draw one donor trajectory: 6 uniforms, in a fixed order.

    Order: scale_start, scale_end, anchor_start (x, y), anchor_end
    (x, y).  Scales are Uniform(scale_min, scale_max); anchors are
    uniform over the frame.
    """
    scale_start = rng.uniform(cfg.scale_min, cfg.scale_max)
    scale_end = rng.uniform(cfg.scale_min, cfg.scale_max)
    anchor_start = (rng.uniform(0.0, cfg.width), rng.uniform(0.0, cfg.height))
    anchor_end = (rng.uniform(0.0, cfg.width), rng.uniform(0.0, cfg.height))
    return ZoomParams(donor_index, scale_start, scale_end, anchor_start, anchor_end)


def sample_zoom_params(
    rng: DeterministicRng, cfg: AugConfig, dataset_size: int, exclude: int
) -> ZoomParams:
    """Draw a donor index plus its trajectory (dataset-level sampling).

    The donor is uniform over the dataset excluding `exclude`
    (re-drawn on collision, so mixing a sample with itself never
    happens); donors may come from any class.
    """
    if dataset_size < 2:
        raise ValueError("no donor available")
    donor = rng.next_index(dataset_size)
    while donor == exclude:
        logger.debug("donor self-collision on index %d, re-drawing", donor)
        donor = rng.next_index(dataset_size)
    return sample_trajectory(rng, cfg, donor_index=donor)


def _t_hat(t: int, bins: int) -> float:
    if not 0 <= t < bins:
        raise ValueError("step index out of range")
    return t / (bins - 1) if bins > 1 else 0.0


def interp_scale(params: ZoomParams, t: int, bins: int) -> float:
    """Linearly interpolated scale factor at step t; endpoints exact."""
    th = _t_hat(t, bins)
    return (1.0 - th) * params.scale_start + th * params.scale_end


def interp_pos(params: ZoomParams, t: int, bins: int) -> Tuple[float, float]:
    """Linearly interpolated anchor at step t, as real coordinates."""
    th = _t_hat(t, bins)
    return (
        (1.0 - th) * params.anchor_start[0] + th * params.anchor_end[0],
        (1.0 - th) * params.anchor_start[1] + th * params.anchor_end[1],
    )


def _step_geometry(scale_t, anchor_t, width, height, anchor_mode):
    """Offset and clipped mask rectangle for one step of a trajectory."""
    extent = splat_extent(width, height, scale_t, (0, 0))
    ox = round_half_up(anchor_t[0])
    oy = round_half_up(anchor_t[1])
    if anchor_mode == "center":
        ox -= extent.w // 2
        oy -= extent.h // 2
    elif anchor_mode != "top_left":
        raise ValueError(f"unknown anchor mode {anchor_mode!r}")
    rect = Rect(ox, oy, extent.w, extent.h).clipped(width, height)
    return (ox, oy), rect


def embed_step(
    base_t: np.ndarray,
    donor_t: np.ndarray,
    scale_t: float,
    anchor_t: Tuple[float, float],
    anchor_mode: str = "center",
):
    """Embed one donor frame into one base frame at one time step.

    Zeroes the base inside the donor's mask rectangle, splats the
    scaled donor on top, and reports the mask plus the fraction of the
    frame it covers (the donor's label weight for this step).
    """
    if base_t.shape != donor_t.shape:
        raise ValueError("shape mismatch")
    mixed = np.array(base_t, dtype=np.float32)
    rect, coverage = _embed_inplace(mixed, donor_t, scale_t, anchor_t, anchor_mode)
    return mixed, rect, coverage


def _embed_inplace(target, donor_t, scale_t, anchor_t, anchor_mode):
    _, height, width = target.shape
    offset, rect = _step_geometry(scale_t, anchor_t, width, height, anchor_mode)
    target[:, rect.y0:rect.y1, rect.x0:rect.x1] = 0.0
    splat(donor_t, scale_t, offset, target)
    coverage = rect.area / (height * width)
    return rect, coverage


def mix_label_step(y_prev: np.ndarray, y_donor: np.ndarray, coverage: float) -> np.ndarray:
    """One recursive label update: blend by the donor's area fraction."""
    if not 0.0 <= coverage <= 1.0:
        raise ValueError("coverage out of range")
    return (1.0 - coverage) * np.asarray(y_prev, dtype=np.float64) + coverage * np.asarray(
        y_donor, dtype=np.float64
    )


def _resolve_params(
    donors, cfg: AugConfig, rng: Optional[DeterministicRng], params
) -> List[ZoomParams]:
    if cfg.mixnum != len(donors):
        raise ValueError("donor count mismatch")
    if params is not None:
        if len(params) != len(donors):
            raise ValueError("donor count mismatch")
        return list(params)
    if rng is None and donors:
        raise ValueError("need an rng or explicit params")
    return [sample_trajectory(rng, cfg, donor_index=i) for i in range(len(donors))]


def _check_labels(y_base, donors):
    n = len(y_base)
    for _, y in donors:
        if len(y) != n:
            raise ValueError("shape mismatch")
    return n


def eventzoom_frames(
    base: FrameTensor,
    y_base: np.ndarray,
    donors: Sequence[Tuple[FrameTensor, np.ndarray]],
    cfg: AugConfig,
    rng: Optional[DeterministicRng] = None,
    params: Optional[Sequence[ZoomParams]] = None,
) -> Tuple[FrameTensor, SoftLabelTrack]:
    """Sequentially embed each donor into the base frame tensor.

    Trajectories come from `params` when given (the dataset pipeline
    pre-draws them together with donor selection) or are drawn from
    `rng`, six uniforms per donor.  Returns the mixed tensor plus the
    per-step label track and its average.
    """
    params = _resolve_params(donors, cfg, rng, params)
    _check_labels(y_base, donors)
    expected = (cfg.bins, cfg.channels, cfg.height, cfg.width)
    if base.shape != expected:
        raise ValueError("shape mismatch")
    for donor, _ in donors:
        if donor.shape != base.shape:
            raise ValueError("shape mismatch")

    values = np.array(base.values, dtype=np.float32)
    per_step = np.tile(np.asarray(y_base, dtype=np.float64), (cfg.bins, 1))
    for (donor, y_donor), prm in zip(donors, params):
        for t in range(cfg.bins):
            scale_t = interp_scale(prm, t, cfg.bins)
            anchor_t = interp_pos(prm, t, cfg.bins)
            _, coverage = _embed_inplace(
                values[t], donor.values[t], scale_t, anchor_t, cfg.anchor_mode
            )
            per_step[t] = mix_label_step(per_step[t], y_donor, coverage)
    return FrameTensor(values), SoftLabelTrack(per_step)


def eventzoom_events(
    base: EventStream,
    y_base: np.ndarray,
    donors: Sequence[Tuple[EventStream, np.ndarray]],
    cfg: AugConfig,
    rng: Optional[DeterministicRng] = None,
    params: Optional[Sequence[ZoomParams]] = None,
) -> Tuple[EventStream, SoftLabelTrack]:
    """Sparse-domain twin of :func:`eventzoom_frames`.

    Per donor and per time bin, base events inside the mask are
    deleted and donor events are scale/shift mapped (dropping any that
    land out of frame).  Same draw sequence, same labels, and
    rasterizing the result matches the frame-domain output exactly.
    """
    params = _resolve_params(donors, cfg, rng, params)
    _check_labels(y_base, donors)
    geom = (base.width, base.height, base.duration)
    if (cfg.width, cfg.height) != geom[:2]:
        raise ValueError("shape mismatch")
    for donor, _ in donors:
        if (donor.width, donor.height, donor.duration) != geom:
            raise ValueError("shape mismatch")

    bins = cfg.bins
    cur = (base.t, base.x, base.y, base.p)
    per_step = np.tile(np.asarray(y_base, dtype=np.float64), (bins, 1))
    for (donor, y_donor), prm in zip(donors, params):
        scales = []
        offsets = []
        rects = []
        for t in range(bins):
            scale_t = interp_scale(prm, t, bins)
            anchor_t = interp_pos(prm, t, bins)
            offset, rect = _step_geometry(
                scale_t, anchor_t, cfg.width, cfg.height, cfg.anchor_mode
            )
            scales.append(scale_t)
            offsets.append(offset)
            rects.append(rect)
            per_step[t] = mix_label_step(per_step[t], y_donor, rect.area / (cfg.height * cfg.width))

        # delete current events covered by the per-bin mask
        b_cur = bin_indices(cur[0], base.duration, bins)
        keep = np.ones(len(cur[0]), dtype=bool)
        for b in range(bins):
            r = rects[b]
            sel = b_cur == b
            inside = (
                sel
                & (cur[1] >= r.x0) & (cur[1] < r.x1)
                & (cur[2] >= r.y0) & (cur[2] < r.y1)
            )
            keep &= ~inside

        # map donor events through the same per-bin geometry
        b_don = bin_indices(donor.t, donor.duration, bins)
        nx = np.empty(len(donor.t), dtype=np.int64)
        ny = np.empty(len(donor.t), dtype=np.int64)
        for b in range(bins):
            sel = b_don == b
            nx[sel] = map_coords(donor.x[sel], scales[b], offsets[b][0])
            ny[sel] = map_coords(donor.y[sel], scales[b], offsets[b][1])
        valid = (nx >= 0) & (nx < cfg.width) & (ny >= 0) & (ny < cfg.height)

        cur = (
            np.concatenate([cur[0][keep], donor.t[valid]]),
            np.concatenate([cur[1][keep], nx[valid]]),
            np.concatenate([cur[2][keep], ny[valid]]),
            np.concatenate([cur[3][keep], donor.p[valid]]),
        )

    mixed = core.sort_events(
        EventStream(base.width, base.height, base.duration, *cur)
    )
    return mixed, SoftLabelTrack(per_step)
