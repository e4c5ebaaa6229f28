"""Event-to-frame conversion and the forward-splat geometric primitive.

The splat maps source cell (y, x) to destination
(floor(y * scale) + oy, floor(x * scale) + ox), accumulating collisions
additively and silently clipping destinations that fall outside the
canvas.  Sparse events and dense frames go through the same coordinate
map (:func:`map_coords`), which is what makes the event-domain and
frame-domain zoom transforms bit-identical.
"""

from __future__ import annotations

import numpy as np

from .core import EventStream, FrameTensor, Rect, POLARITY_POS


def bin_indices(t: np.ndarray, duration: int, bins: int) -> np.ndarray:
    """Time bin per event: floor(t * bins / duration), last bin closed."""
    if duration <= 0:
        if len(t):
            raise ValueError("zero-duration stream")
        return np.zeros(0, dtype=np.int64)
    b = (t * bins) // duration
    return np.minimum(b, bins - 1)


def map_coords(coords: np.ndarray, scale: float, offset: int) -> np.ndarray:
    """floor(coord * scale) + offset, the shared splat coordinate map."""
    return np.floor(np.asarray(coords, dtype=np.float64) * scale).astype(np.int64) + offset


def rasterize(stream: EventStream, bins: int, height: int, width: int) -> FrameTensor:
    """Accumulate events into a (bins, 2, height, width) count tensor.

    Positive polarity fills channel 0, negative channel 1.  The stream
    geometry must already match the target; resizing is a separate op.
    """
    if bins < 1:
        raise ValueError("bins must be positive")
    if stream.width != width or stream.height != height:
        raise ValueError("shape mismatch")
    values = np.zeros((bins, 2, height, width), dtype=np.float32)
    if len(stream):
        b = bin_indices(stream.t, stream.duration, bins)
        c = np.where(stream.p == POLARITY_POS, 0, 1)
        np.add.at(values, (b, c, stream.y, stream.x), np.float32(1.0))
    return FrameTensor(values)


def splat(source: np.ndarray, scale: float, offset, canvas: np.ndarray) -> np.ndarray:
    """Forward-splat a C x Hs x Ws slice onto a C x H x W canvas, in place.

    Purely additive: collisions sum, out-of-canvas destinations drop.
    Returns the canvas for convenience.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    ox, oy = int(offset[0]), int(offset[1])
    _, h_src, w_src = source.shape
    _, h, w = canvas.shape
    dy = map_coords(np.arange(h_src), scale, oy)
    dx = map_coords(np.arange(w_src), scale, ox)
    vy = (dy >= 0) & (dy < h)
    vx = (dx >= 0) & (dx < w)
    if not (vy.any() and vx.any()):
        return canvas
    sub = source[:, vy][:, :, vx]
    iy = dy[vy]
    ix = dx[vx]
    for c in range(source.shape[0]):
        np.add.at(canvas[c], (iy[:, None], ix[None, :]), sub[c])
    return canvas


def splat_extent(src_width: int, src_height: int, scale: float, offset) -> Rect:
    """Exact bounding box of all splat destinations, before clipping."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    if src_width < 1 or src_height < 1:
        raise ValueError("source must be non-empty")
    ox, oy = int(offset[0]), int(offset[1])
    w = int(np.floor((src_width - 1) * scale)) + 1
    h = int(np.floor((src_height - 1) * scale)) + 1
    return Rect(ox, oy, w, h)


def downscale_frames(frames: FrameTensor, target_h: int, target_w: int) -> FrameTensor:
    """Splat-downscale a frame tensor to a smaller square-aspect geometry.

    Total event count is preserved (scale <= 1 and zero offset means
    nothing clips).
    """
    t, c, h, w = frames.shape
    if target_h > h or target_w > w:
        raise ValueError("target must not exceed source")
    if target_h * w != target_w * h:
        raise ValueError("non-uniform scale unsupported")
    if target_h == h and target_w == w:
        return frames
    scale = target_w / w
    out = np.zeros((t, c, target_h, target_w), dtype=np.float32)
    for b in range(t):
        splat(frames.values[b], scale, (0, 0), out[b])
    return FrameTensor(out)
