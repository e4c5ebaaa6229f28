"""Core domain types for sparse event streams and dense frame tensors.

Events are (t, x, y, polarity) tuples with integer-microsecond
timestamps; frames are T x C x H x W count tensors with two polarity
channels.  All types are immutable after construction and their arrays
are flagged non-writeable, so values can be shared across workers
without synchronization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

POLARITY_POS = 1
POLARITY_NEG = -1

#: polarity value -> channel index in frame tensors
POLARITY_CHANNELS = {POLARITY_POS: 0, POLARITY_NEG: 1}
NUM_CHANNELS = 2

ANCHOR_MODES = ("center", "top_left")
LABEL_MODES = ("per_step", "averaged")
BASE_STRATEGIES = ("eventzoom", "mixup", "cutmix", "eventmix", "eventdrop")


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Event:
    """A single sensor event: microsecond timestamp, pixel, polarity."""

    t: int
    x: int
    y: int
    polarity: int


@dataclass(frozen=True, eq=False)
class EventStream:
    """Time-ordered sparse events plus the sensor geometry that owns them.

    Events are stored columnar (t, x, y, p arrays) for vectorized
    processing; ``events()`` yields ``Event`` views when per-record
    access is more convenient.
    """

    width: int
    height: int
    duration: int
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", _freeze(np.asarray(self.t, dtype=np.int64)))
        object.__setattr__(self, "x", _freeze(np.asarray(self.x, dtype=np.int64)))
        object.__setattr__(self, "y", _freeze(np.asarray(self.y, dtype=np.int64)))
        object.__setattr__(self, "p", _freeze(np.asarray(self.p, dtype=np.int64)))
        n = len(self.t)
        if not (len(self.x) == len(self.y) == len(self.p) == n):
            raise ValueError("event columns must have equal length")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("sensor geometry must be positive")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")

    @classmethod
    def from_events(cls, width, height, duration, events: Iterable[Event]) -> "EventStream":
        ev = list(events)
        return cls(
            width,
            height,
            duration,
            np.array([e.t for e in ev], dtype=np.int64),
            np.array([e.x for e in ev], dtype=np.int64),
            np.array([e.y for e in ev], dtype=np.int64),
            np.array([e.polarity for e in ev], dtype=np.int64),
        )

    @classmethod
    def empty(cls, width, height, duration) -> "EventStream":
        z = np.empty(0, dtype=np.int64)
        return cls(width, height, duration, z, z, z, z)

    def __len__(self) -> int:
        return len(self.t)

    def events(self) -> Iterator[Event]:
        for i in range(len(self.t)):
            yield Event(int(self.t[i]), int(self.x[i]), int(self.y[i]), int(self.p[i]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventStream):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.duration == other.duration
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.p, other.p)
        )


@dataclass(frozen=True, eq=False)
class FrameTensor:
    """Dense T x C x H x W accumulation of events into time bins.

    Channel 0 holds positive-polarity counts, channel 1 negative.
    Values are float32 (lossless for counts below 2**24) and
    non-negative.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float32)
        if v.ndim != 4:
            raise ValueError("frame tensor must be 4-dimensional (T, C, H, W)")
        if min(v.shape) <= 0:
            raise ValueError("frame tensor dimensions must be positive")
        if v.size and float(v.min()) < 0.0:
            raise ValueError("frame tensor values must be non-negative")
        object.__setattr__(self, "values", _freeze(v))

    @property
    def bins(self) -> int:
        return self.values.shape[0]

    @property
    def channels(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[2]

    @property
    def width(self) -> int:
        return self.values.shape[3]

    @property
    def shape(self):
        return self.values.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrameTensor):
            return NotImplemented
        return self.values.shape == other.values.shape and np.array_equal(
            self.values, other.values
        )


@dataclass(frozen=True, eq=False)
class SoftLabelTrack:
    """Per-timestep class distributions plus their arithmetic mean.

    ``atol`` is the simplex tolerance used at validation time: tracks
    produced by the augmentation math hold 1e-9, while tracks decoded
    from float32 storage are only good to ~1e-6.
    """

    per_step: np.ndarray
    averaged: np.ndarray = field(default=None)
    atol: float = 1e-9

    def __post_init__(self):
        ps = np.asarray(self.per_step, dtype=np.float64)
        if ps.ndim != 2 or min(ps.shape) <= 0:
            raise ValueError("per-step labels must be a (T, n) matrix")
        avg = self.averaged
        if avg is None:
            avg = ps.mean(axis=0)
        avg = np.asarray(avg, dtype=np.float64)
        if avg.shape != (ps.shape[1],):
            raise ValueError("averaged label has wrong length")
        for name, block in (("per-step", ps), ("averaged", avg.reshape(1, -1))):
            if float(block.min()) < 0.0:
                raise ValueError(f"{name} label has negative entries")
            sums = block.sum(axis=1)
            if float(np.abs(sums - 1.0).max()) > self.atol:
                raise ValueError(f"{name} label does not sum to 1")
        object.__setattr__(self, "per_step", _freeze(ps))
        object.__setattr__(self, "averaged", _freeze(avg))

    @classmethod
    def constant(cls, label: np.ndarray, bins: int) -> "SoftLabelTrack":
        label = np.asarray(label, dtype=np.float64)
        return cls(np.tile(label, (bins, 1)))

    @property
    def num_steps(self) -> int:
        return self.per_step.shape[0]

    @property
    def num_classes(self) -> int:
        return self.per_step.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SoftLabelTrack):
            return NotImplemented
        return np.array_equal(self.per_step, other.per_step) and np.array_equal(
            self.averaged, other.averaged
        )


def one_hot(class_id: int, num_classes: int) -> np.ndarray:
    if not 0 <= class_id < num_classes:
        raise ValueError("class out of range")
    v = np.zeros(num_classes, dtype=np.float64)
    v[class_id] = 1.0
    return v


@dataclass(frozen=True)
class Rect:
    """Axis-aligned integer rectangle: inclusive top-left, w x h extent.

    Coordinates may be negative before clipping; ``clipped`` restricts
    the rectangle to a W x H frame.
    """

    x0: int
    y0: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 0 or self.h < 0:
            raise ValueError("rectangle extent must be non-negative")

    @property
    def x1(self) -> int:
        return self.x0 + self.w

    @property
    def y1(self) -> int:
        return self.y0 + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def clipped(self, width: int, height: int) -> "Rect":
        x0 = min(max(self.x0, 0), width)
        y0 = min(max(self.y0, 0), height)
        x1 = min(max(self.x1, 0), width)
        y1 = min(max(self.y1, 0), height)
        return Rect(x0, y0, x1 - x0, y1 - y0)


@dataclass(frozen=True)
class ZoomParams:
    """One donor's sampled trajectory: scale and anchor endpoints.

    ``donor_index`` is the dataset index the donor was drawn from, or
    -1 when the donor was supplied directly.
    """

    donor_index: int
    scale_start: float
    scale_end: float
    anchor_start: tuple
    anchor_end: tuple


@dataclass(frozen=True)
class AugConfig:
    """All augmentation tunables plus the master seed.

    ``scale_min``/``scale_max`` bound the donor scale factor
    (CLI flags --lambda-min/--lambda-max); ``mixnum`` is the number of
    donors embedded per sample.
    """

    mixnum: int = 1
    scale_min: float = 0.5
    scale_max: float = 1.5
    bins: int = 8
    channels: int = NUM_CHANNELS
    height: int = 48
    width: int = 48
    anchor_mode: str = "center"
    strategy: str = "eventzoom"
    master_seed: int = 0
    label_mode: str = "averaged"
    drop_ratio: float = 0.25

    def __post_init__(self):
        if self.mixnum < 0:
            raise ValueError("mixnum must be non-negative")
        if not (0.0 < self.scale_min <= self.scale_max):
            raise ValueError("scale bounds must satisfy 0 < min <= max")
        if self.bins < 1 or self.height < 1 or self.width < 1:
            raise ValueError("geometry must be positive")
        if self.channels != NUM_CHANNELS:
            raise ValueError("only two polarity channels are supported")
        if self.anchor_mode not in ANCHOR_MODES:
            raise ValueError(f"unknown anchor mode {self.anchor_mode!r}")
        if self.label_mode not in LABEL_MODES:
            raise ValueError(f"unknown label mode {self.label_mode!r}")
        if self.strategy not in BASE_STRATEGIES and not self.strategy.startswith("ablation:"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not 0.0 <= self.drop_ratio <= 1.0:
            raise ValueError("drop ratio out of range")


def validate_stream(s: EventStream) -> list:
    """Check all EventStream invariants, returning human-readable violations.

    Never raises; an empty list means the stream is valid.  Each
    violation names the first offending event index.
    """
    violations = []

    def first_bad(mask, msg):
        idx = np.flatnonzero(mask)
        if idx.size:
            violations.append(f"{msg} at index {int(idx[0])}")

    first_bad(s.t < 0, "negative timestamp")
    first_bad((s.x < 0) | (s.x >= s.width), "x out of bounds")
    first_bad((s.y < 0) | (s.y >= s.height), "y out of bounds")
    first_bad((s.p != POLARITY_POS) & (s.p != POLARITY_NEG), "invalid polarity")
    first_bad(s.t >= s.duration, "t >= duration")
    if len(s) > 1:
        unsorted = np.zeros(len(s), dtype=bool)
        unsorted[1:] = np.diff(s.t) < 0
        first_bad(unsorted, "unsorted")
    return violations


def sort_events(s: EventStream) -> EventStream:
    """Stable sort by timestamp; equal timestamps keep their order.

    Raises if any event is out of bounds (sorting garbage is a bug
    upstream, not something to paper over).
    """
    bounds = [v for v in validate_stream(s) if not v.startswith("unsorted")]
    if bounds:
        raise ValueError(f"invalid event: {bounds[0]}")
    order = np.argsort(s.t, kind="stable")
    return EventStream(
        s.width, s.height, s.duration, s.t[order], s.x[order], s.y[order], s.p[order]
    )
