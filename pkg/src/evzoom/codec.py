"""Bit-exact serialization for event streams, frame tensors and manifests.

Four formats make up the public data contract:

EVT1   binary event stream.  Magic 45 56 5A 31, then little-endian
       u16 width, u16 height, u32 duration_us, u64 count, then `count`
       packed 9-byte records (u32 t, u16 x, u16 y, i8 polarity).
CSV    text event stream.  Header line ``t,x,y,p``, one event per line.
EVZF   binary frame tensor with optional soft-label track.  Magic
       45 56 5A 46, then little-endian u16 T, u16 C, u16 H, u16 W,
       u8 has_labels, then T*C*H*W little-endian f32 values in
       row-major order; if has_labels, u16 n, T*n f32 per-step labels,
       n f32 averaged label.
MANIFEST  line-oriented dataset index.  First line ``n=<classes>``,
       then one ``<class_id>\\t<kind>\\t<path>`` line per entry.

Everything is little-endian and uncompressed so files diff cleanly and
round-trips are bit-identical.  Writers are deterministic: the same
value always produces the same bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .core import EventStream, FrameTensor, SoftLabelTrack

EVT_MAGIC = b"\x45\x56\x5a\x31"
EVZF_MAGIC = b"\x45\x56\x5a\x46"

_EVT_HEADER = struct.Struct("<4sHHIQ")
_EVZF_HEADER = struct.Struct("<4sHHHHB")
_EVT_RECORD = np.dtype([("t", "<u4"), ("x", "<u2"), ("y", "<u2"), ("p", "i1")])

#: simplex tolerance for labels decoded from f32 storage
DECODED_LABEL_ATOL = 1e-6

MANIFEST_KINDS = ("events", "frames")


@dataclass(frozen=True)
class DatasetManifest:
    """Class count plus (path, class id, kind) rows indexing a dataset."""

    num_classes: int
    entries: tuple

    def __post_init__(self):
        if self.num_classes < 1:
            raise ValueError("manifest needs at least one class")
        object.__setattr__(self, "entries", tuple(self.entries))
        seen = set()
        for path, class_id, kind in self.entries:
            if not 0 <= class_id < self.num_classes:
                raise ValueError("class out of range")
            if kind not in MANIFEST_KINDS:
                raise ValueError(f"unknown entry kind {kind!r}")
            if path in seen:
                raise ValueError("duplicate entry")
            seen.add(path)

    def __len__(self) -> int:
        return len(self.entries)


def write_evt(stream: EventStream) -> bytes:
    n = len(stream)
    if stream.width > 0xFFFF or stream.height > 0xFFFF:
        raise ValueError("dimension too large")
    if stream.duration > 0xFFFFFFFF:
        raise ValueError("dimension too large")
    header = _EVT_HEADER.pack(
        EVT_MAGIC, stream.width, stream.height, stream.duration, n
    )
    records = np.empty(n, dtype=_EVT_RECORD)
    records["t"] = stream.t
    records["x"] = stream.x
    records["y"] = stream.y
    records["p"] = stream.p
    return header + records.tobytes()


def read_evt(data: bytes) -> EventStream:
    if len(data) < _EVT_HEADER.size or data[:4] != EVT_MAGIC:
        raise ValueError("not an EVT1 file")
    _, width, height, duration, count = _EVT_HEADER.unpack_from(data)
    body = data[_EVT_HEADER.size:]
    expected = count * _EVT_RECORD.itemsize
    if len(body) != expected:
        raise ValueError("unexpected end of file")
    records = np.frombuffer(body, dtype=_EVT_RECORD)
    p = records["p"].astype(np.int64)
    if np.any((p != 1) & (p != -1)):
        raise ValueError("corrupt record")
    return EventStream(
        width,
        height,
        duration,
        records["t"].astype(np.int64),
        records["x"].astype(np.int64),
        records["y"].astype(np.int64),
        p,
    )


def write_csv(stream: EventStream) -> str:
    lines = ["t,x,y,p"]
    for i in range(len(stream)):
        lines.append(f"{stream.t[i]},{stream.x[i]},{stream.y[i]},{stream.p[i]}")
    return "\n".join(lines) + "\n"


def read_csv(text: str, width: int, height: int, duration: int) -> EventStream:
    """Parse CSV events; geometry is not stored in the text format."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != "t,x,y,p":
        raise ValueError("parse error at line 1")
    cols = [[], [], [], []]
    for k, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ValueError(f"parse error at line {k}")
        try:
            t, x, y, p = (int(v) for v in parts)
        except ValueError:
            raise ValueError(f"parse error at line {k}") from None
        if p not in (1, -1):
            raise ValueError(f"parse error at line {k}")
        for c, v in zip(cols, (t, x, y, p)):
            c.append(v)
    arrays = [np.array(c, dtype=np.int64) for c in cols]
    return EventStream(width, height, duration, *arrays)


def write_evzf(frames: FrameTensor, labels: Optional[SoftLabelTrack] = None) -> bytes:
    t, c, h, w = frames.shape
    if max(t, c, h, w) > 0xFFFF:
        raise ValueError("dimension too large")
    has_labels = labels is not None
    if has_labels and labels.num_steps != t:
        raise ValueError("label track length does not match bins")
    out = [_EVZF_HEADER.pack(EVZF_MAGIC, t, c, h, w, 1 if has_labels else 0)]
    out.append(frames.values.astype("<f4").tobytes())
    if has_labels:
        n = labels.num_classes
        if n > 0xFFFF:
            raise ValueError("dimension too large")
        out.append(struct.pack("<H", n))
        out.append(labels.per_step.astype("<f4").tobytes())
        out.append(labels.averaged.astype("<f4").tobytes())
    return b"".join(out)


def read_evzf(data: bytes) -> Tuple[FrameTensor, Optional[SoftLabelTrack]]:
    if len(data) < _EVZF_HEADER.size or data[:4] != EVZF_MAGIC:
        raise ValueError("not an EVZF file")
    _, t, c, h, w, has_labels = _EVZF_HEADER.unpack_from(data)
    if has_labels not in (0, 1):
        raise ValueError("corrupt header")
    offset = _EVZF_HEADER.size
    count = t * c * h * w
    if len(data) < offset + 4 * count:
        raise ValueError("truncated tensor")
    values = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
    frames = FrameTensor(values.reshape(t, c, h, w))
    offset += 4 * count
    labels = None
    if has_labels:
        if len(data) < offset + 2:
            raise ValueError("truncated tensor")
        (n,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if len(data) < offset + 4 * (t * n + n):
            raise ValueError("truncated tensor")
        per_step = np.frombuffer(data, dtype="<f4", count=t * n, offset=offset)
        offset += 4 * t * n
        averaged = np.frombuffer(data, dtype="<f4", count=n, offset=offset)
        offset += 4 * n
        labels = SoftLabelTrack(
            per_step.reshape(t, n).astype(np.float64),
            averaged.astype(np.float64),
            atol=DECODED_LABEL_ATOL,
        )
    if len(data) != offset:
        raise ValueError("truncated tensor")
    return frames, labels


def write_manifest(manifest: DatasetManifest) -> str:
    lines = [f"n={manifest.num_classes}"]
    for path, class_id, kind in manifest.entries:
        lines.append(f"{class_id}\t{kind}\t{path}")
    return "\n".join(lines) + "\n"


def read_manifest(text: str) -> DatasetManifest:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("parse error at line 1")
    try:
        num_classes = int(lines[0][2:])
    except ValueError:
        raise ValueError("parse error at line 1") from None
    entries = []
    for k, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"parse error at line {k}")
        class_field, kind, path = parts
        try:
            class_id = int(class_field)
        except ValueError:
            raise ValueError(f"parse error at line {k}") from None
        entries.append((path, class_id, kind))
    return DatasetManifest(num_classes, entries)
