"""Readers for the augmentation toolkit's on-disk formats.

Implemented here from the published byte layout rather than imported,
so this package depends on the data contract only: EVZF tensors
(magic 45 56 5A 46, little-endian u16 T/C/H/W, u8 has_labels, f32
row-major values, optional u16 n + T*n + n f32 labels) and plain-text
manifests ("n=<classes>" then "<class>\t<kind>\t<path>" lines).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

EVZF_MAGIC = b"\x45\x56\x5a\x46"
SIMPLEX_ATOL = 1e-5  # labels are stored as f32


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    class_id: int
    kind: str


@dataclass(frozen=True)
class Manifest:
    num_classes: int
    entries: Tuple[ManifestEntry, ...]


def read_manifest(path) -> Manifest:
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError(f"{path}: malformed manifest header")
    entries = []
    for ln in lines[1:]:
        class_field, kind, rel = ln.split("\t")
        entries.append(ManifestEntry(rel, int(class_field), kind))
    return Manifest(int(lines[0][2:]), tuple(entries))


def read_evzf(path) -> Tuple[np.ndarray, Optional[np.ndarray], Optional[np.ndarray]]:
    """Return (values (T,C,H,W) f32, per_step (T,n) f32, averaged (n,) f32)."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < 13 or blob[:4] != EVZF_MAGIC:
        raise ValueError(f"{path}: not an EVZF file")
    t, c, h, w, has_labels = struct.unpack_from("<HHHHB", blob, 4)
    offset = 13
    count = t * c * h * w
    end = offset + 4 * count
    if len(blob) < end:
        raise ValueError(f"{path}: truncated tensor body")
    values = np.frombuffer(blob[offset:end], dtype="<f4").reshape(t, c, h, w)
    if not has_labels:
        if len(blob) != end:
            raise ValueError(f"{path}: trailing bytes")
        return values, None, None
    (n,) = struct.unpack_from("<H", blob, end)
    offset = end + 2
    need = 4 * (t * n + n)
    if len(blob) != offset + need:
        raise ValueError(f"{path}: truncated label block")
    per_step = np.frombuffer(blob, dtype="<f4", count=t * n, offset=offset).reshape(t, n)
    averaged = np.frombuffer(blob, dtype="<f4", count=n, offset=offset + 4 * t * n)
    return values, per_step, averaged


@dataclass
class FrameDataset:
    """In-memory dataset: stacked tensors plus averaged soft labels."""

    frames: np.ndarray     # (N, T, C, H, W) float32
    labels: np.ndarray     # (N, n) float32, averaged per-sample label
    class_ids: np.ndarray  # (N,) int64
    num_classes: int

    def __len__(self) -> int:
        return len(self.frames)


def load_evzf_dataset(manifest_path) -> FrameDataset:
    """Load every manifest entry; soft labels collapse to their average.

    Label tracks are re-checked on load: entries must be non-negative
    and sum to one within float32 tolerance.
    """
    manifest_path = Path(manifest_path)
    manifest = read_manifest(manifest_path)
    root = manifest_path.parent
    frames: List[np.ndarray] = []
    labels: List[np.ndarray] = []
    class_ids: List[int] = []
    for entry in manifest.entries:
        if entry.kind != "frames":
            raise ValueError(f"{root / entry.path}: expected a frames entry")
        values, per_step, averaged = read_evzf(root / entry.path)
        if averaged is None:
            raise ValueError(f"{root / entry.path}: no label track")
        for name, block in (("per-step", per_step), ("averaged", averaged[None])):
            if block.min() < 0 or np.abs(block.sum(axis=1) - 1.0).max() > SIMPLEX_ATOL:
                raise ValueError(f"{root / entry.path}: invalid {name} label")
        frames.append(values)
        labels.append(averaged)
        class_ids.append(entry.class_id)
    shapes = {f.shape for f in frames}
    if len(shapes) != 1:
        raise ValueError(f"{manifest_path}: inconsistent tensor shapes {shapes}")
    return FrameDataset(
        np.stack(frames),
        np.stack(labels),
        np.array(class_ids, dtype=np.int64),
        manifest.num_classes,
    )
