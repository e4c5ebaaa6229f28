"""Dataset preparation by invoking the `evz` CLI.

The harness never imports the augmentation package; datasets are
produced by the command-line tool and consumed from disk.
"""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

STRATEGY_FLAGS = {
    "none": ["--strategy", "eventzoom", "--mixnum", "0"],
    "eventzoom": [
        "--strategy", "eventzoom", "--mixnum", "1",
        "--lambda-min", "0.5", "--lambda-max", "1.5",
    ],
    "mixup": ["--strategy", "mixup"],
    "cutmix": ["--strategy", "cutmix"],
}


def run_evz(*args: str) -> None:
    cmd = [sys.executable, "-m", "evzoom", *args]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"evz {' '.join(args[:2])} failed:\n{proc.stderr}{proc.stdout}")


def synth_dataset(out_dir, per_class: int, seed: int, classes: int = 3) -> Path:
    out_dir = Path(out_dir)
    run_evz(
        "synth", "--classes", str(classes), "--per-class", str(per_class),
        "--size", "48x48", "--bins", "8", "--seed", str(seed), "--out", str(out_dir),
    )
    return out_dir / "manifest.txt"


def augment_dataset(manifest: Path, out_dir, strategy: str, seed: int) -> Path:
    if strategy not in STRATEGY_FLAGS:
        raise ValueError(f"unknown strategy {strategy!r}")
    out_dir = Path(out_dir)
    run_evz(
        "augment", "--manifest", str(manifest), *STRATEGY_FLAGS[strategy],
        "--seed", str(seed), "--workers", "2", "--out", str(out_dir),
    )
    return out_dir / "manifest.txt"


def rasterized_copy(manifest: Path, out_dir) -> Path:
    """Plain frames with one-hot labels (the identity 'augmentation')."""
    return augment_dataset(manifest, out_dir, "none", seed=0)
