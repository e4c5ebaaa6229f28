"""Toy training harness: compares augmentation strategies on the
synthetic shape task, consuming the augmentation toolkit purely through
its CLI and file formats.
"""

from .experiment import Budget, format_table, run_experiment, summarize, train_once
from .formats import FrameDataset, load_evzf_dataset, read_evzf, read_manifest
from .model import SmallCNN, soft_cross_entropy

__all__ = [
    "Budget",
    "FrameDataset",
    "SmallCNN",
    "format_table",
    "load_evzf_dataset",
    "read_evzf",
    "read_manifest",
    "run_experiment",
    "soft_cross_entropy",
    "summarize",
    "train_once",
]
