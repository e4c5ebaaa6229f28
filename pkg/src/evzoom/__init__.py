"""Deterministic augmentation toolkit for event-camera data.

The core transform embeds donor event sequences into a base sequence
along progressive per-timestep scale and position trajectories and
synthesizes matching per-timestep soft labels.  Baseline augmentations,
bit-exact file formats, a synthetic dataset generator and a
reproducible dataset pipeline round out the package.
"""

from .core import (
    AugConfig,
    Event,
    EventStream,
    FrameTensor,
    Rect,
    SoftLabelTrack,
    ZoomParams,
    one_hot,
    sort_events,
    validate_stream,
)
from .codec import (
    DatasetManifest,
    read_csv,
    read_evt,
    read_evzf,
    read_manifest,
    write_csv,
    write_evt,
    write_evzf,
    write_manifest,
)
from .raster import downscale_frames, rasterize, splat, splat_extent
from .zoom import (
    embed_step,
    eventzoom_events,
    eventzoom_frames,
    interp_pos,
    interp_scale,
    mix_label_step,
    sample_trajectory,
    sample_zoom_params,
)
from .baselines import (
    ABLATION_PRESETS,
    STRATEGY_TOKENS,
    AblationVariant,
    ablation_augment,
    cutmix_frames,
    eventdrop,
    eventmix_frames,
    mixup_frames,
)
from .synth import ShapeSpec, gen_dataset, gen_stream
from .rng import DeterministicRng, child_rng
from .pipeline import augment_dataset, bench, label_weight_histogram, load_manifest

__version__ = "0.1.0"

__all__ = [
    "ABLATION_PRESETS",
    "AblationVariant",
    "AugConfig",
    "DatasetManifest",
    "DeterministicRng",
    "Event",
    "EventStream",
    "FrameTensor",
    "Rect",
    "ShapeSpec",
    "SoftLabelTrack",
    "STRATEGY_TOKENS",
    "ZoomParams",
    "ablation_augment",
    "augment_dataset",
    "bench",
    "child_rng",
    "cutmix_frames",
    "downscale_frames",
    "embed_step",
    "eventdrop",
    "eventmix_frames",
    "eventzoom_events",
    "eventzoom_frames",
    "gen_dataset",
    "gen_stream",
    "interp_pos",
    "interp_scale",
    "label_weight_histogram",
    "load_manifest",
    "mix_label_step",
    "mixup_frames",
    "one_hot",
    "rasterize",
    "read_csv",
    "read_evt",
    "read_evzf",
    "read_manifest",
    "sample_trajectory",
    "sample_zoom_params",
    "sort_events",
    "splat",
    "splat_extent",
    "validate_stream",
    "write_csv",
    "write_evt",
    "write_evzf",
    "write_manifest",
]
