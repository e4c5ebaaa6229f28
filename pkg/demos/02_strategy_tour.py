#!/usr/bin/env python3
"""Apply every augmentation strategy to the same sample pair and compare
what each does to the label track.

Run:  python3 demos/02_strategy_tour.py
"""

from evzoom import (
    ABLATION_PRESETS,
    AugConfig,
    DeterministicRng,
    ShapeSpec,
    ablation_augment,
    cutmix_frames,
    eventmix_frames,
    eventzoom_frames,
    gen_stream,
    mixup_frames,
    one_hot,
    rasterize,
)

cfg = AugConfig(master_seed=7)
duration = cfg.bins * 10_000
base = rasterize(
    gen_stream(ShapeSpec("square", 18, (24, 24), (0.5, 0.0), 5.0),
               cfg.bins, cfg.height, cfg.width, duration, DeterministicRng(1)),
    cfg.bins, cfg.height, cfg.width,
)
donor = rasterize(
    gen_stream(ShapeSpec("triangle", 16, (26, 22), (0.0, 0.5), 5.0),
               cfg.bins, cfg.height, cfg.width, duration, DeterministicRng(2)),
    cfg.bins, cfg.height, cfg.width,
)
y_base, y_donor = one_hot(0, 2), one_hot(1, 2)


def describe(name, track):
    steps = track.per_step[:, 1]
    varying = "varies per step" if len(set(steps.tolist())) > 1 else "constant in time"
    print(f"{name:18s} donor weight avg {track.averaged[1]:.3f}  ({varying})")
    print(f"{'':18s} per step: {[round(v, 2) for v in steps.tolist()]}")


print("strategy tour on one (square base, triangle donor) pair\n")
_, track = eventzoom_frames(base, y_base, [(donor, y_donor)], cfg, rng=DeterministicRng(7))
describe("eventzoom", track)

_, track = mixup_frames(base, y_base, donor, y_donor, rng=DeterministicRng(7))
describe("mixup", track)

_, track = cutmix_frames(base, y_base, donor, y_donor, DeterministicRng(7))
describe("cutmix", track)

_, track = eventmix_frames(base, y_base, donor, y_donor, DeterministicRng(7))
describe("eventmix", track)

print("\nablation grid (scale mode x position mode x embed mode):")
for name, variant in ABLATION_PRESETS.items():
    _, track = ablation_augment(
        base, y_base, donor, y_donor, variant, cfg, DeterministicRng(7)
    )
    label = f"{name} [{variant.scale_mode[:4]}/{variant.position_mode[:4]}/{variant.embed_mode}]"
    describe(label, track)
