"""Self-contained verification suite: every check pairs the library
against an independent oracle (brute-force enumeration, replayed
reference sequences, cross-domain comparison) and reports pass/fail.

`run_all` backs both the `verify` CLI subcommand and the acceptance
test module; checks are pure and leave no state behind.
"""

from __future__ import annotations

import hashlib
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from . import baselines, codec, pipeline, raster, synth, zoom
from .core import AugConfig, EventStream, FrameTensor, SoftLabelTrack, one_hot
from .rng import DeterministicRng, child_rng

# canonical first outputs of splitmix64 from state 0
SPLITMIX64_REFERENCE = (
    0xE220A8397B1DCDAF,
    0x6E789E6AA1B965F4,
    0x06C45D188009454F,
    0xF88BB8A8724C81EC,
    0x1B39896A51A8749B,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}  ({self.seconds:.2f}s)  {self.detail}"


def _random_frames(gen, shape) -> FrameTensor:
    return FrameTensor(gen.poisson(0.2, shape).astype(np.float32))


def check_interpolation() -> tuple:
    """Endpoints exact and second differences below 1e-12, 1000 triples."""
    gen = np.random.default_rng(101)
    worst = 0.0
    for _ in range(1000):
        bins = int(gen.integers(2, 33))
        prm = zoom.ZoomParams(
            -1,
            float(gen.uniform(0.1, 3.0)),
            float(gen.uniform(0.1, 3.0)),
            (float(gen.uniform(0, 48)), float(gen.uniform(0, 48))),
            (float(gen.uniform(0, 48)), float(gen.uniform(0, 48))),
        )
        if zoom.interp_scale(prm, 0, bins) != prm.scale_start:
            return False, "start endpoint not exact"
        if zoom.interp_scale(prm, bins - 1, bins) != prm.scale_end:
            return False, "end endpoint not exact"
        if zoom.interp_pos(prm, 0, bins) != prm.anchor_start:
            return False, "start anchor not exact"
        if zoom.interp_pos(prm, bins - 1, bins) != prm.anchor_end:
            return False, "end anchor not exact"
        values = [zoom.interp_scale(prm, t, bins) for t in range(bins)]
        lo, hi = min(prm.scale_start, prm.scale_end), max(prm.scale_start, prm.scale_end)
        if min(values) < lo - 1e-12 or max(values) > hi + 1e-12:
            return False, "interpolated scale escapes endpoint range"
        for t in range(bins - 2):
            d2 = abs((values[t + 2] - values[t + 1]) - (values[t + 1] - values[t]))
            worst = max(worst, d2)
    return worst < 1e-12, f"max second difference {worst:.2e}"


def check_label_simplex() -> tuple:
    """1000 zoom runs across mixnum 0..3 keep labels on the simplex."""
    gen = np.random.default_rng(202)
    shape = (6, 2, 24, 24)
    worst = 0.0
    for i in range(1000):
        mixnum = i % 4
        cfg = AugConfig(
            mixnum=mixnum, height=24, width=24, bins=6, master_seed=i
        )
        base = _random_frames(gen, shape)
        donors = [
            (_random_frames(gen, shape), one_hot(int(gen.integers(0, 5)), 5))
            for _ in range(mixnum)
        ]
        _, track = zoom.eventzoom_frames(
            base, one_hot(0, 5), donors, cfg, rng=child_rng(i, 0)
        )
        if float(track.per_step.min()) < 0 or float(track.averaged.min()) < 0:
            return False, "negative label entry"
        worst = max(worst, float(np.abs(track.per_step.sum(axis=1) - 1.0).max()))
        worst = max(worst, abs(float(track.averaged.sum()) - 1.0))
    return worst <= 1e-9, f"max |sum-1| = {worst:.2e}"


def _coverage_oracle(scale, anchor, width, height, anchor_mode):
    """Count mask pixels by enumerating splat destinations directly."""
    dx = [math.floor(x * scale) for x in range(width)]
    dy = [math.floor(y * scale) for y in range(height)]
    w_enum = max(dx) - min(dx) + 1
    h_enum = max(dy) - min(dy) + 1
    ox = zoom.round_half_up(anchor[0])
    oy = zoom.round_half_up(anchor[1])
    if anchor_mode == "center":
        ox -= w_enum // 2
        oy -= h_enum // 2
    marked = 0
    for yy in range(oy, oy + h_enum):
        for xx in range(ox, ox + w_enum):
            if 0 <= xx < width and 0 <= yy < height:
                marked += 1
    return marked


def check_coverage_oracle() -> tuple:
    """Closed-form coverage equals brute-force mask marking, exactly."""
    gen = np.random.default_rng(303)
    for i in range(1000):
        width, height = (48, 48) if i % 2 == 0 else (23, 17)
        scale = float(gen.uniform(0.25, 2.0))
        anchor = (float(gen.uniform(0, width)), float(gen.uniform(0, height)))
        mode = "center" if i % 3 else "top_left"
        base = np.zeros((2, height, width), dtype=np.float32)
        donor = np.zeros((2, height, width), dtype=np.float32)
        _, rect, coverage = zoom.embed_step(base, donor, scale, anchor, mode)
        marked = _coverage_oracle(scale, anchor, width, height, mode)
        if rect.area != marked:
            return False, f"case {i}: rect area {rect.area} != oracle {marked}"
        if coverage != marked / (height * width):
            return False, f"case {i}: coverage {coverage} != oracle fraction"
    return True, "1000 cases exact"


def _random_spec(gen, kind) -> synth.ShapeSpec:
    return synth.ShapeSpec(
        kind,
        int(gen.integers(10, 18)),
        (float(gen.uniform(16, 32)), float(gen.uniform(16, 32))),
        (float(gen.uniform(-1.0, 1.0)), float(gen.uniform(-1.0, 1.0))),
        float(gen.uniform(2.0, 4.0)),
    )


def check_domain_equivalence() -> tuple:
    """Frame-domain and event-domain zoom agree bit-exactly, 200 streams."""
    gen = np.random.default_rng(404)
    cfg0 = AugConfig()
    duration = cfg0.bins * 10_000
    for i in range(200):
        seed = int(gen.integers(0, 2**63))
        mixnum = 1 + i % 2
        cfg = AugConfig(mixnum=mixnum, master_seed=seed)
        kinds = synth.SHAPE_KINDS
        base = synth.gen_stream(
            _random_spec(gen, kinds[i % 3]), cfg.bins, cfg.height, cfg.width,
            duration, child_rng(seed, 1),
        )
        donors = []
        for d in range(mixnum):
            stream = synth.gen_stream(
                _random_spec(gen, kinds[(i + d + 1) % 3]), cfg.bins, cfg.height,
                cfg.width, duration, child_rng(seed, 2 + d),
            )
            donors.append((stream, one_hot((i + d + 1) % 3, 3)))
        y_base = one_hot(i % 3, 3)

        rng_events = DeterministicRng(seed)
        rng_frames = DeterministicRng(seed)
        mixed_stream, track_e = zoom.eventzoom_events(base, y_base, donors, cfg, rng=rng_events)
        frames_in = raster.rasterize(base, cfg.bins, cfg.height, cfg.width)
        donor_frames = [
            (raster.rasterize(s, cfg.bins, cfg.height, cfg.width), y) for s, y in donors
        ]
        mixed_frames, track_f = zoom.eventzoom_frames(
            frames_in, y_base, donor_frames, cfg, rng=rng_frames
        )
        via_events = raster.rasterize(mixed_stream, cfg.bins, cfg.height, cfg.width)
        if not np.array_equal(via_events.values, mixed_frames.values):
            return False, f"case {i}: tensors differ"
        if track_e != track_f:
            return False, f"case {i}: label tracks differ"
        if rng_events.draw_count != rng_frames.draw_count:
            return False, f"case {i}: draw counts differ"
    return True, "200 streams bit-exact"


def check_ablation_ps_pp() -> tuple:
    """PS_PP replays the zoom transform bit-exactly under a shared seed."""
    gen = np.random.default_rng(505)
    shape = (8, 2, 48, 48)
    variant = baselines.ABLATION_PRESETS["PS_PP"]
    for i in range(100):
        seed = int(gen.integers(0, 2**63))
        cfg = AugConfig(mixnum=1, master_seed=seed)
        base = _random_frames(gen, shape)
        donor = _random_frames(gen, shape)
        out_a, track_a = baselines.ablation_augment(
            base, one_hot(0, 4), donor, one_hot(1, 4), variant, cfg, DeterministicRng(seed)
        )
        out_z, track_z = zoom.eventzoom_frames(
            base, one_hot(0, 4), [(donor, one_hot(1, 4))], cfg, rng=DeterministicRng(seed)
        )
        if not np.array_equal(out_a.values, out_z.values) or track_a != track_z:
            return False, f"case {i}: PS_PP diverges from zoom"
    return True, "100 cases bit-exact"


def _tree_digest(root: Path) -> str:
    digest = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            digest.update(str(path.relative_to(root)).encode())
            digest.update(path.read_bytes())
    return digest.hexdigest()


def check_pipeline_determinism() -> tuple:
    """Output trees are invariant to worker count and rerun, seed-sensitive."""
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        data = tmp / "data"
        manifest = synth.gen_dataset(2, 50, data, master_seed=11)
        digests = {}
        for label, seed, workers in (
            ("w1", 3, 1),
            ("w8", 3, 8),
            ("rerun", 3, 1),
            ("other_seed", 4, 1),
        ):
            cfg = AugConfig(mixnum=1, master_seed=seed)
            out = tmp / f"out_{label}"
            _, stats = pipeline.augment_dataset(manifest, data, cfg, out, workers=workers)
            if stats["num_errors"]:
                return False, f"{label}: {stats['num_errors']} samples failed"
            digests[label] = _tree_digest(out)
    if digests["w1"] != digests["w8"]:
        return False, "worker counts 1 and 8 disagree"
    if digests["w1"] != digests["rerun"]:
        return False, "rerun with same seed disagrees"
    if digests["w1"] == digests["other_seed"]:
        return False, "different seeds produced identical trees"
    return True, "byte-identical across workers and reruns"


def check_identity_cases() -> tuple:
    """mixnum=0 is the identity; unit scale centered is full replacement."""
    gen = np.random.default_rng(606)
    shape = (8, 2, 48, 48)
    base = _random_frames(gen, shape)
    donor = _random_frames(gen, shape)
    cfg0 = AugConfig(mixnum=0)
    out, track = zoom.eventzoom_frames(base, one_hot(0, 3), [], cfg0, rng=DeterministicRng(1))
    if not np.array_equal(out.values, base.values):
        return False, "mixnum=0 altered the base"
    if track != SoftLabelTrack.constant(one_hot(0, 3), 8):
        return False, "mixnum=0 altered the labels"

    cfg1 = AugConfig(mixnum=1, scale_min=1.0, scale_max=1.0)
    center = (cfg1.width / 2, cfg1.height / 2)
    params = [zoom.ZoomParams(-1, 1.0, 1.0, center, center)]
    out, track = zoom.eventzoom_frames(
        base, one_hot(0, 3), [(donor, one_hot(1, 3))], cfg1, params=params
    )
    if not np.array_equal(out.values, donor.values):
        return False, "unit centered zoom is not full replacement"
    if not np.array_equal(track.averaged, one_hot(1, 3)):
        return False, "unit centered zoom label is not the donor label"
    return True, "identity and full-replacement hold"


def mean_donor_weight(scale_min: float, scale_max: float, draws: int, seed: int = 7) -> float:
    """Monte-Carlo mean of the averaged donor label weight (mixnum=1)."""
    cfg = AugConfig(scale_min=scale_min, scale_max=scale_max)
    rng = DeterministicRng(seed)
    total = 0.0
    for _ in range(draws):
        prm = zoom.sample_trajectory(rng, cfg)
        acc = 0.0
        for t in range(cfg.bins):
            scale_t = zoom.interp_scale(prm, t, cfg.bins)
            anchor_t = zoom.interp_pos(prm, t, cfg.bins)
            _, rect = zoom._step_geometry(
                scale_t, anchor_t, cfg.width, cfg.height, cfg.anchor_mode
            )
            acc += rect.area / (cfg.height * cfg.width)
        total += acc / cfg.bins
    return total / draws


def check_monotone_mixing() -> tuple:
    """Wider/higher scale range yields clearly heavier donor weights."""
    wide = mean_donor_weight(0.5, 1.5, 10_000)
    narrow = mean_donor_weight(0.2, 0.6, 10_000)
    margin = wide - narrow
    return margin > 0.1, f"mean weight {wide:.3f} vs {narrow:.3f}, margin {margin:.3f}"


def _random_stream(gen, width=48, height=48, duration=10_000, n=500) -> EventStream:
    t = np.sort(gen.integers(0, duration, n))
    return EventStream(
        width, height, duration, t,
        gen.integers(0, width, n), gen.integers(0, height, n),
        gen.choice([-1, 1], n),
    )


def check_codec_roundtrips() -> tuple:
    """Bit-exact round-trips for all four formats plus the RNG vector."""
    rng = DeterministicRng(0)
    produced = tuple(rng.next_u64() for _ in range(len(SPLITMIX64_REFERENCE)))
    if produced != SPLITMIX64_REFERENCE:
        return False, "splitmix64 reference vector mismatch"

    gen = np.random.default_rng(707)
    for i in range(20):
        stream = _random_stream(gen, n=int(gen.integers(0, 2000)))
        blob = codec.write_evt(stream)
        if codec.read_evt(blob) != stream or codec.write_evt(codec.read_evt(blob)) != blob:
            return False, f"EVT1 round-trip failed on case {i}"
        text = codec.write_csv(stream)
        if codec.read_csv(text, stream.width, stream.height, stream.duration) != stream:
            return False, f"CSV round-trip failed on case {i}"

        shape = (4, 2, 16, 16)
        frames = _random_frames(gen, shape)
        raw = gen.uniform(0.0, 1.0, (4, 6)).astype(np.float32)
        per_step = (raw / raw.sum(axis=1, keepdims=True)).astype(np.float32)
        track = SoftLabelTrack(
            per_step.astype(np.float64),
            per_step.astype(np.float64).mean(axis=0).astype(np.float32).astype(np.float64),
            atol=codec.DECODED_LABEL_ATOL,
        )
        blob = codec.write_evzf(frames, track)
        frames2, track2 = codec.read_evzf(blob)
        if frames2 != frames or codec.write_evzf(frames2, track2) != blob:
            return False, f"EVZF round-trip failed on case {i}"

        entries = tuple(
            (f"class_{k % 3}/s{k:03d}.evt", k % 3, "events") for k in range(int(gen.integers(1, 40)))
        )
        manifest = codec.DatasetManifest(3, entries)
        text = codec.write_manifest(manifest)
        if codec.read_manifest(text) != manifest:
            return False, f"manifest round-trip failed on case {i}"
    return True, "EVT1/CSV/EVZF/manifest round-trips bit-exact"


def check_benchmark_floor() -> tuple:
    """One zoom application (mixnum=2) stays under 5 ms single-threaded."""
    cfg = AugConfig(mixnum=2, master_seed=9)
    rows = pipeline.bench(cfg, iterations=50, strategies=["eventzoom"], workers=2)
    single = [r for r in rows if r["mode"] == "single"][0]
    return single["mean_ms"] < 5.0, f"mean {single['mean_ms']:.3f} ms per application"


ALL_CHECKS = (
    ("interpolation_endpoints_and_linearity", check_interpolation),
    ("label_simplex", check_label_simplex),
    ("coverage_oracle_equivalence", check_coverage_oracle),
    ("domain_equivalence", check_domain_equivalence),
    ("ablation_ps_pp_bit_equality", check_ablation_ps_pp),
    ("pipeline_determinism", check_pipeline_determinism),
    ("identity_cases", check_identity_cases),
    ("monotone_mixing_strength", check_monotone_mixing),
    ("codec_roundtrips_and_rng_vector", check_codec_roundtrips),
    ("benchmark_sanity", check_benchmark_floor),
)


def run_check(name: str, fn: Callable) -> CheckResult:
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crashing check is a failing check
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CheckResult(name, passed, detail, time.perf_counter() - start)


def run_all(names: Optional[List[str]] = None) -> List[CheckResult]:
    selected = ALL_CHECKS if names is None else [c for c in ALL_CHECKS if c[0] in names]
    return [run_check(name, fn) for name, fn in selected]
