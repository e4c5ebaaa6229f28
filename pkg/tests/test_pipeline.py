import hashlib

import numpy as np
import pytest

from evzoom import codec, pipeline, zoom
from evzoom.core import AugConfig, one_hot
from evzoom.raster import rasterize
from evzoom.rng import child_rng
from evzoom.synth import gen_dataset


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    manifest = gen_dataset(3, 7, root, master_seed=17)
    return root, manifest


def _digest(root):
    h = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            h.update(str(path.relative_to(root)).encode())
            h.update(path.read_bytes())
    return h.hexdigest()


def test_mixnum_zero_outputs_rasterized_bases(dataset, tmp_path):
    root, manifest = dataset
    cfg = AugConfig(mixnum=0, master_seed=1)
    out_manifest, stats = pipeline.augment_dataset(manifest, root, cfg, tmp_path)
    assert stats["num_errors"] == 0
    assert len(out_manifest) == len(manifest)
    for (out_rel, class_id, kind), (in_rel, _, _) in zip(
        out_manifest.entries, manifest.entries
    ):
        assert kind == "frames"
        frames, track = codec.read_evzf((tmp_path / out_rel).read_bytes())
        stream = codec.read_evt((root / in_rel).read_bytes())
        assert frames == rasterize(stream, cfg.bins, cfg.height, cfg.width)
        assert np.array_equal(track.averaged, one_hot(class_id, 3))


def test_donor_weights_match_single_threaded_replay(dataset, tmp_path):
    root, manifest = dataset
    cfg = AugConfig(mixnum=2, master_seed=3)
    _, stats = pipeline.augment_dataset(manifest, root, cfg, tmp_path, workers=2)
    assert stats["num_errors"] == 0

    def frames_of(i):
        path, _, _ = manifest.entries[i]
        stream = codec.read_evt((root / path).read_bytes())
        return rasterize(stream, cfg.bins, cfg.height, cfg.width)

    for i in range(len(manifest)):
        rng = child_rng(cfg.master_seed, i)
        params = [
            zoom.sample_zoom_params(rng, cfg, len(manifest), exclude=i)
            for _ in range(cfg.mixnum)
        ]
        donors = [
            (frames_of(p.donor_index), one_hot(manifest.entries[p.donor_index][1], 3))
            for p in params
        ]
        _, track = zoom.eventzoom_frames(
            frames_of(i), one_hot(manifest.entries[i][1], 3), donors, cfg, params=params
        )
        expected = 1.0 - float(track.averaged[manifest.entries[i][1]])
        assert stats["donor_weights"][i] == expected


def test_worker_counts_produce_identical_trees(dataset, tmp_path):
    root, manifest = dataset
    cfg = AugConfig(mixnum=1, master_seed=5)
    pipeline.augment_dataset(manifest, root, cfg, tmp_path / "w1", workers=1)
    pipeline.augment_dataset(manifest, root, cfg, tmp_path / "w2", workers=2)
    assert _digest(tmp_path / "w1") == _digest(tmp_path / "w2")


@pytest.mark.parametrize(
    "strategy",
    ["mixup", "cutmix", "eventmix", "eventdrop", "ablation:RS_RP", "ablation:C_PS_PP"],
)
def test_every_strategy_runs_end_to_end(dataset, tmp_path, strategy):
    root, manifest = dataset
    cfg = AugConfig(strategy=strategy, master_seed=8)
    out_manifest, stats = pipeline.augment_dataset(manifest, root, cfg, tmp_path)
    assert stats["num_errors"] == 0
    frames, track = codec.read_evzf(
        (tmp_path / out_manifest.entries[0][0]).read_bytes()
    )
    assert frames.shape == (8, 2, 48, 48)
    assert track is not None


def test_unreadable_entry_is_recorded_and_run_continues(dataset, tmp_path):
    root, manifest = dataset
    broken = codec.DatasetManifest(
        manifest.num_classes,
        list(manifest.entries) + [("class_0/missing.evt", 0, "events")],
    )
    cfg = AugConfig(mixnum=0, master_seed=2)
    out_manifest, stats = pipeline.augment_dataset(broken, root, cfg, tmp_path)
    assert stats["num_errors"] == 1
    assert stats["errors"][0][0] == len(broken) - 1
    assert len(out_manifest) == len(manifest)

    # with donors, samples that drew the unreadable donor fail too; the
    # run still continues and records every failure
    cfg1 = AugConfig(mixnum=1, master_seed=2)
    out_manifest, stats = pipeline.augment_dataset(broken, root, cfg1, tmp_path / "d")
    assert any(i == len(broken) - 1 for i, _ in stats["errors"])
    assert len(out_manifest) == len(broken) - stats["num_errors"]
    assert len(out_manifest) > 0


def test_dataset_smaller_than_mixnum_is_rejected(tmp_path):
    manifest = codec.DatasetManifest(2, [("a.evt", 0, "events"), ("b.evt", 1, "events")])
    cfg = AugConfig(mixnum=2)
    with pytest.raises(ValueError, match="no donor available"):
        pipeline.augment_dataset(manifest, tmp_path, cfg, tmp_path / "out")


def test_raster_cache_does_not_change_output(dataset, tmp_path):
    root, manifest = dataset
    cfg = AugConfig(mixnum=1, master_seed=5)
    pipeline.augment_dataset(manifest, root, cfg, tmp_path / "plain")
    pipeline.augment_dataset(
        manifest, root, cfg, tmp_path / "cached", cache_dir=tmp_path / "cache"
    )
    assert _digest(tmp_path / "plain") == _digest(tmp_path / "cached")
    assert list((tmp_path / "cache").glob("*.evzf"))


def test_label_weight_histogram_mixnum_zero_spikes_at_zero(dataset, tmp_path):
    root, manifest = dataset
    cfg = AugConfig(mixnum=0, master_seed=1)
    out_manifest, _ = pipeline.augment_dataset(manifest, root, cfg, tmp_path)
    hist = pipeline.label_weight_histogram(out_manifest, tmp_path, num_bins=10)
    assert hist["counts"][0] == len(out_manifest)
    assert hist["counts"][1:].sum() == 0
    assert hist["mean"] == 0.0


def test_label_weight_histogram_counts_sum_to_samples(dataset, tmp_path):
    root, manifest = dataset
    cfg = AugConfig(mixnum=1, master_seed=6)
    out_manifest, _ = pipeline.augment_dataset(manifest, root, cfg, tmp_path)
    hist = pipeline.label_weight_histogram(out_manifest, tmp_path, num_bins=7)
    assert hist["counts"].sum() == len(out_manifest)
    assert hist["cumulative"][-1] == pytest.approx(1.0)
    table = pipeline.format_weight_histogram(hist)
    assert table.startswith("bin_lo\tbin_hi\tcount\tcumulative")


def test_histogram_requires_label_tracks(dataset, tmp_path):
    root, manifest = dataset
    stream = codec.read_evt((root / manifest.entries[0][0]).read_bytes())
    frames = rasterize(stream, 8, 48, 48)
    (tmp_path / "bare.evzf").write_bytes(codec.write_evzf(frames))
    bare = codec.DatasetManifest(3, [("bare.evzf", 0, "frames")])
    with pytest.raises(ValueError, match="no label track"):
        pipeline.label_weight_histogram(bare, tmp_path)


def test_wider_scale_range_mixes_more():
    wide = np.mean([w for w in _weights(0.5, 1.5)])
    narrow = np.mean([w for w in _weights(0.2, 0.6)])
    assert wide - narrow > 0.1


def _weights(scale_min, scale_max, n=2000):
    from evzoom.verify import mean_donor_weight

    return [mean_donor_weight(scale_min, scale_max, n)]


def test_bench_zero_iterations_is_empty():
    assert pipeline.bench(AugConfig(), 0) == []


def test_bench_reports_each_strategy_in_stable_order():
    cfg = AugConfig(mixnum=2, master_seed=4)
    rows_a = pipeline.bench(cfg, 3, strategies=["eventzoom", "mixup"], workers=2)
    rows_b = pipeline.bench(cfg, 3, strategies=["eventzoom", "mixup"], workers=2)
    order_a = [(r["strategy"], r["mode"]) for r in rows_a]
    order_b = [(r["strategy"], r["mode"]) for r in rows_b]
    assert order_a == order_b
    assert order_a[0] == ("eventzoom", "single")
    report = pipeline.format_bench_report(rows_a)
    assert report.splitlines()[0] == "strategy\tmode\tmean_ms\tmedian_ms\tp99_ms"
