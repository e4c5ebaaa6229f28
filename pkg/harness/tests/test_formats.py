import numpy as np
import pytest

from evz_harness import data, load_evzf_dataset, read_evzf, read_manifest


@pytest.fixture(scope="module")
def frames_dir(small_dataset, tmp_path_factory):
    root, train_manifest, _ = small_dataset
    out = tmp_path_factory.mktemp("frames")
    manifest = data.rasterized_copy(train_manifest, out)
    return out, manifest


def test_dataset_shape_contract(frames_dir):
    _, manifest = frames_dir
    ds = load_evzf_dataset(manifest)
    assert ds.frames.shape == (30, 8, 2, 48, 48)
    assert ds.labels.shape == (30, 3)
    assert ds.num_classes == 3
    assert ds.frames.dtype == np.float32


def test_labels_are_simplex_on_load(frames_dir):
    _, manifest = frames_dir
    ds = load_evzf_dataset(manifest)
    assert ds.labels.min() >= 0.0
    assert np.abs(ds.labels.sum(axis=1) - 1.0).max() < 1e-5
    # identity augmentation keeps one-hot labels on the own class
    assert np.all(ds.labels.argmax(axis=1) == ds.class_ids)


def test_parse_agrees_with_producer_reader(frames_dir):
    """Cross-implementation fixture: both readers see identical bytes."""
    out, manifest = frames_dir
    import evzoom.codec as producer

    harness_manifest = read_manifest(manifest)
    producer_manifest = producer.read_manifest(manifest.read_text())
    assert harness_manifest.num_classes == producer_manifest.num_classes
    assert [
        (e.path, e.class_id, e.kind) for e in harness_manifest.entries
    ] == list(producer_manifest.entries)

    sample = out / harness_manifest.entries[0].path
    values, per_step, averaged = read_evzf(sample)
    frames_p, track_p = producer.read_evzf(sample.read_bytes())
    assert np.array_equal(values, frames_p.values)
    assert np.array_equal(per_step.astype(np.float64), track_p.per_step)
    assert np.array_equal(averaged.astype(np.float64), track_p.averaged)


def test_corrupt_file_aborts_with_path(frames_dir, tmp_path):
    out, manifest = frames_dir
    sample = out / read_manifest(manifest).entries[0].path
    bad = tmp_path / "bad.evzf"
    bad.write_bytes(sample.read_bytes()[:40])
    with pytest.raises(ValueError, match="bad.evzf"):
        read_evzf(bad)


def test_missing_label_track_is_rejected(frames_dir, tmp_path):
    out, manifest = frames_dir
    sample = out / read_manifest(manifest).entries[0].path
    blob = bytearray(sample.read_bytes())
    # strip the label block: clear has_labels and truncate after values
    t, c, h, w = np.frombuffer(blob[4:12], dtype="<u2")
    end = 13 + 4 * int(t) * int(c) * int(h) * int(w)
    blob[12] = 0
    stripped = tmp_path / "nolabels.evzf"
    stripped.write_bytes(bytes(blob[:end]))
    (tmp_path / "manifest.txt").write_text(f"n=3\n0\tframes\tnolabels.evzf\n")
    with pytest.raises(ValueError, match="no label track"):
        load_evzf_dataset(tmp_path / "manifest.txt")
