import hashlib
from pathlib import Path

import numpy as np
import pytest

from evzoom import codec
from evzoom.core import validate_stream
from evzoom.raster import bin_indices, rasterize
from evzoom.rng import DeterministicRng
from evzoom.synth import ShapeSpec, gen_dataset, gen_stream, outline_offsets


def test_zero_rate_gives_empty_stream():
    spec = ShapeSpec("square", 12, (24.0, 24.0), (0.0, 0.0), 0.0)
    stream = gen_stream(spec, 8, 48, 48, 80_000, DeterministicRng(1))
    assert len(stream) == 0


def test_static_square_events_lie_on_the_outline():
    # membership oracle: a square outline is max(|x-cx|, |y-cy|) == size//2
    spec = ShapeSpec("square", 14, (24.0, 24.0), (0.0, 0.0), 5.0)
    stream = gen_stream(spec, 8, 48, 48, 80_000, DeterministicRng(2))
    assert len(stream) > 0
    half = 14 // 2
    cheb = np.maximum(np.abs(stream.x - 24), np.abs(stream.y - 24))
    assert np.all(cheb == half)
    # every bin draws from the same outline set (Poisson may skip pixels)
    outline = {(x, y) for x, y in zip(stream.x.tolist(), stream.y.tolist())}
    b = bin_indices(stream.t, stream.duration, 8)
    for k in range(8):
        positions = set(zip(stream.x[b == k].tolist(), stream.y[b == k].tolist()))
        assert positions <= outline and positions


def test_moving_shape_polarity_splits_on_motion_direction():
    spec = ShapeSpec("square", 12, (20.0, 24.0), (1.0, 0.0), 6.0)
    stream = gen_stream(spec, 8, 48, 48, 80_000, DeterministicRng(3))
    # with pure +x motion, leading-edge (+1) events sit ahead of trailing ones
    b = bin_indices(stream.t, stream.duration, 8)
    first_bin = b == 0
    lead_x = stream.x[first_bin & (stream.p == 1)]
    trail_x = stream.x[first_bin & (stream.p == -1)]
    assert lead_x.mean() > trail_x.mean()


def test_generation_is_deterministic():
    spec = ShapeSpec("circle", 13, (20.0, 28.0), (0.5, -0.5), 4.0)
    a = gen_stream(spec, 8, 48, 48, 80_000, DeterministicRng(7))
    b = gen_stream(spec, 8, 48, 48, 80_000, DeterministicRng(7))
    assert a == b
    assert codec.write_evt(a) == codec.write_evt(b)


def test_escaping_shape_is_rejected():
    spec = ShapeSpec("square", 12, (2.0, 24.0), (-8.0, 0.0), 4.0)
    with pytest.raises(ValueError, match="shape escapes frame"):
        gen_stream(spec, 8, 48, 48, 80_000, DeterministicRng(5))


def test_outline_offsets_are_sorted_and_unique():
    for kind in ("square", "circle", "triangle"):
        offs = outline_offsets(kind, 12)
        assert len(offs) == len({tuple(r) for r in offs.tolist()})
        assert offs.tolist() == sorted(offs.tolist())


def _tree_digest(root: Path) -> str:
    digest = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            digest.update(str(path.relative_to(root)).encode())
            digest.update(path.read_bytes())
    return digest.hexdigest()


def test_gen_dataset_layout_and_reproducibility(tmp_path):
    m1 = gen_dataset(3, 10, tmp_path / "a", master_seed=5)
    assert len(m1) == 30
    assert m1.num_classes == 3
    assert (tmp_path / "a" / "manifest.txt").exists()
    files = list((tmp_path / "a").rglob("*.evt"))
    assert len(files) == 30

    gen_dataset(3, 10, tmp_path / "b", master_seed=5)
    assert _tree_digest(tmp_path / "a") == _tree_digest(tmp_path / "b")

    gen_dataset(3, 10, tmp_path / "c", master_seed=6)
    assert _tree_digest(tmp_path / "a") != _tree_digest(tmp_path / "c")


def test_generated_streams_pass_validation(tmp_path):
    manifest = gen_dataset(2, 5, tmp_path, master_seed=9)
    for path, _, _ in manifest.entries:
        stream = codec.read_evt((tmp_path / path).read_bytes())
        assert validate_stream(stream) == []
        assert len(stream) > 0


def _centroid_accuracy(train_dir, train_manifest, test_dir, test_manifest):
    # nearest class-mean on mass-normalized, center-of-mass aligned images
    def features(manifest, root):
        ys, xs = np.mgrid[0:48, 0:48]
        mats, labels = [], []
        for path, class_id, _ in manifest.entries:
            stream = codec.read_evt((Path(root) / path).read_bytes())
            img = rasterize(stream, 8, 48, 48).values.sum(axis=(0, 1))
            mass = img.sum()
            cy = (ys * img).sum() / mass
            cx = (xs * img).sum() / mass
            img = np.roll(img, (round(24 - cy), round(24 - cx)), axis=(0, 1))
            mats.append(img.ravel() / mass)
            labels.append(class_id)
        return np.stack(mats), np.array(labels)

    x_train, y_train = features(train_manifest, train_dir)
    x_test, y_test = features(test_manifest, test_dir)
    centroids = np.stack([x_train[y_train == k].mean(axis=0) for k in range(3)])
    d = ((x_test[:, None, :] - centroids[None]) ** 2).sum(axis=2)
    return float((d.argmin(axis=1) == y_test).mean())


def test_classes_are_separable_by_centroid_classifier(tmp_path):
    train = gen_dataset(3, 50, tmp_path / "train", master_seed=100)
    test = gen_dataset(3, 50, tmp_path / "test", master_seed=200)
    acc = _centroid_accuracy(tmp_path / "train", train, tmp_path / "test", test)
    assert acc > 0.6, f"centroid accuracy {acc:.3f}"
