import numpy as np
import pytest

from evzoom import codec
from evzoom.cli import main
from evzoom.core import FrameTensor
from evzoom.raster import rasterize


@pytest.fixture(scope="module")
def dataset_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_data")
    code = main(
        ["synth", "--classes", "3", "--per-class", "4", "--seed", "5", "--out", str(root)]
    )
    assert code == 0
    return root


def test_synth_writes_dataset(dataset_dir):
    manifest = codec.read_manifest((dataset_dir / "manifest.txt").read_text())
    assert len(manifest) == 12
    assert manifest.num_classes == 3
    for path, _, _ in manifest.entries:
        assert (dataset_dir / path).exists()


def test_rasterize_roundtrip(dataset_dir, tmp_path):
    manifest = codec.read_manifest((dataset_dir / "manifest.txt").read_text())
    src = dataset_dir / manifest.entries[0][0]
    out = tmp_path / "sample.evzf"
    assert main(["rasterize", "--bins", "8", str(src), str(out)]) == 0
    frames, track = codec.read_evzf(out.read_bytes())
    stream = codec.read_evt(src.read_bytes())
    assert track is None
    assert frames == rasterize(stream, 8, 48, 48)


def test_augment_end_to_end(dataset_dir, tmp_path):
    out = tmp_path / "aug"
    code = main(
        [
            "augment",
            "--manifest", str(dataset_dir / "manifest.txt"),
            "--strategy", "eventzoom",
            "--mixnum", "1",
            "--lambda-min", "0.5",
            "--lambda-max", "1.5",
            "--seed", "3",
            "--out", str(out),
        ]
    )
    assert code == 0
    manifest = codec.read_manifest((out / "manifest.txt").read_text())
    assert len(manifest) == 12
    frames, track = codec.read_evzf((out / manifest.entries[0][0]).read_bytes())
    assert frames.shape == (8, 2, 48, 48)
    assert track.num_classes == 3


def test_augment_rejects_unknown_strategy(dataset_dir, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(
            [
                "augment",
                "--manifest", str(dataset_dir / "manifest.txt"),
                "--strategy", "zoomzoom",
                "--out", str(tmp_path / "x"),
            ]
        )
    assert exc.value.code == 2


@pytest.mark.parametrize("bounds", [("0", "1.5"), ("1.5", "0.5")])
def test_augment_rejects_bad_lambda_bounds(dataset_dir, tmp_path, bounds):
    with pytest.raises(SystemExit) as exc:
        main(
            [
                "augment",
                "--manifest", str(dataset_dir / "manifest.txt"),
                "--lambda-min", bounds[0],
                "--lambda-max", bounds[1],
                "--out", str(tmp_path / "x"),
            ]
        )
    assert exc.value.code == 2


def test_augment_reports_failure_when_nothing_succeeds(tmp_path):
    manifest = codec.DatasetManifest(
        2, [("missing_a.evt", 0, "events"), ("missing_b.evt", 1, "events")]
    )
    (tmp_path / "manifest.txt").write_text(codec.write_manifest(manifest))
    code = main(
        ["augment", "--manifest", str(tmp_path / "manifest.txt"), "--out", str(tmp_path / "out")]
    )
    assert code == 1


def test_viz_all_zero_tensor_is_black(tmp_path):
    frames = FrameTensor(np.zeros((2, 2, 8, 8), dtype=np.float32))
    src = tmp_path / "zero.evzf"
    src.write_bytes(codec.write_evzf(frames))
    out = tmp_path / "imgs"
    assert main(["viz", str(src), "--out", str(out)]) == 0
    files = sorted(out.glob("*.pgm"))
    assert len(files) == 4  # one per (t, c)
    for f in files:
        lines = f.read_text().splitlines()
        assert lines[0] == "P2"
        assert lines[1] == "8 8"
        values = " ".join(lines[3:]).split()
        assert set(values) == {"0"}


def test_viz_compare_writes_strips(tmp_path, dataset_dir):
    manifest = codec.read_manifest((dataset_dir / "manifest.txt").read_text())
    src = dataset_dir / manifest.entries[0][0]
    a = tmp_path / "a.evzf"
    assert main(["rasterize", str(src), str(a)]) == 0
    out = tmp_path / "cmp"
    assert main(["viz", str(a), "--out", str(out), "--compare", str(a)]) == 0
    assert (out / "compare_c0.pgm").exists()
    assert (out / "compare_c1.pgm").exists()


def test_stats_prints_histogram(dataset_dir, tmp_path, capsys):
    out = tmp_path / "aug"
    main(
        [
            "augment",
            "--manifest", str(dataset_dir / "manifest.txt"),
            "--seed", "9",
            "--out", str(out),
        ]
    )
    capsys.readouterr()
    assert main(["stats", "--manifest", str(out / "manifest.txt"), "--bins", "5"]) == 0
    table = capsys.readouterr().out
    assert table.startswith("bin_lo\tbin_hi\tcount\tcumulative")
    counts = [int(line.split("\t")[2]) for line in table.splitlines()[1:-1]]
    assert sum(counts) == 12


def test_bench_zero_iterations(capsys):
    assert main(["bench", "--strategy", "eventzoom", "--iterations", "0"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines() == ["strategy\tmode\tmean_ms\tmedian_ms\tp99_ms"]


def test_bench_unknown_strategy_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--strategy", "warp", "--iterations", "1"])
    assert exc.value.code == 2


def test_runtime_errors_exit_one(tmp_path):
    assert main(["rasterize", str(tmp_path / "absent.evt"), str(tmp_path / "o.evzf")]) == 1
