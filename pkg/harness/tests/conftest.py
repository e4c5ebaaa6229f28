import pytest

from evz_harness import data


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """Tiny synthetic dataset shared across tests: 3 classes x 10 / x 5."""
    root = tmp_path_factory.mktemp("harness_data")
    train_manifest = data.synth_dataset(root / "train", per_class=10, seed=41)
    test_manifest = data.synth_dataset(root / "test", per_class=5, seed=42)
    return root, train_manifest, test_manifest
