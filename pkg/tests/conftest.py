import numpy as np
import pytest

from evzoom.core import EventStream, FrameTensor


def make_stream(gen, width=48, height=48, duration=10_000, n=200) -> EventStream:
    t = np.sort(gen.integers(0, duration, n))
    return EventStream(
        width,
        height,
        duration,
        t,
        gen.integers(0, width, n),
        gen.integers(0, height, n),
        gen.choice([-1, 1], n),
    )


def make_frames(gen, shape=(8, 2, 48, 48), density=0.2) -> FrameTensor:
    return FrameTensor(gen.poisson(density, shape).astype(np.float32))


@pytest.fixture
def gen():
    return np.random.default_rng(1234)
