import numpy as np
import pytest

from evzoom.core import Event, EventStream, FrameTensor
from evzoom.raster import downscale_frames, rasterize, splat, splat_extent

from conftest import make_stream


def test_rasterize_empty_stream_is_all_zero():
    frames = rasterize(EventStream.empty(48, 48, 1000), 8, 48, 48)
    assert frames.values.sum() == 0.0


def test_rasterize_single_event_lands_in_first_bin_channel_zero():
    s = EventStream.from_events(48, 48, 800, [Event(0, 3, 4, 1)])
    frames = rasterize(s, 8, 48, 48)
    assert frames.values[0, 0, 4, 3] == 1.0
    assert frames.values.sum() == 1.0


def test_rasterize_counts_match_event_totals(gen):
    s = make_stream(gen, n=1000)
    frames = rasterize(s, 8, 48, 48)
    assert frames.values.sum() == 1000.0
    assert frames.values[:, 0].sum() == float((s.p == 1).sum())
    assert frames.values[:, 1].sum() == float((s.p == -1).sum())


def test_rasterize_last_bin_absorbs_late_events():
    s = EventStream.from_events(48, 48, 800, [Event(799, 0, 0, -1)])
    frames = rasterize(s, 8, 48, 48)
    assert frames.values[7, 1, 0, 0] == 1.0


def test_rasterize_zero_duration_with_events_fails():
    s = EventStream.from_events(48, 48, 0, [Event(0, 0, 0, 1)])
    with pytest.raises(ValueError, match="zero-duration stream"):
        rasterize(s, 8, 48, 48)


def test_splat_half_scale_collapses_two_by_two():
    source = np.array([[[1.0, 2.0], [3.0, 4.0]]], dtype=np.float32)
    canvas = np.zeros((1, 2, 2), dtype=np.float32)
    splat(source, 0.5, (0, 0), canvas)
    # all four source cells map to floor(i*0.5) = 0
    assert canvas[0, 0, 0] == 10.0
    assert canvas.sum() == 10.0


def test_splat_unit_scale_is_identity():
    gen = np.random.default_rng(2)
    source = gen.poisson(1.0, (2, 6, 5)).astype(np.float32)
    canvas = np.zeros_like(source)
    splat(source, 1.0, (0, 0), canvas)
    assert np.array_equal(canvas, source)


def test_splat_double_scale_leaves_holes():
    source = np.arange(1, 5, dtype=np.float32).reshape(1, 2, 2)
    canvas = np.zeros((1, 4, 4), dtype=np.float32)
    splat(source, 2.0, (0, 0), canvas)
    expected = np.zeros((4, 4), dtype=np.float32)
    for y in range(2):
        for x in range(2):
            expected[2 * y, 2 * x] = source[0, y, x]
    assert np.array_equal(canvas[0], expected)


def test_splat_is_additive_and_preserves_source():
    source = np.ones((1, 3, 3), dtype=np.float32)
    canvas = np.full((1, 3, 3), 5.0, dtype=np.float32)
    splat(source, 1.0, (0, 0), canvas)
    assert canvas.sum() == 9 * 5.0 + 9.0
    assert source.sum() == 9.0


def test_splat_clips_out_of_canvas_destinations():
    source = np.ones((1, 4, 4), dtype=np.float32)
    canvas = np.zeros((1, 4, 4), dtype=np.float32)
    splat(source, 1.0, (2, 2), canvas)
    assert canvas.sum() == 4.0  # only the 2x2 overlap lands


@pytest.mark.parametrize(
    "scale,expected",
    [(0.5, 24), (1.0, 48), (1.5, 71)],
)
def test_splat_extent_matches_arithmetic(scale, expected):
    rect = splat_extent(48, 48, scale, (0, 0))
    assert rect.w == expected and rect.h == expected


def test_splat_extent_is_sound_by_exhaustive_enumeration():
    for scale in (0.25, 0.5, 1.0, 1.5, 2.0):
        for w_src, h_src in ((1, 1), (3, 7), (16, 16), (5, 16)):
            for offset in ((0, 0), (-3, 4)):
                rect = splat_extent(w_src, h_src, scale, offset)
                xs = {int(np.floor(x * scale)) + offset[0] for x in range(w_src)}
                ys = {int(np.floor(y * scale)) + offset[1] for y in range(h_src)}
                assert min(xs) >= rect.x0 and max(xs) < rect.x1
                assert min(ys) >= rect.y0 and max(ys) < rect.y1
                # bounding box is tight
                assert min(xs) == rect.x0 and max(xs) == rect.x1 - 1
                assert min(ys) == rect.y0 and max(ys) == rect.y1 - 1


def test_mass_conservation_inside_canvas(gen):
    source = gen.poisson(0.5, (2, 16, 16)).astype(np.float32)
    canvas = np.zeros((2, 48, 48), dtype=np.float32)
    splat(source, 1.5, (4, 4), canvas)
    assert canvas.sum() == source.sum()


def test_downscale_preserves_event_count(gen):
    big = FrameTensor(gen.poisson(0.05, (4, 2, 128, 128)).astype(np.float32))
    small = downscale_frames(big, 48, 48)
    assert small.shape == (4, 2, 48, 48)
    assert small.values.sum() == big.values.sum()


def test_downscale_identity_when_target_matches(gen):
    frames = FrameTensor(gen.poisson(0.2, (2, 2, 48, 48)).astype(np.float32))
    assert downscale_frames(frames, 48, 48) is frames


def test_downscale_rejects_aspect_change(gen):
    frames = FrameTensor(np.zeros((2, 2, 96, 128), dtype=np.float32))
    with pytest.raises(ValueError, match="non-uniform scale unsupported"):
        downscale_frames(frames, 48, 48)
