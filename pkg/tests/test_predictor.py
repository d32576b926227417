import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hsmatch.errors import ImageTooSmall
from hsmatch.image import GrayImage
from hsmatch.predictor import partition_passes, pass_sites, predict

from oracles import pixel_loop_predict


def test_three_by_three_center_is_pass0():
    parts = partition_passes(GrayImage(np.zeros((3, 3), np.uint8)))
    assert parts[1, 1] == 0
    assert (parts[0, :] == -1).all() and (parts[:, 0] == -1).all()
    assert (parts == -1).sum() == 8


def test_four_by_four_split():
    img = GrayImage(np.zeros((4, 4), np.uint8))
    assert len(pass_sites(img, 0)) == 2 and len(pass_sites(img, 1)) == 2


def test_512_interior_count():
    img = GrayImage(np.zeros((512, 512), np.uint8))
    a, b = len(pass_sites(img, 0)), len(pass_sites(img, 1))
    assert a + b == 510 * 510
    assert abs(a - b) <= 510


def test_too_small():
    with pytest.raises(ImageTooSmall):
        partition_passes(GrayImage(np.zeros((2, 5), np.uint8)))


def test_flat_image_predicts_itself():
    pred = predict(GrayImage(np.full((6, 7), 100, np.uint8)), 0)
    assert (pred.predictions == 100).all() and (pred.errors == 0).all()


def test_half_up_rounding():
    px = np.zeros((3, 3), np.uint8)
    px[0, 1], px[2, 1], px[1, 0], px[1, 2] = 10, 10, 10, 11
    px[1, 1] = 13
    pred = predict(GrayImage(px), 0)
    assert pred.predictions.tolist() == [10]
    assert pred.errors.tolist() == [3]
    # 42/4 = 10.5 rounds up
    px[1, 2] = 12
    assert predict(GrayImage(px), 0).predictions.tolist() == [11]


def test_matches_neighbour_loop(rng):
    for _ in range(10):
        px = rng.integers(0, 256, (16, 16), dtype=np.uint8)
        for pass_id in (0, 1):
            pred = predict(GrayImage(px), pass_id)
            want = pixel_loop_predict(px, pass_id)
            assert pred.sites.tolist() == [s for s, _, _ in want]
            assert pred.predictions.tolist() == [z for _, z, _ in want]
            assert pred.errors.tolist() == [e for _, _, e in want]


@settings(max_examples=30, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(3, 10), st.integers(3, 10))), st.sampled_from([0, 1]))
def test_other_pass_edits_do_not_leak(px, pass_id):
    # changing the pass's own sites never moves its predictions
    img = GrayImage(px)
    before = predict(img, pass_id)
    edited = px.copy().ravel()
    edited[before.sites] = 255 - edited[before.sites]
    after = predict(GrayImage(edited.reshape(px.shape)), pass_id)
    assert np.array_equal(before.predictions, after.predictions)
    assert np.array_equal(after.errors, after.cover_values - after.predictions)


def test_originals_and_determinism(rng):
    x0 = GrayImage(rng.integers(0, 256, (9, 9), dtype=np.uint8))
    xt = GrayImage(rng.integers(0, 256, (9, 9), dtype=np.uint8))
    a, b = predict(xt, 1, x0), predict(xt, 1, x0)
    assert np.array_equal(a.originals, x0.pixels.ravel()[a.sites])
    assert np.array_equal(a.errors, b.errors) and np.array_equal(a.sites, b.sites)


def test_ring_flags_neighbours_of_border():
    pred = predict(GrayImage(np.zeros((6, 6), np.uint8)), 0)
    ys, xs = np.divmod(pred.sites, 6)
    for y, x, r in zip(ys, xs, pred.ring):
        assert r == (y in (1, 4) or x in (1, 4))
