import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rclbp import clbp
from rclbp.clbp import ClbpParams, GlobalThresholds
from rclbp.imagecore import TEXTURE_KINDS, synth_texture

from . import oracles


def bilinear(img, x, y):
    x0, y0 = math.floor(x), math.floor(y)
    tx, ty = x - x0, y - y0
    return (
        img[y0, x0] * (1 - tx) * (1 - ty)
        + img[y0, x0 + 1] * tx * (1 - ty)
        + img[y0 + 1, x0] * (1 - tx) * ty
        + img[y0 + 1, x0 + 1] * tx * ty
    )


class TestParams:
    def test_dims(self):
        p = ClbpParams()
        assert (p.n_patterns, p.clbp_dim, p.border) == (10, 200, 1)

    @pytest.mark.parametrize("kwargs", [{"neighbors": 3}, {"radius": 0.5}, {"mapping": "u2"}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ClbpParams(**kwargs)


class TestSampleNeighbors:
    def test_lattice_p4(self):
        img = np.arange(25, dtype=float).reshape(5, 5)
        g = clbp.sample_neighbors(img, 2, 2, ClbpParams(neighbors=4))
        # right, up, left, down
        np.testing.assert_array_equal(g, [img[2, 3], img[1, 2], img[2, 1], img[3, 2]])

    def test_constant(self):
        g = clbp.sample_neighbors(np.full((3, 3), 42.0), 1, 1)
        np.testing.assert_array_equal(g, 42.0)

    def test_diagonal_bilinear(self):
        img = np.array([[1.0, 20.0, 3.0], [40.0, 5.0, 60.0], [7.0, 80.0, 9.0]])
        g = clbp.sample_neighbors(img, 1, 1)
        for k in range(8):
            a = 2 * math.pi * k / 8
            want = bilinear(img, 1 + math.cos(a), 1 - math.sin(a)) if k % 2 else None
            if want is not None:
                assert g[k] == pytest.approx(want, rel=1e-12)
        assert g[0] == 60.0 and g[2] == 20.0 and g[4] == 40.0 and g[6] == 80.0

    def test_radius_two_interpolated(self, rng):
        img = rng.random((7, 7)) * 100
        p = ClbpParams(neighbors=12, radius=2.0)
        g = clbp.sample_neighbors(img, 3, 3, p)
        for k in range(12):
            a = 2 * math.pi * k / 12
            x, y = 3 + 2 * math.cos(a), 3 - 2 * math.sin(a)
            want = img[round(y), round(x)] if abs(x - round(x)) < 1e-10 and abs(y - round(y)) < 1e-10 else bilinear(img, x, y)
            assert g[k] == pytest.approx(want, rel=1e-12)

    def test_border_pixel_rejected(self):
        with pytest.raises(ValueError):
            clbp.sample_neighbors(np.zeros((5, 5)), 0, 2)


class TestThresholds:
    def test_constant(self):
        t = clbp.compute_global_thresholds(np.full((6, 6), 9.0))
        assert (t.c, t.c_i) == (0.0, 9.0)

    def test_checker_p4(self):
        img = 255.0 * (np.add.outer(np.arange(8), np.arange(8)) % 2)
        assert clbp.compute_global_thresholds(img, ClbpParams(neighbors=4)).c == 255.0

    def test_no_interior(self):
        with pytest.raises(ValueError):
            clbp.compute_global_thresholds(np.zeros((2, 9)))


class TestCodes:
    def test_flat_patch(self):
        s, m, c = clbp.clbp_codes(3.0, [3.0] * 8, GlobalThresholds(0.0, 0.0))
        assert (s, m) == (255, 255)

    def test_hand_example(self):
        s, m, c = clbp.clbp_codes(5, [6, 7, 8, 9, 4, 3, 2, 1], GlobalThresholds(3.0, 5.0))
        assert (s, m, c) == (15, 204, 1)

    def test_center_threshold_tie(self):
        assert clbp.clbp_codes(4.0, [0] * 8, GlobalThresholds(1.0, 4.0))[2] == 1
        assert clbp.clbp_codes(3.9, [0] * 8, GlobalThresholds(1.0, 4.0))[2] == 0


class TestRiu2:
    @pytest.mark.parametrize("code, label", [(0, 0), (255, 8), (0b00001111, 4), (0b01010101, 9)])
    def test_examples(self, code, label):
        assert clbp.riu2_map(code, 8) == label

    @pytest.mark.parametrize("P", [4, 8, 12])
    def test_matches_transition_oracle(self, P):
        labels = clbp.riu2_map(np.arange(1 << P), P)
        for code in range(1 << P):
            want = bin(code).count("1") if oracles.transitions(code, P) <= 2 else P + 1
            assert labels[code] == want

    @settings(max_examples=100)
    @given(st.integers(0, 255), st.integers(0, 7))
    def test_rotation_invariant(self, code, r):
        rotated = ((code << r) | (code >> (8 - r))) & 0xFF
        assert clbp.riu2_map(rotated, 8) == clbp.riu2_map(code, 8)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            clbp.riu2_map(256, 8)


class TestHistograms:
    def test_constant_single_bin(self):
        f = clbp.extract_clbp_histogram(np.full((10, 10), 77.0))
        assert f.histogram.shape == (200,)
        assert f.joint()[8, 8, 1] == 1.0
        assert f.histogram.sum() == 1.0

    def test_constant_lbp(self):
        h = clbp.extract_lbp_histogram(np.full((10, 10), 77.0))
        assert h.shape == (10,)
        assert h[8] == 1.0

    def test_bin_index_injective(self):
        idx = {clbp.joint_bin_index(s, m, c, 8) for s in range(10) for m in range(10) for c in range(2)}
        assert idx == set(range(200))

    @pytest.mark.parametrize("kind", ["grating", "blobs", "speckle"])
    def test_sign_marginal_is_lbp(self, kind):
        img = synth_texture(kind, 40, 7, seed=2)
        joint = clbp.extract_clbp_histogram(img).joint()
        np.testing.assert_allclose(joint.sum(axis=(1, 2)), clbp.extract_lbp_histogram(img), atol=1e-15)

    def test_matches_pixelwise_codes(self, rng):
        img = rng.integers(0, 8, size=(9, 11)).astype(float) * 30
        p = ClbpParams()
        thr = clbp.compute_global_thresholds(img, p)
        hist = np.zeros(p.clbp_dim)
        for y in range(1, 8):
            for x in range(1, 10):
                s, m, c = clbp.clbp_codes(img[y, x], clbp.sample_neighbors(img, x, y, p), thr, tol=1e-9 * 210)
                hist[clbp.joint_bin_index(clbp.riu2_map(s, 8), clbp.riu2_map(m, 8), c, 8)] += 1
        np.testing.assert_allclose(clbp.extract_clbp_histogram(img, p).histogram, hist / hist.sum(), atol=1e-15)

    @pytest.mark.parametrize("kind", TEXTURE_KINDS)
    def test_affine_invariance(self, kind, rng):
        img = synth_texture(kind, 32, 6, seed=1)
        base = clbp.extract_clbp_histogram(img).histogram
        for _ in range(5):
            a, b = rng.uniform(0.1, 10), rng.uniform(-500, 500)
            assert np.abs(clbp.extract_clbp_histogram(a * img + b).histogram - base).sum() <= 1e-12

    @pytest.mark.parametrize("kind", TEXTURE_KINDS)
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_rot90_invariance(self, kind, k):
        img = synth_texture(kind, 32, 6, seed=3)
        a = clbp.extract_clbp_histogram(img).histogram
        b = clbp.extract_clbp_histogram(np.rot90(img, k)).histogram
        assert np.abs(a - b).sum() <= 1e-6

    def test_feature_modes(self):
        img = synth_texture("blobs", 16)
        assert clbp.extract_features(img, "clbp").shape == (200,)
        assert clbp.extract_features(img, "lbp").shape == (10,)
        with pytest.raises(ValueError):
            clbp.extract_features(img, "hog")
