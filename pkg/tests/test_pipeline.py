import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rclbp import pipeline as pl
from rclbp.imagecore import NoiseSpec, inject_gaussian_noise, rmse, synth_texture
from rclbp.nlmeans import NlMeansParams, nl_means_filter
from rclbp.wavelet import WaveletParams, idwt2, dwt2

SMALL = pl.DenoiseConfig(nl=NlMeansParams(search_radius=3, patch_radius=1))


class TestMethodNoise:
    def test_self_difference(self, rng):
        v = rng.random((5, 5))
        np.testing.assert_array_equal(pl.method_noise(v, v), 0.0)

    def test_offset(self, rng):
        i_f = rng.integers(0, 200, size=(4, 6)).astype(float)
        np.testing.assert_array_equal(pl.method_noise(i_f + 7, i_f), 7.0)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            pl.method_noise(np.zeros((3, 3)), np.zeros((3, 4)))


class TestDenoise:
    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            pl.DenoiseConfig(mode="median")

    def test_mode_none(self, rng):
        v = rng.random((10, 10))
        out = pl.rclbp_denoise(v, pl.DenoiseConfig(mode="none"))
        np.testing.assert_array_equal(out, v)

    def test_mode_nlmeans_only(self, rng):
        v = rng.random((10, 10)) * 255
        cfg = pl.DenoiseConfig(mode="nlmeans_only", nl=SMALL.nl)
        np.testing.assert_array_equal(pl.rclbp_denoise(v, cfg), nl_means_filter(v, SMALL.nl))

    def test_constant_fixed_point(self):
        out = pl.rclbp_denoise(np.full((24, 24), 140.0))
        np.testing.assert_array_equal(out, 140.0)

    def test_stages_compose(self, rng):
        v = rng.random((20, 20)) * 255
        s = pl.rclbp_stages(v, SMALL)
        np.testing.assert_array_equal(s.filtered, nl_means_filter(v, SMALL.nl))
        np.testing.assert_array_equal(s.method_noise, v - s.filtered)
        np.testing.assert_array_equal(s.restored, s.filtered + s.detail)
        np.testing.assert_array_equal(pl.rclbp_denoise(v, SMALL), s.restored)

    def test_no_shrinkage_restores_input(self, rng):
        # with every threshold zero D = MN, so B = v up to transform rounding
        v = rng.random((20, 20)) * 255
        s = pl.rclbp_stages(v, SMALL)
        recon = idwt2(dwt2(s.method_noise, SMALL.wav))
        np.testing.assert_allclose(s.filtered + recon, v, atol=1e-9)

    def test_sinusoid_gain(self):
        clean = synth_texture("sinusoid", 128, 16, seed=0)
        v = inject_gaussian_noise(clean, NoiseSpec(20.0, 5))
        assert rmse(pl.rclbp_denoise(v), clean) < rmse(v, clean)

    @pytest.mark.parametrize("kind", ["sinusoid", "grating", "blobs"])
    def test_gain_across_seeds(self, kind):
        wins = 0
        for seed in range(6):
            clean = synth_texture(kind, 48, 12, seed=seed)
            v = inject_gaussian_noise(clean, NoiseSpec(20.0, 100 + seed))
            wins += rmse(pl.rclbp_denoise(v), clean) < rmse(v, clean)
        assert wins == 6

    def test_deterministic(self, rng):
        v = rng.random((16, 16)) * 255
        np.testing.assert_array_equal(pl.rclbp_denoise(v, SMALL), pl.rclbp_denoise(v, SMALL))


class TestBatch:
    def test_empty(self):
        assert pl.denoise_batch([]) == []

    def test_singleton(self, rng):
        v = rng.random((12, 12)) * 255
        (out,) = pl.denoise_batch([v], SMALL)
        np.testing.assert_array_equal(out, pl.rclbp_denoise(v, SMALL))

    @settings(max_examples=5, deadline=None)
    @given(st.permutations(list(range(4))), st.sampled_from([1, 3]))
    def test_permutation_equivariant(self, order, workers):
        gen = np.random.default_rng(0)
        imgs = [gen.random((10, 10)) * 255 for _ in range(4)]
        ref = pl.denoise_batch(imgs, SMALL)
        out = pl.denoise_batch([imgs[i] for i in order], SMALL, workers=workers)
        for k, i in enumerate(order):
            np.testing.assert_array_equal(out[k], ref[i])

    def test_error_carries_index(self, rng):
        imgs = [rng.random((10, 10)), np.zeros((2, 2)), rng.random((10, 10))]
        with pytest.raises(pl.BatchError) as exc:
            pl.denoise_batch(imgs, SMALL)
        assert exc.value.index == 1
