import math

import numpy as np
import pytest

from splatlab.render.image import ImageRGBA
from splatlab.views import (
    best_view,
    image_alpha_entropy,
    sample_icosphere_cameras,
    select_top_k_views,
    sphere_directions,
)

import oracles


def frame_with_alpha(alpha: np.ndarray) -> ImageRGBA:
    h, w = alpha.shape
    px = np.zeros((h, w, 4), dtype=np.float32)
    px[:, :, 3] = alpha
    return ImageRGBA(px)


class TestSampling:
    def test_count_one_is_pole(self):
        cams = sample_icosphere_cameras(1, (0.0, 0.0, 0.0), 2.0)
        assert len(cams) == 1
        assert cams[0].position == pytest.approx((0.0, 0.0, 2.0))
        assert cams[0].target == (0.0, 0.0, 0.0)

    def test_92_views_distinct_on_sphere(self):
        center = (1.0, -2.0, 0.5)
        radius = 3.0
        cams = sample_icosphere_cameras(92, center, radius)
        assert len(cams) == 92
        positions = np.array([c.position for c in cams])
        dists = np.linalg.norm(positions - np.asarray(center), axis=1)
        assert np.all(np.abs(dists - radius) < 1e-9)
        # pairwise min angular distance strictly positive
        unit = (positions - np.asarray(center)) / radius
        gram = unit @ unit.T
        np.fill_diagonal(gram, -1.0)
        assert gram.max() < 1.0 - 1e-9

    def test_icosphere_counts_exact(self):
        for f, count in ((1, 12), (2, 42), (3, 92)):
            assert len(sphere_directions(count)) == count

    def test_fallback_count(self):
        assert len(sphere_directions(57)) == 57

    def test_deterministic_ordering(self):
        a = sphere_directions(92)
        b = sphere_directions(92)
        assert np.array_equal(a, b)

    def test_count_zero_rejected(self):
        with pytest.raises(ValueError):
            sample_icosphere_cameras(0, (0, 0, 0), 1.0)

    def test_bad_radius_rejected(self):
        with pytest.raises(ValueError):
            sample_icosphere_cameras(4, (0, 0, 0), 0.0)


class TestEntropy:
    def test_uniform_alpha_is_log_n(self):
        for size in (4, 16):
            frame = frame_with_alpha(np.full((size, size), 0.37, dtype=np.float32))
            assert image_alpha_entropy(frame) == pytest.approx(math.log(size * size), abs=1e-9)

    def test_point_mass_is_zero(self):
        alpha = np.zeros((8, 8), dtype=np.float32)
        alpha[3, 5] = 0.8
        assert image_alpha_entropy(frame_with_alpha(alpha)) == 0.0

    def test_all_transparent_is_zero(self):
        assert image_alpha_entropy(frame_with_alpha(np.zeros((8, 8), dtype=np.float32))) == 0.0

    def test_two_pixel_example(self):
        # p = (0.25, 0.75): H = -(0.25 ln 0.25 + 0.75 ln 0.75) ≈ 0.562335
        frame = frame_with_alpha(np.array([[0.2, 0.6]], dtype=np.float32))
        assert image_alpha_entropy(frame) == pytest.approx(0.5623351446188083, abs=1e-7)

    def test_scale_invariance(self):
        # alpha in [0, 0.5] so x2 stays a legal channel; powers of two
        # rescale exactly in binary floating point, so H is bit-identical
        rng = np.random.default_rng(41)
        alpha = rng.uniform(0.0, 0.5, (16, 16)).astype(np.float32)
        base = image_alpha_entropy(frame_with_alpha(alpha))
        for factor in (0.5, 2.0):
            scaled = image_alpha_entropy(frame_with_alpha(alpha * np.float32(factor)))
            assert scaled == base

    def test_matches_fsum_oracle(self):
        rng = np.random.default_rng(42)
        alpha = rng.uniform(0.0, 1.0, (12, 12)).astype(np.float32)
        frame = frame_with_alpha(alpha)
        expected = oracles.shannon_entropy(alpha.astype(np.float64).ravel())
        assert image_alpha_entropy(frame) == pytest.approx(expected, abs=1e-10)

    def test_bounds(self):
        rng = np.random.default_rng(43)
        for _ in range(20):
            alpha = rng.uniform(0.0, 1.0, (10, 10)).astype(np.float32)
            h = image_alpha_entropy(frame_with_alpha(alpha))
            assert 0.0 <= h <= math.log(100) + 1e-9


class TestTopK:
    def test_ranking_matches_exhaustive_sort(self, two_sphere_bundle):
        comp = two_sphere_bundle.scene.components[0]
        cams = sample_icosphere_cameras(12, comp.bounding_sphere.center, 4.0, width=48, height=48)
        ranked = select_top_k_views(comp, cams, k=12)
        entropies = [
            image_alpha_entropy(s.frame) for s in sorted(ranked, key=lambda s: s.frame_index)
        ]
        oracle_order = sorted(range(len(cams)), key=lambda i: (-entropies[i], i))
        assert [s.frame_index for s in ranked] == oracle_order

    def test_top_1_is_argmax(self, two_sphere_bundle):
        comp = two_sphere_bundle.scene.components[1]
        cams = sample_icosphere_cameras(12, comp.bounding_sphere.center, 4.0, width=48, height=48)
        full = select_top_k_views(comp, cams, k=12)
        assert best_view(comp, cams).frame_index == full[0].frame_index
        assert full[0].entropy == max(s.entropy for s in full)

    def test_k_larger_than_count_returns_all(self, two_sphere_bundle):
        comp = two_sphere_bundle.scene.components[0]
        cams = sample_icosphere_cameras(5, comp.bounding_sphere.center, 4.0, width=32, height=32)
        assert len(select_top_k_views(comp, cams, k=50)) == 5

    def test_repeated_calls_identical(self, two_sphere_bundle):
        comp = two_sphere_bundle.scene.components[0]
        cams = sample_icosphere_cameras(6, comp.bounding_sphere.center, 4.0, width=32, height=32)
        a = select_top_k_views(comp, cams, k=3)
        b = select_top_k_views(comp, cams, k=3)
        assert [s.frame_index for s in a] == [s.frame_index for s in b]
        assert all(np.array_equal(x.frame.pixels, y.frame.pixels) for x, y in zip(a, b))

    def test_empty_cameras_rejected(self, two_sphere_bundle):
        with pytest.raises(ValueError):
            select_top_k_views(two_sphere_bundle.scene.components[0], [], k=1)

    def test_bad_k_rejected(self, two_sphere_bundle):
        comp = two_sphere_bundle.scene.components[0]
        cams = sample_icosphere_cameras(3, (0, 0, 0), 4.0)
        with pytest.raises(ValueError):
            select_top_k_views(comp, cams, k=0)
