import numpy as np
import pytest

from splatlab.errors import (
    EmbeddingDimensionError,
    ProviderError,
    UndefinedSimilarityError,
)
from splatlab.semantic.embedding import (
    VISION_ONLY,
    VISION_PLUS_TEXT,
    cosine_similarity,
    object_embedding,
    vision_embedding,
)
from splatlab.semantic.index import build_index, query_components
from splatlab.semantic.providers import RemoteEmbeddingProvider, StubEmbeddingProvider
from splatlab.views import sample_icosphere_cameras


class TestVisionEmbedding:
    def test_single_frame_unchanged(self):
        v = np.array([1.0, 2.0, 3.0])
        assert np.array_equal(vision_embedding([v]), v)

    def test_two_point_mean(self):
        out = vision_embedding([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        assert out == pytest.approx([0.5, 0.5])

    def test_matches_summation_oracle(self):
        rng = np.random.default_rng(50)
        vecs = [rng.standard_normal(16) for _ in range(5)]
        expected = sum(vecs[1:], vecs[0].copy()) / 5.0  # independent accumulation
        assert vision_embedding(vecs) == pytest.approx(expected, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            vision_embedding([])

    def test_dimension_mismatch(self):
        with pytest.raises(EmbeddingDimensionError):
            vision_embedding([np.zeros(4), np.zeros(5)])


class TestObjectEmbedding:
    def test_no_text_branch(self):
        v = np.array([0.1, 0.9])
        assert np.array_equal(object_embedding(v), v)

    def test_arithmetic_mean(self):
        out = object_embedding(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        assert out == pytest.approx([0.5, 0.5])

    def test_equals_mean_of_pair(self):
        rng = np.random.default_rng(51)
        v, t = rng.standard_normal(8), rng.standard_normal(8)
        assert object_embedding(v, t) == pytest.approx(vision_embedding([v, t]), abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(EmbeddingDimensionError):
            object_embedding(np.zeros(3), np.zeros(4))


class TestCosine:
    def test_self_similarity(self):
        v = np.array([0.3, -0.2, 0.9])
        assert cosine_similarity(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_scale_invariance(self):
        assert cosine_similarity([1.0, 2.0, 3.0], [2.0, 4.0, 6.0]) == pytest.approx(1.0, abs=1e-12)

    def test_zero_norm_rejected(self):
        with pytest.raises(UndefinedSimilarityError):
            cosine_similarity([0.0, 0.0], [1.0, 0.0])

    def test_result_in_range(self):
        rng = np.random.default_rng(52)
        for _ in range(100):
            s = cosine_similarity(rng.standard_normal(6), rng.standard_normal(6))
            assert -1.0 <= s <= 1.0


class TestStubProvider:
    def test_text_deterministic_and_order_free(self):
        stub = StubEmbeddingProvider(dimension=32)
        a = stub.embed_text("red ball")
        b = stub.embed_text("ball red")
        c = stub.embed_text("Red  Ball!")
        assert np.array_equal(a, b)
        assert np.array_equal(a, c)
        assert np.linalg.norm(a) == pytest.approx(1.0, abs=1e-12)

    def test_multiset_sensitive(self):
        # repeated tokens shift mixtures ("red ball ball" leans toward "ball");
        # normalization hides multiplicity only in the single-token case
        stub = StubEmbeddingProvider(dimension=32)
        assert not np.array_equal(stub.embed_text("red ball"), stub.embed_text("red ball ball"))

    def test_image_content_hash(self, two_sphere_bundle):
        stub = StubEmbeddingProvider(dimension=32)
        frame = two_sphere_bundle.golden
        a, b = stub.embed_images([frame, frame])
        assert np.array_equal(a, b)

    def test_hint_anchors_to_text(self, two_sphere_bundle):
        stub = StubEmbeddingProvider(dimension=32)
        frame = two_sphere_bundle.golden
        (img_vec,) = stub.embed_images([frame], hint="red ball")
        assert np.array_equal(img_vec, stub.embed_text("red ball"))


@pytest.fixture(scope="module")
def index(two_sphere_bundle):
    stub = StubEmbeddingProvider(dimension=64)
    cams = sample_icosphere_cameras(
        12, two_sphere_bundle.scene.bounding_sphere().center, 6.0, width=48, height=48
    )
    return build_index(two_sphere_bundle.scene, cams, stub, k=5)


class TestIndex:

    def test_sources_labelled(self, index):
        assert all(c.source == VISION_PLUS_TEXT for c in index.components)
        assert not index.partial

    def test_exact_label_ranks_first_with_similarity_one(self, index, stub_provider):
        ranking = query_components(index, "red ball", stub_provider)
        assert ranking[0][0] == "red_ball"
        assert ranking[0][1] == pytest.approx(1.0, abs=1e-12)

    def test_ranking_matches_brute_force(self, index):
        stub = StubEmbeddingProvider(dimension=64)
        query = "something round and blue"
        ranking = query_components(index, query, stub)
        q = stub.embed_text(query)
        expected = sorted(
            (
                (c.component_id, cosine_similarity(q, c.object_embedding))
                for c in index.components
            ),
            key=lambda pair: (-pair[1], pair[0]),
        )
        assert ranking == expected

    def test_every_component_scored_once(self, index, stub_provider):
        ranking = query_components(index, "anything", stub_provider)
        assert sorted(cid for cid, _ in ranking) == ["blue_ball", "red_ball"]
        assert all(-1.0 <= s <= 1.0 for _, s in ranking)

    def test_positive_scaling_preserves_ranking(self, index, stub_provider):
        from splatlab.semantic.index import SemanticComponent, SemanticIndex

        scaled = SemanticIndex(
            tuple(
                SemanticComponent(c.component_id, c.label, c.object_embedding * 7.5, c.source)
                for c in index.components
            ),
            index.dimension,
        )
        a = query_components(index, "blue ball", stub_provider)
        b = query_components(scaled, "blue ball", stub_provider)
        assert [cid for cid, _ in a] == [cid for cid, _ in b]

    def test_rebuild_reproduces_embeddings(self, two_sphere_bundle, index):
        stub = StubEmbeddingProvider(dimension=64)
        cams = sample_icosphere_cameras(
            12, two_sphere_bundle.scene.bounding_sphere().center, 6.0, width=48, height=48
        )
        again = build_index(two_sphere_bundle.scene, cams, stub, k=5)
        for a, b in zip(index.components, again.components):
            assert a.component_id == b.component_id
            assert np.array_equal(a.object_embedding, b.object_embedding)

    def test_unlabelled_component_is_vision_only(self, two_sphere_bundle, stub_provider):
        from dataclasses import replace

        from splatlab.core.types import ComposedScene

        bare = ComposedScene(
            tuple(replace(c, label="") for c in two_sphere_bundle.scene.components),
            two_sphere_bundle.scene.global_light,
            two_sphere_bundle.scene.background,
        )
        cams = sample_icosphere_cameras(6, bare.bounding_sphere().center, 6.0, width=32, height=32)
        idx = build_index(bare, cams, stub_provider, k=3)
        assert all(c.source == VISION_ONLY for c in idx.components)

    def test_provider_failure_flags_partial(self, two_sphere_bundle):
        class FlakyStub(StubEmbeddingProvider):
            def embed_images(self, frames, hint=None):
                if hint == "red ball":
                    raise ProviderError("boom")
                return super().embed_images(frames, hint)

        cams = sample_icosphere_cameras(
            6, two_sphere_bundle.scene.bounding_sphere().center, 6.0, width=32, height=32
        )
        idx = build_index(two_sphere_bundle.scene, cams, FlakyStub(dimension=64), k=3)
        assert idx.partial
        assert [cid for cid, _ in idx.failures] == ["red_ball"]
        assert len(idx) == 1

    def test_empty_index_query_rejected(self, stub_provider):
        from splatlab.semantic.index import SemanticIndex

        with pytest.raises(ValueError):
            query_components(SemanticIndex((), 8), "x", stub_provider)


class TestRemoteProvider:
    def test_posts_and_caches(self, tmp_path, monkeypatch):
        calls = []

        class FakeResponse:
            def raise_for_status(self):
                pass

            def json(self):
                n = len(calls[-1]["json"].get("texts", calls[-1]["json"].get("images", [])))
                return {"embeddings": [[0.1] * 8 for _ in range(n)]}

        def fake_post(url, json=None, headers=None, timeout=None):
            calls.append({"url": url, "json": json})
            return FakeResponse()

        import httpx

        monkeypatch.setattr(httpx, "post", fake_post)
        provider = RemoteEmbeddingProvider(
            "http://embed.local/v1", dimension=8, cache_dir=tmp_path
        )
        first = provider.embed_text("hello")
        second = provider.embed_text("hello")  # served from cache
        assert np.array_equal(first, second)
        assert len(calls) == 1

    def test_failure_wrapped(self, monkeypatch):
        import httpx

        def boom(*a, **k):
            raise httpx.ConnectError("nope")

        monkeypatch.setattr(httpx, "post", boom)
        provider = RemoteEmbeddingProvider("http://embed.local/v1", dimension=8)
        with pytest.raises(ProviderError):
            provider.embed_text("hello")
