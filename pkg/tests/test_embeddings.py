import math

import numpy as np
import pytest

from cskit.embeddings import EmbeddingLoadError, EmbeddingStore, load_embeddings


def write_vectors(tmp_path, text, name="vectors.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoad:
    def test_two_line_fixture(self, tmp_path):
        path = write_vectors(tmp_path, "ice 1 2 3\ncream 3 4 5\n")
        store = load_embeddings(path)
        assert store.dim == 3
        assert len(store) == 2
        assert np.array_equal(store.vector("ice"), np.array([1.0, 2.0, 3.0]))

    def test_wrong_arity_line_skipped_and_counted(self, tmp_path):
        path = write_vectors(tmp_path, "ice 1 2 3\nbad 1 2\ncream 3 4 5\n")
        store = load_embeddings(path)
        assert len(store) == 2
        assert store.skipped_lines == 1

    def test_unparseable_float_skipped(self, tmp_path):
        path = write_vectors(tmp_path, "ice 1 2 3\nbad x y z\n")
        store = load_embeddings(path)
        assert len(store) == 1
        assert store.skipped_lines == 1

    def test_vocab_limit(self, tmp_path):
        path = write_vectors(tmp_path, "ice 1 2 3\ncream 3 4 5\n")
        store = load_embeddings(path, vocab_limit=1)
        assert len(store) == 1
        assert "ice" in store and "cream" not in store

    def test_duplicate_token_keeps_first_and_counts(self, tmp_path):
        path = write_vectors(tmp_path, "ice 1 2 3\nice 9 9 9\n")
        store = load_embeddings(path)
        assert len(store) == 1
        assert store.skipped_lines == 1
        assert np.array_equal(store.vector("ice"), np.array([1.0, 2.0, 3.0]))

    def test_empty_file_is_an_error(self, tmp_path):
        path = write_vectors(tmp_path, "")
        with pytest.raises(EmbeddingLoadError):
            load_embeddings(path)

    def test_missing_file_is_an_error(self, tmp_path):
        with pytest.raises(EmbeddingLoadError):
            load_embeddings(tmp_path / "nope.txt")


class TestConceptVector:
    def make_store(self):
        return EmbeddingStore(
            {"ice": np.array([1.0, 2.0, 3.0]), "cream": np.array([3.0, 4.0, 5.0])},
            dim=3,
        )

    def test_known_token(self):
        store = self.make_store()
        assert np.array_equal(store.concept_vector("ice"), np.array([1.0, 2.0, 3.0]))

    def test_multi_word_mean(self):
        store = self.make_store()
        # hand-computed componentwise mean of the two fixture vectors
        assert np.array_equal(store.concept_vector("ice cream"), np.array([2.0, 3.0, 4.0]))

    def test_partial_multi_word_uses_known_words_only(self):
        store = self.make_store()
        assert np.array_equal(store.concept_vector("dry ice"), np.array([1.0, 2.0, 3.0]))

    def test_unknown_concept_is_absent(self):
        store = self.make_store()
        assert store.concept_vector("volcano") is None
        assert store.concept_vector("hot volcano") is None


class TestCosine:
    def make_store(self):
        return EmbeddingStore(
            {
                "right": np.array([1.0, 0.0, 0.0]),
                "up": np.array([0.0, 1.0, 0.0]),
                "diag": np.array([1.0, 1.0, 0.0]),
                "zero": np.array([0.0, 0.0, 0.0]),
            },
            dim=3,
        )

    def test_identical_vectors(self):
        assert self.make_store().cosine("right", "right") == pytest.approx(1.0)

    def test_orthogonal_vectors(self):
        assert self.make_store().cosine("right", "up") == 0.0

    def test_hand_computed_value(self):
        # (1,1,0) . (1,0,0) / (sqrt(2) * 1) = 0.7071...
        assert self.make_store().cosine("diag", "right") == pytest.approx(0.7071, abs=1e-4)

    def test_absent_vector_gives_none(self):
        assert self.make_store().cosine("right", "volcano") is None

    def test_zero_norm_gives_none(self):
        assert self.make_store().cosine("right", "zero") is None

    def test_symmetry(self):
        store = self.make_store()
        assert store.cosine("diag", "up") == store.cosine("up", "diag")

    def test_bounded_by_one(self):
        store = self.make_store()
        for a in ("right", "up", "diag"):
            for b in ("right", "up", "diag"):
                assert abs(store.cosine(a, b)) <= 1.0 + 1e-9

    def test_positive_scaling_leaves_cosines_unchanged(self):
        base = {
            "a": np.array([0.3, -1.2, 2.0]),
            "b": np.array([1.5, 0.7, -0.2]),
            "c": np.array([-0.4, 0.9, 1.1]),
        }
        scaled = {k: 17.5 * v for k, v in base.items()}
        s1 = EmbeddingStore(base, dim=3)
        s2 = EmbeddingStore(scaled, dim=3)
        for a in base:
            for b in base:
                assert s1.cosine(a, b) == pytest.approx(s2.cosine(a, b), abs=1e-9)

    def test_memoization_caches_pairs(self):
        store = self.make_store()
        value = store.cosine("diag", "right")
        assert ("diag", "right") in store._pair_cache
        assert store.cosine("right", "diag") == value  # unordered key


def test_store_cosine_matches_independent_formula():
    rng = np.random.default_rng(7)
    vectors = {f"t{i}": rng.normal(size=5) for i in range(6)}
    store = EmbeddingStore(dict(vectors), dim=5)
    for a in vectors:
        for b in vectors:
            expected = float(
                np.dot(vectors[a], vectors[b])
                / (math.sqrt(np.dot(vectors[a], vectors[a])) * math.sqrt(np.dot(vectors[b], vectors[b])))
            )
            assert store.cosine(a, b) == pytest.approx(expected, abs=1e-12)
