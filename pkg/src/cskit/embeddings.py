"""Word-vector store with concept-level cosine similarity.

The file format is the plain GloVe text layout: one ``token v1 ... vd`` line
per word. Multi-word concepts are embedded as the mean of their known word
vectors; a concept with no known word has no vector, and similarities
involving it are undefined (None) rather than zero.
"""

from __future__ import annotations

import numpy as np

from .graph import normalize_concept


class EmbeddingLoadError(Exception):
    """Raised when a vector file cannot be loaded."""


class EmbeddingStore:
    def __init__(self, vectors: dict[str, np.ndarray], dim: int, skipped_lines: int = 0):
        self.dim = dim
        self._vectors = vectors
        self.skipped_lines = skipped_lines
        # Memoized cosine per unordered concept pair. Concurrent readers may
        # race on insertion; entries are idempotent so last-write-wins is fine.
        self._pair_cache: dict[tuple[str, str], float | None] = {}

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, token: str) -> bool:
        return token in self._vectors

    def vector(self, token: str) -> np.ndarray | None:
        return self._vectors.get(token)

    def concept_vector(self, concept: str) -> np.ndarray | None:
        """Vector for a concept; mean of known word vectors for multi-word."""
        surface = normalize_concept(concept)
        vec = self._vectors.get(surface)
        if vec is not None:
            return vec
        words = surface.split(" ")
        if len(words) < 2:
            return None
        known = [self._vectors[w] for w in words if w in self._vectors]
        if not known:
            return None
        return np.mean(known, axis=0)

    def cosine(self, a: str, b: str) -> float | None:
        """Cosine similarity between two concepts, or None when undefined."""
        key = (normalize_concept(a), normalize_concept(b))
        if key[0] > key[1]:
            key = (key[1], key[0])
        if key in self._pair_cache:
            return self._pair_cache[key]
        value = self._cosine_uncached(key[0], key[1])
        self._pair_cache[key] = value
        return value

    def _cosine_uncached(self, a: str, b: str) -> float | None:
        va = self.concept_vector(a)
        vb = self.concept_vector(b)
        if va is None or vb is None:
            return None
        na = float(np.linalg.norm(va))
        nb = float(np.linalg.norm(vb))
        if na == 0.0 or nb == 0.0:
            return None
        value = float(np.dot(va, vb) / (na * nb))
        return max(-1.0, min(1.0, value))


def load_embeddings(path, vocab_limit: int | None = None) -> EmbeddingStore:
    """Load up to vocab_limit vectors; dim is inferred from the first line.

    Lines with the wrong arity or unparseable floats are skipped and counted
    on the returned store. Raises EmbeddingLoadError when nothing loads.
    """
    vectors: dict[str, np.ndarray] = {}
    dim = None
    skipped = 0
    try:
        handle = open(path, "rt", encoding="utf-8")
    except OSError as exc:
        raise EmbeddingLoadError(f"cannot read vector file {path}: {exc}") from exc
    with handle:
        for line in handle:
            if vocab_limit is not None and len(vectors) >= vocab_limit:
                break
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2:
                if line.strip():
                    skipped += 1
                continue
            token, values = parts[0], parts[1:]
            if dim is not None and len(values) != dim:
                skipped += 1
                continue
            try:
                vec = np.asarray([float(v) for v in values], dtype=np.float64)
            except ValueError:
                skipped += 1
                continue
            if dim is None:
                dim = len(values)
            if token in vectors:
                skipped += 1
                continue
            vectors[token] = vec
    if not vectors or dim is None:
        raise EmbeddingLoadError(f"no usable vectors in {path}")
    return EmbeddingStore(vectors, dim, skipped)
