"""Read-only word-vector store plus the span-similarity primitives.

Vector files are word2vec-style UTF-8 text: an optional "count dim" header
line followed by one "word c1 ... cd" row per word. Vocabulary lookups are
exact; words missing from the store are skipped when averaging spans.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "EmbeddingFormatError",
    "EmbeddingStore",
    "SpanVector",
    "average_embedding",
    "cosine_similarity",
    "load_embeddings",
]


class EmbeddingFormatError(ValueError):
    """Raised when a vector file cannot be parsed."""


@dataclass(frozen=True, eq=False)
class SpanVector:
    """Mean embedding of a word span: the vector plus how many words of the
    span were actually found in the store (0 means a zero vector)."""

    vector: np.ndarray
    support: int


class EmbeddingStore:
    """Immutable word -> dense vector table of fixed dimension."""

    def __init__(self, dim: int, vectors: Mapping[str, Sequence[float]] | None = None):
        if dim <= 0:
            raise ValueError("embedding dimension must be positive")
        self.dim = dim
        self._index: dict[str, int] = {}
        rows = []
        for word, vec in (vectors or {}).items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (dim,):
                raise ValueError(f"vector for {word!r} has shape {arr.shape}, expected ({dim},)")
            if not np.isfinite(arr).all():
                raise ValueError(f"vector for {word!r} has non-finite components")
            if word not in self._index:
                self._index[word] = len(rows)
                rows.append(arr)
        self._matrix = np.vstack(rows) if rows else np.zeros((0, dim))

    @classmethod
    def from_rows(cls, dim: int, words: list[str], matrix: np.ndarray) -> "EmbeddingStore":
        store = cls.__new__(cls)
        store.dim = dim
        store._index = {w: i for i, w in enumerate(words)}
        store._matrix = matrix
        return store

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __iter__(self):
        return iter(self._index)

    def get(self, word: str) -> np.ndarray | None:
        """Vector for `word`, or None when the word is unknown (a stored
        zero vector and a missing word are distinguishable)."""
        row = self._index.get(word)
        if row is None:
            return None
        return self._matrix[row]

    def row_index(self, word: str) -> int | None:
        return self._index.get(word)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def multi_syllable_words(self) -> frozenset[str]:
        """Vocabulary entries usable as a segmentation lexicon."""
        return frozenset(w for w in self._index if "_" in w)


def load_embeddings(path: str | Path) -> EmbeddingStore:
    """Parse a text vector file into a store.

    The header line is optional; without one the dimension is inferred from
    the first row. The first occurrence of a duplicated word wins. Rows with
    the wrong arity or non-numeric components are reported with their line
    number.
    """
    path = Path(path)
    words: list[str] = []
    index: dict[str, int] = {}
    rows: list[np.ndarray] = []
    dim: int | None = None
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and _is_int(parts[0]) and _is_int(parts[1]):
                dim = int(parts[1])
                if dim <= 0:
                    raise EmbeddingFormatError(f"{path}:1: non-positive dimension in header")
                continue
            word = parts[0]
            try:
                vec = np.asarray(parts[1:], dtype=np.float64)
            except ValueError:
                raise EmbeddingFormatError(
                    f"{path}:{lineno}: non-numeric vector component"
                ) from None
            if not np.isfinite(vec).all():
                raise EmbeddingFormatError(f"{path}:{lineno}: non-finite vector component")
            if dim is None:
                if vec.shape[0] == 0:
                    raise EmbeddingFormatError(f"{path}:{lineno}: row has no vector components")
                dim = vec.shape[0]
            if vec.shape[0] != dim:
                raise EmbeddingFormatError(
                    f"{path}:{lineno}: expected {dim} components, found {vec.shape[0]}"
                )
            if word in index:
                continue
            index[word] = len(rows)
            words.append(word)
            rows.append(vec)
    if dim is None:
        raise EmbeddingFormatError(f"{path}: empty vector file")
    matrix = np.vstack(rows) if rows else np.zeros((0, dim))
    return EmbeddingStore.from_rows(dim, words, matrix)


def _is_int(token: str) -> bool:
    try:
        int(token)
        return True
    except ValueError:
        return False


def average_embedding(store: EmbeddingStore, words: Iterable[str]) -> SpanVector:
    """Arithmetic mean of the vectors of the in-vocabulary words. An empty
    or fully out-of-vocabulary span yields support 0 and the zero vector.

    Summation runs in sorted word order so the result is bitwise identical
    for any permutation of the span.
    """
    counts = Counter(w for w in words if w in store)
    total = np.zeros(store.dim)
    found = 0
    for word in sorted(counts):
        total += counts[word] * store.get(word)
        found += counts[word]
    if found == 0:
        return SpanVector(vector=total, support=0)
    return SpanVector(vector=total / found, support=found)


def cosine_similarity(u: SpanVector, v: SpanVector) -> float | None:
    """Cosine of the two span vectors, or None when either has zero norm
    (including empty support). Callers treat None as similarity 0."""
    nu = float(np.sqrt(u.vector @ u.vector))
    nv = float(np.sqrt(v.vector @ v.vector))
    if nu == 0.0 or nv == 0.0:
        return None
    return float((u.vector @ v.vector) / (nu * nv))
