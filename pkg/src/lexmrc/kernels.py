"""Numeric inner loops shared by the scoring functions.

Each kernel exists twice: a numba ``@njit`` build and a vectorized
pure-numpy fallback. The active backend is picked at import time from the
``LEXMRC_BACKEND`` environment variable:

* unset or ``auto`` -- numba when importable, numpy otherwise
* ``numba``         -- force numba (raises if numba is missing)
* ``numpy``         -- force the pure-numpy path

``benchmarks/kernel_bench.py`` times both builds side by side.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "HAS_NUMBA",
    "extreme_pair_distance",
    "max_window_cosine",
    "max_window_sum",
    "warmup",
]


# ---------------------------------------------------------------------------
# pure-numpy builds
# ---------------------------------------------------------------------------

def max_window_sum_numpy(weights: np.ndarray, width: int) -> float:
    """Best sum over contiguous windows of `width` entries of `weights`.

    Windows may start at any position; positions past the end contribute
    nothing. All weights are >= 0, so truncated tail windows never beat the
    last full window and only full windows need to be enumerated.
    """
    n = weights.shape[0]
    if n == 0 or width <= 0:
        return 0.0
    if width >= n:
        return float(weights.sum())
    prefix = np.concatenate(([0.0], np.cumsum(weights)))
    return float((prefix[width:] - prefix[:-width]).max())


def extreme_pair_distance_numpy(pos_a: np.ndarray, pos_b: np.ndarray, use_max: bool) -> int:
    """Smallest (or largest) |p - q| over position pairs, p from `pos_a`
    and q from `pos_b`. Pairs at the same position are skipped. Returns -1
    when no valid pair exists.
    """
    if pos_a.shape[0] == 0 or pos_b.shape[0] == 0:
        return -1
    dist = np.abs(pos_a[:, None] - pos_b[None, :])
    valid = dist > 0
    if not valid.any():
        return -1
    return int(dist[valid].max() if use_max else dist[valid].min())


def max_window_cosine_numpy(
    vec_prefix: np.ndarray,
    cnt_prefix: np.ndarray,
    target: np.ndarray,
    width: int,
) -> float:
    """Best cosine between `target` and the mean vector of any window.

    `vec_prefix` is the (n+1, dim) running sum of per-token vectors (zero
    rows for unknown tokens) and `cnt_prefix` the (n+1,) running count of
    known tokens. Windows with no known token or a zero-norm mean count as
    similarity 0. Returns 0.0 when there are no windows or `target` has
    zero norm.
    """
    n = cnt_prefix.shape[0] - 1
    if n == 0 or width <= 0:
        return 0.0
    target_norm = float(np.sqrt(target @ target))
    if target_norm == 0.0:
        return 0.0
    w = min(width, n)
    sums = vec_prefix[w:] - vec_prefix[:-w]
    cnts = (cnt_prefix[w:] - cnt_prefix[:-w]).astype(np.float64)
    means = sums / np.maximum(cnts, 1.0)[:, None]
    norms = np.sqrt((means * means).sum(axis=1))
    scores = np.zeros(cnts.shape[0])
    valid = (cnts > 0) & (norms > 0)
    scores[valid] = (means[valid] @ target) / (norms[valid] * target_norm)
    return float(scores.max())


# ---------------------------------------------------------------------------
# numba builds
# ---------------------------------------------------------------------------

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency
    njit = None
    HAS_NUMBA = False

if HAS_NUMBA:

    @njit(cache=True, nogil=True)
    def max_window_sum_jit(weights, width):
        n = weights.shape[0]
        if n == 0 or width <= 0:
            return 0.0
        best = 0.0
        for j in range(n):
            end = j + width
            if end > n:
                end = n
            s = 0.0
            for k in range(j, end):
                s += weights[k]
            if s > best:
                best = s
        return best

    @njit(cache=True, nogil=True)
    def extreme_pair_distance_jit(pos_a, pos_b, use_max):
        best = -1
        for i in range(pos_a.shape[0]):
            for j in range(pos_b.shape[0]):
                d = pos_a[i] - pos_b[j]
                if d < 0:
                    d = -d
                if d == 0:
                    continue
                if best < 0:
                    best = d
                elif use_max:
                    if d > best:
                        best = d
                elif d < best:
                    best = d
        return best

    @njit(cache=True, nogil=True)
    def max_window_cosine_jit(vec_prefix, cnt_prefix, target, width):
        n = cnt_prefix.shape[0] - 1
        if n == 0 or width <= 0:
            return 0.0
        dim = target.shape[0]
        target_norm = 0.0
        for d in range(dim):
            target_norm += target[d] * target[d]
        target_norm = np.sqrt(target_norm)
        if target_norm == 0.0:
            return 0.0
        w = width if width < n else n
        n_windows = n - w + 1
        best = -2.0
        for j in range(n_windows):
            cnt = cnt_prefix[j + w] - cnt_prefix[j]
            score = 0.0
            if cnt > 0:
                dot = 0.0
                norm = 0.0
                for d in range(dim):
                    m = (vec_prefix[j + w, d] - vec_prefix[j, d]) / cnt
                    dot += m * target[d]
                    norm += m * m
                norm = np.sqrt(norm)
                if norm > 0.0:
                    score = dot / (norm * target_norm)
            if score > best:
                best = score
        return best

else:  # pragma: no cover
    max_window_sum_jit = None
    extreme_pair_distance_jit = None
    max_window_cosine_jit = None


def _pick_backend() -> str:
    choice = os.environ.get("LEXMRC_BACKEND", "auto").strip().lower()
    if choice in ("", "auto"):
        return "numba" if HAS_NUMBA else "numpy"
    if choice == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("LEXMRC_BACKEND=numba but numba is not importable")
        return "numba"
    if choice == "numpy":
        return "numpy"
    raise RuntimeError(f"unknown LEXMRC_BACKEND value: {choice!r}")


BACKEND = _pick_backend()

if BACKEND == "numba":
    max_window_sum = max_window_sum_jit
    extreme_pair_distance = extreme_pair_distance_jit
    max_window_cosine = max_window_cosine_jit
else:
    max_window_sum = max_window_sum_numpy
    extreme_pair_distance = extreme_pair_distance_numpy
    max_window_cosine = max_window_cosine_numpy


def warmup() -> None:
    """Trigger JIT compilation outside of any timed region."""
    w = np.ones(4)
    pos = np.arange(3, dtype=np.int64)
    prefix = np.zeros((5, 2))
    cnts = np.zeros(5, dtype=np.int64)
    target = np.ones(2)
    max_window_sum(w, 2)
    extreme_pair_distance(pos, pos, True)
    max_window_cosine(prefix, cnts, target, 2)
