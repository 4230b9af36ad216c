"""Nearest-neighbour ratio-test matching of descriptor sets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .dsift import DescriptorSet

DEFAULT_THRESHOLD = 1.5
# Candidates kept from the fast distance pass before exact re-ranking.
_CANDIDATES = 4


@dataclass(frozen=True)
class MatchSet:
    pairs: list = field(default_factory=list)  # (index_a, index_b, distance)
    threshold: float = DEFAULT_THRESHOLD
    empty_input: bool = False

    def __len__(self) -> int:
        return len(self.pairs)


@numba.njit(cache=True, nogil=True)
def _nearest_k(dots, sq_b, k):
    """Per row, indices of the ``k`` smallest ``sq_b - 2 * dots``, unordered."""
    n, m = dots.shape
    out = np.empty((n, k), dtype=np.int64)
    best = np.empty(k, dtype=dots.dtype)
    for i in range(n):
        for j in range(k):
            best[j] = sq_b[j] - 2.0 * dots[i, j]
            out[i, j] = j
        # Track the slot holding the current worst of the k kept values.
        worst = 0
        for j in range(1, k):
            if best[j] > best[worst]:
                worst = j
        for j in range(k, m):
            v = sq_b[j] - 2.0 * dots[i, j]
            if v < best[worst]:
                best[worst] = v
                out[i, worst] = j
                worst = 0
                for t in range(1, k):
                    if best[t] > best[worst]:
                        worst = t
    return out


def _as_array(d) -> np.ndarray:
    if isinstance(d, DescriptorSet):
        d = d.descriptors
    return np.asarray(d, dtype=np.float64)


def match_descriptors(a, b, threshold: float = DEFAULT_THRESHOLD, chunk: int = 2048) -> MatchSet:
    """Match every non-zero descriptor of ``a`` against ``b``.

    A query is accepted when ``d1 * threshold < d2``, with ``d1``/``d2`` the
    Euclidean distances to its nearest and second-nearest neighbours in
    ``b`` (``d2`` is infinite if ``b`` has a single descriptor).  Candidates
    are shortlisted with a blocked Gram-matrix pass and the shortlisted
    distances recomputed directly, so decisions do not depend on the
    expansion's rounding.
    """
    da, db = _as_array(a), _as_array(b)
    if len(da) == 0 or len(db) == 0:
        return MatchSet([], threshold, empty_input=True)

    queries = np.flatnonzero(np.any(da != 0, axis=1))
    k = min(_CANDIDATES, len(db))
    db32 = db.astype(np.float32)
    sq_b = np.einsum("ij,ij->i", db32, db32)
    pairs = []
    for start in range(0, len(queries), chunk):
        idx = queries[start : start + chunk]
        qa = da[idx]
        cand = _nearest_k(qa.astype(np.float32) @ db32.T, sq_b, k)
        diff = qa[:, None, :] - db[cand]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        # Break distance ties by the lower index in b.
        order = np.lexsort((cand, dist), axis=1)
        dist = np.take_along_axis(dist, order, axis=1)
        cand = np.take_along_axis(cand, order, axis=1)
        d1 = dist[:, 0]
        d2 = dist[:, 1] if k > 1 else np.full(len(idx), np.inf)
        ok = d1 * threshold < d2
        pairs.extend(
            zip(idx[ok].tolist(), cand[ok, 0].tolist(), d1[ok].tolist())
        )
    return MatchSet(pairs, threshold)

