"""Vectorised helpers shared by the exact searches.

Masks up to 128 bits are split into two uint64 words so numpy can compute all
pairwise intersection sizes without touching Python-int arithmetic in the hot
loops.
"""

from __future__ import annotations

import numpy as np

from .setcore import Family

_LOW64 = (1 << 64) - 1

if hasattr(np, "bitwise_count"):

    def _popcount_u64(arr: np.ndarray) -> np.ndarray:
        return np.bitwise_count(arr)

else:  # pragma: no cover - numpy < 2.0 fallback
    _LUT16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)

    def _popcount_u64(arr: np.ndarray) -> np.ndarray:
        v = arr.view(np.uint16).reshape(arr.shape + (4,))
        return _LUT16[v].sum(axis=-1)


def mask_words(masks: list[int]) -> np.ndarray:
    """(m, 2) uint64 array of the low/high words of each mask."""
    return np.array([[m & _LOW64, m >> 64] for m in masks], dtype=np.uint64)


def weight_matrix(family: Family) -> np.ndarray:
    """int16 matrix W with W[i, j] = |F_i ∩ F_j|; diagonal is 0.

    Row blocks are processed in chunks to bound transient memory on
    thousand-member families.
    """
    words = mask_words(family.masks())
    m = len(words)
    W = np.zeros((m, m), dtype=np.int16)
    if m == 0:
        return W
    chunk = max(1, min(m, (1 << 24) // max(1, m)))
    for lo in range(0, m, chunk):
        hi = min(m, lo + chunk)
        inter = words[lo:hi, None, :] & words[None, :, :]
        W[lo:hi] = _popcount_u64(inter).sum(axis=-1, dtype=np.int16)
    np.fill_diagonal(W, 0)
    return W


def element_index_arrays(family: Family) -> list[np.ndarray]:
    """Per-member 0-based element indices, for multiplicity bookkeeping."""
    return [
        np.fromiter((e - 1 for e in ks.elements), dtype=np.int64, count=len(ks))
        for ks in family
    ]
