"""Independent reference implementations used as test oracles.

Everything here is a literal transcription of a definition, kept free of
package code paths on purpose: package routines are judged against these.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def brute_h_index(values) -> int:
    """Literal definition: max h such that at least h entries are >= h,
    checked for every candidate h by a fresh count."""
    arr = np.asarray(values, dtype=np.int64)
    n = arr.size
    candidates = np.arange(n + 1, dtype=np.int64)
    counts = (arr[None, :] >= candidates[:, None]).sum(axis=1)
    qualifying = candidates[counts >= candidates]
    return int(qualifying.max())


def brute_h_index_rows(rows: np.ndarray) -> np.ndarray:
    """brute_h_index for every row of a 2-D array (same literal definition)."""
    n = rows.shape[1]
    candidates = np.arange(n + 1, dtype=np.int64)
    counts = (rows[:, None, :] >= candidates[None, :, None]).sum(axis=2)
    ok = counts >= candidates[None, :]
    return (ok * candidates[None, :]).max(axis=1)


def brute_scaled_h(B, alpha: Fraction, n_cap: int) -> int:
    """Largest integer q in [0, n_cap] with #{b >= q} >= q*alpha, by scanning
    every q from the top."""
    arr = np.asarray(B, dtype=np.int64)
    for q in range(n_cap, -1, -1):
        if int((arr >= q).sum()) * alpha.denominator >= q * alpha.numerator:
            return q
    raise AssertionError("q=0 always qualifies")


def brute_discounted(values, d: int, alpha: Fraction):
    """Largest element p with #{c >= p} >= alpha*p - d; None if no element
    qualifies (promise violated)."""
    arr = np.asarray(values, dtype=np.int64)
    best = None
    for p in arr.tolist():
        count = int((arr >= p).sum())
        if (count + d) * alpha.denominator >= alpha.numerator * p:
            best = p if best is None else max(best, p)
    return best


def count_triangles_by_enumeration(adj: np.ndarray) -> int:
    """Triple loop over vertex indices; independent of any matrix algebra."""
    nv = adj.shape[0]
    total = 0
    for a in range(nv):
        for b in range(a + 1, nv):
            if not adj[a, b]:
                continue
            for c in range(b + 1, nv):
                if adj[a, c] and adj[b, c]:
                    total += 1
    return total
