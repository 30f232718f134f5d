"""Linear-time exact baselines and selection routines.

Four operations live here:

* :func:`exact_h_index` — the O(n) baseline (cap values at n, counting sort,
  scan for the crossing point);
* :func:`select_kth` — worst-case linear k-th smallest via median-of-medians,
  on (value, origin_index) pairs so every comparison is strict;
* :func:`discounted_h_index` — largest element p of C with at least
  alpha*p - d elements of C valued >= p, by halving around the median;
* :func:`scaled_h_index` — largest *integer* q in [0, n_cap] with at least
  q*alpha elements of B valued >= q. This is the integer-threshold variant
  the strong estimator consumes; it can differ from discounted_h_index when
  the best integer threshold is not an element of B (e.g. B=[10], alpha=1/2
  has integer answer 2 but no qualifying element).

Threshold comparisons are exact: alpha is handled as a Fraction and all
predicates reduce to integer cross-multiplications.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidParameter, PromiseViolated


class TaggedValue(NamedTuple):
    """An array entry with its origin position; ordering is lexicographic on
    (value, origin_index), so distinct origins make all comparisons strict."""

    value: int
    origin_index: int


def tag_values(values: Iterable[int]) -> list[TaggedValue]:
    """Tag raw values with 1-based positions (the consistent tie-break)."""
    return [TaggedValue(int(v), i) for i, v in enumerate(values, 1)]


def exact_h_index(values: Sequence[int] | np.ndarray) -> int:
    """Exact h-index: the maximum h such that at least h entries are >= h.

    Runs in O(n): values are capped at n (the h-index never exceeds n, so
    min(v, n) preserves it), bucketed, and the crossing point of the
    non-increasing suffix-count curve against the identity is read off as
    max over v of min(v, #{i : A[i] >= v}).
    """
    arr = np.asarray(values, dtype=np.int64)
    if arr.ndim != 1 or arr.size < 1:
        raise InvalidParameter("need a one-dimensional array of length >= 1")
    if arr.min() < 0:
        raise InvalidParameter("array values must be non-negative")
    n = arr.size
    buckets = np.bincount(np.minimum(arr, n), minlength=n + 1)
    at_least = np.cumsum(buckets[::-1])[::-1]  # at_least[v] = #{i : capped A[i] >= v}
    v = np.arange(n + 1, dtype=np.int64)
    return int(np.minimum(v, at_least).max())


def h_index_from_histogram(values: np.ndarray, counts: np.ndarray, n: int) -> int:
    """exact_h_index evaluated on a (distinct value -> count) histogram."""
    v = np.minimum(np.asarray(values, dtype=np.int64), n)
    c = np.asarray(counts, dtype=np.int64)
    order = np.argsort(v)
    v, c = v[order], c[order]
    at_least = np.cumsum(c[::-1])[::-1]  # entries valued >= v[i]
    return int(max(np.minimum(v, at_least).max(initial=0), 0))


# ---------------------------------------------------------------------------
# selection


def _sort_group(items: list, lo: int, hi: int) -> int:
    """Insertion-sort items[lo:hi] (at most 5 elements); return median index."""
    for i in range(lo + 1, hi):
        t = items[i]
        j = i
        while j > lo and items[j - 1] > t:
            items[j] = items[j - 1]
            j -= 1
        items[j] = t
    return (lo + hi - 1) // 2


def _partition3(items: list, lo: int, hi: int, pivot_idx: int) -> tuple[int, int]:
    """Three-way partition of items[lo:hi] around items[pivot_idx].

    Returns (eq_lo, eq_hi): elements < pivot land in [lo, eq_lo), elements
    == pivot in [eq_lo, eq_hi), elements > pivot in [eq_hi, hi).
    """
    pivot = items[pivot_idx]
    lt, i, gt = lo, lo, hi
    while i < gt:
        if items[i] < pivot:
            items[lt], items[i] = items[i], items[lt]
            lt += 1
            i += 1
        elif items[i] > pivot:
            gt -= 1
            items[gt], items[i] = items[i], items[gt]
        else:
            i += 1
    return lt, gt


def _select_inplace(items: list, lo: int, hi: int, k0: int) -> int:
    """Place the k0-th smallest (0-based) of items[lo:hi] at its sorted
    position and return that index. Worst-case linear (median-of-medians)."""
    while True:
        if hi - lo <= 5:
            _sort_group(items, lo, hi)
            return lo + k0
        # Median of each group of 5 is swapped into a prefix block, then the
        # median of that block is selected recursively as the pivot.
        ngroups = 0
        for g_lo in range(lo, hi, 5):
            med = _sort_group(items, g_lo, min(g_lo + 5, hi))
            items[lo + ngroups], items[med] = items[med], items[lo + ngroups]
            ngroups += 1
        pivot_idx = _select_inplace(items, lo, lo + ngroups, (ngroups - 1) // 2)
        eq_lo, eq_hi = _partition3(items, lo, hi, pivot_idx)
        if k0 < eq_lo - lo:
            hi = eq_lo
        elif k0 < eq_hi - lo:
            return lo + k0
        else:
            k0 -= eq_hi - lo
            lo = eq_hi


def select_kth(items: list, k: int) -> TaggedValue:
    """Return the k-th smallest element (1-based) under the tie-broken order.

    Side effect: ``items`` ends up partitioned around the returned element.
    """
    if not 1 <= k <= len(items):
        raise InvalidParameter(f"rank {k} outside [1, {len(items)}]")
    return items[_select_inplace(items, 0, len(items), k - 1)]


# ---------------------------------------------------------------------------
# discounted h-index


def _as_fraction(alpha) -> Fraction:
    try:
        frac = Fraction(alpha)
    except (TypeError, ValueError) as exc:
        raise InvalidParameter(f"alpha must be rational-like, got {alpha!r}") from exc
    return frac


def discounted_h_index(C: Sequence, d: int, alpha) -> int:
    """Largest element p of C with at least alpha*p - d elements valued >= p.

    The caller promises such an element exists; if the halving bottoms out on
    an element that fails the predicate, the promise was broken and
    PromiseViolated is raised rather than guessing.

    Halving recursion, worst-case linear: select the element whose
    tie-broken suffix (elements >= it) has size g = t//2. If it satisfies
    the predicate the answer lives in that suffix and the discount is
    unchanged (nothing >= a suffix element was discarded); otherwise the
    answer lies strictly below, and the g discarded elements each support
    every lower candidate, so the discount grows by g.

    Accepts raw integers (tagged by position) or TaggedValue items.
    """
    if len(C) < 1:
        raise InvalidParameter("C must be non-empty")
    if d < 0:
        raise InvalidParameter(f"d must be non-negative, got {d}")
    frac = _as_fraction(alpha)
    if not 0 <= frac <= 1:
        raise InvalidParameter(f"alpha must lie in [0, 1], got {frac}")
    num, den = frac.numerator, frac.denominator
    items = [c if isinstance(c, TaggedValue) else TaggedValue(int(c), i)
             for i, c in enumerate(C, 1)]
    lo, hi = 0, len(items)
    disc = int(d)
    while hi - lo > 1:
        t = hi - lo
        g = t // 2  # size of the kept suffix {elements >= pivot}, pivot included
        pivot_idx = _select_inplace(items, lo, hi, t - g)
        if (g + disc) * den >= num * items[pivot_idx].value:
            lo = pivot_idx
        else:
            hi = pivot_idx
            disc += g
    base = items[lo]
    if (1 + disc) * den >= num * base.value:
        return base.value
    raise PromiseViolated(
        f"no element satisfies the predicate (base {base.value} needs "
        f"{frac} * {base.value} - {disc} <= 1)"
    )


# ---------------------------------------------------------------------------
# scaled (integer-threshold) h-index


def scaled_h_from_counts(
    values: np.ndarray, counts: np.ndarray, alpha_num: int, alpha_den: int, n_cap: int
) -> int:
    """Core of scaled_h_index on a histogram; exact integer arithmetic.

    For each distinct (capped) value v_i with suffix count S_i = #{b >= v_i},
    the largest feasible threshold inside the step ending at v_i is
    min(v_i, floor(S_i * den / num)); the answer is the max over steps
    (0 qualifies vacuously). Correct because #{b >= q} is non-increasing
    while q*alpha increases, so there is a single crossing.
    """
    if alpha_num <= 0 or alpha_den <= 0:
        raise InvalidParameter("alpha must be positive")
    v = np.minimum(np.asarray(values, dtype=np.int64), n_cap)
    c = np.asarray(counts, dtype=np.int64)
    order = np.argsort(v, kind="stable")
    v, c = v[order], c[order]
    suffix = np.cumsum(c[::-1])[::-1]
    if int(suffix[0]) * alpha_den > 2**62:  # keep the int64 fast path honest
        best = 0
        for vi, si in zip(v.tolist(), suffix.tolist()):
            best = max(best, min(vi, (si * alpha_den) // alpha_num))
        return best
    cand = np.minimum(v, (suffix * alpha_den) // alpha_num)
    return int(max(cand.max(initial=0), 0))


def scaled_h_index(B: Sequence[int] | np.ndarray, alpha, n_cap: int) -> int:
    """Largest integer q in [0, n_cap] with #{j : B[j] >= q} >= q * alpha.

    alpha is normally k/n set by the caller; values above 1 are legal (the
    strong estimator oversamples whenever its threshold is small). Returns 0
    when no positive q qualifies.
    """
    arr = np.asarray(B, dtype=np.int64)
    if arr.ndim != 1 or arr.size < 1:
        raise InvalidParameter("B must be a one-dimensional array of length >= 1")
    if arr.min() < 0:
        raise InvalidParameter("B values must be non-negative")
    if n_cap < 0:
        raise InvalidParameter(f"n_cap must be non-negative, got {n_cap}")
    frac = _as_fraction(alpha)
    if frac <= 0:
        raise InvalidParameter(f"alpha must be positive, got {frac}")
    values, counts = np.unique(np.minimum(arr, n_cap), return_counts=True)
    return scaled_h_from_counts(values, counts, frac.numerator, frac.denominator, n_cap)
