"""Distribution-level simulation of the full estimator.

Running the per-read estimator at benchmark scale costs billions of array
reads per trial, which is the algorithm's price, not the experiment's: for
Monte Carlo purposes only the *distribution* of each decision statistic
matters, and those are known exactly.

* The weak test's counter X (samples valued >= T among k uniform draws) is
  Binomial(k, c_T/n) with c_T = #{i : A[i] >= T}.
* The strong estimator's sample histogram is Multinomial(k, hist(A)/n), and
  its output depends on the sample only through that histogram.

:func:`simulate_estimate_h_index` therefore draws X and the histogram
directly and feeds them through the *same* integer decision cores as
:mod:`subh.estimator` (sample sizes, Large/Small rule, majority rule,
scaled-threshold scan, lower median, fallback cutoff). Query counts are
accumulated with the estimator's own cost formulas, so simulated trials
report exactly what the per-read path would have charged for the same
trace. The only approximation is the float64 representation of the bin
probabilities (|error| < 1e-15 per bin).

tests/test_simulate.py cross-validates the two paths on stopping
thresholds, query counts, and the h-tilde distribution.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import InvalidParameter
from .estimator import (
    FALLBACK_CUTOFF,
    EstimatorParams,
    HEstimate,
    lower_median,
    majority_says_small,
    strong_sample_size,
    weak_sample_size,
)
from .exact import h_index_from_histogram
from .rng import RngHandle


class ArrayHistogram:
    """Value histogram of a concrete array, with O(log) suffix counts."""

    def __init__(self, values: np.ndarray, counts: np.ndarray, n: int):
        v = np.asarray(values, dtype=np.int64)
        c = np.asarray(counts, dtype=np.int64)
        if v.size == 0 or int(c.sum()) != n:
            raise InvalidParameter("histogram counts must sum to the array length")
        order = np.argsort(v)
        self.values = v[order]
        self.counts = c[order]
        self.n = n
        self._suffix = np.concatenate(
            [np.cumsum(self.counts[::-1])[::-1], np.zeros(1, dtype=np.int64)]
        )

    @classmethod
    def of_array(cls, array: np.ndarray) -> "ArrayHistogram":
        values, counts = np.unique(np.asarray(array, dtype=np.int64), return_counts=True)
        return cls(values, counts, int(np.asarray(array).size))

    def count_at_least(self, threshold: int) -> int:
        """#{i : A[i] >= threshold}."""
        pos = np.searchsorted(self.values, threshold, side="left")
        return int(self._suffix[pos])

    def exact_h(self) -> int:
        return h_index_from_histogram(self.values, self.counts, self.n)


def _simulate_strong_batch_full(
    hist: ArrayHistogram, k: int, r2: int, gen: np.random.Generator
) -> list[int]:
    """Reference batch: full multinomial per run, then the threshold scan.
    O(r2 * bins); kept as the slow oracle the fast batch is tested against."""
    n = hist.n
    pvals = hist.counts / n
    draws = gen.multinomial(k, pvals, size=r2)  # (r2, bins)
    suffix = np.cumsum(draws[:, ::-1], axis=1)[:, ::-1]
    alpha = Fraction(k, n)
    num, den = alpha.numerator, alpha.denominator
    if k * den > 2**62:
        raise InvalidParameter("sample size too large for int64 threshold arithmetic")
    v_capped = np.minimum(hist.values, n)
    cand = np.minimum(v_capped[None, :], (suffix * den) // num)
    return np.maximum(cand.max(axis=1), 0).astype(np.int64).tolist()


def _simulate_strong_batch(
    hist: ArrayHistogram, k: int, r2: int, gen: np.random.Generator
) -> list[int]:
    """r2 independent strong-estimator outputs at sample size k.

    Bin counts are drawn top value down through the exact conditional chain
    count_i ~ Binomial(k - drawn, c_i / prefix_i) (the standard sequential
    decomposition of a multinomial), updating per-run suffix counts and the
    best candidate min(v_i, floor(S_i/alpha)). A run stops as soon as the
    next bin's value cannot beat its best candidate — every skipped bin's
    candidate is bounded by that value — so the output distribution equals
    the full multinomial scan's while typically touching only a few bins.
    """
    n = hist.n
    alpha = Fraction(k, n)
    num, den = alpha.numerator, alpha.denominator
    if k * den > 2**62:
        raise InvalidParameter("sample size too large for int64 threshold arithmetic")
    values = np.minimum(hist.values, n)
    counts = hist.counts
    prefix = np.cumsum(counts)  # samples-per-draw mass of bins[0..i], integer
    best = np.zeros(r2, dtype=np.int64)
    drawn = np.zeros(r2, dtype=np.int64)
    active = np.arange(r2)
    for i in range(len(values) - 1, -1, -1):
        if active.size == 0:
            break
        p_ratio = min(float(counts[i]) / float(prefix[i]), 1.0)
        cnt = gen.binomial(k - drawn[active], p_ratio)
        suffix = drawn[active] + cnt
        best[active] = np.maximum(best[active], np.minimum(values[i], (suffix * den) // num))
        drawn[active] += cnt
        if i > 0:
            active = active[values[i - 1] > best[active]]
    return best.tolist()


def simulate_estimate_h_index(
    hist: ArrayHistogram, params: EstimatorParams, rng: RngHandle
) -> HEstimate:
    """Trace-faithful simulated run of estimator.estimate_h_index."""
    gen = rng.generator
    n = hist.n
    queries = 0
    T = n
    stopped = False
    while T >= FALLBACK_CUTOFF:
        k = weak_sample_size(n, T)
        p = hist.count_at_least(T) / n
        xs = gen.binomial(k, p, size=params.r1)
        smalls = int(np.count_nonzero(2 * n * xs < k * T))
        queries += params.r1 * k
        if majority_says_small(smalls, params.r1):
            T //= 4
        else:
            stopped = True
            break
    if not stopped:
        return HEstimate(hist.exact_h(), queries + n, True, T)
    T_strong = max(1, T // 16)
    k2 = strong_sample_size(n, params.eps, T_strong)
    estimates = _simulate_strong_batch(hist, k2, params.r2, gen)
    queries += params.r2 * k2
    return HEstimate(lower_median(estimates), queries, False, T)
