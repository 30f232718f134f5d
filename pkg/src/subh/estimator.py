"""Randomized h-index estimators with exact query accounting.

Three layers:

* :func:`weak_estimate` — a threshold test: sample k = ceil(64n/T) indices
  and report Large/Small depending on whether the fraction of samples valued
  >= T clears T/(2n). Asymmetric error: if h(A) >= T it says Small with
  probability <= 1/16; if h(A) < T/4 it says Large with probability at most
  h(A)/(4T). Cost is deterministic in (n, T).

* :func:`strong_estimate` — given a threshold T that lower-bounds h(A),
  sample k = ceil(6n/(eps^2 T)) values into B and return the largest integer
  q with at least q*k/n samples valued >= q. Within eps*h(A) of h(A) with
  probability >= 2/3; the cost bound holds even when T > h(A) (accuracy
  does not).

* :func:`estimate_h_index` — the combination: walk T down n, n/4, n/16, ...
  until a majority of r1 weak tests says Large, then run the strong
  estimator r2 times at threshold T/16 and return the lower median. r1 and
  r2 are ceil(7*ln(8/delta)) and ceil(108*ln(8/delta)), which drives the
  overall failure probability below delta while keeping the expected cost
  O(n*ln(1/delta)/(eps^2*h(A))).

All accept/continue comparisons are integer cross-multiplications; no
floating point near decision boundaries. Every weak/strong invocation draws
from a fresh child stream of the caller's handle, so no sample is reused
across invocations.

If the threshold walk falls below ``FALLBACK_CUTOFF`` (h(A) too small for
sampling to beat a linear scan — each weak round already costs Theta(n)
there), the estimator reads the whole array through the oracle (n counted
queries), computes the exact answer, and flags ``exact_fallback``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Literal, Sequence

import numpy as np

from .errors import InvalidParameter
from .exact import exact_h_index, scaled_h_from_counts
from .oracle import ArrayOracle, sample_indices
from .rng import RngHandle

LARGE: Literal["Large"] = "Large"
SMALL: Literal["Small"] = "Small"

#: Below this threshold the estimator switches to the exact linear scan.
FALLBACK_CUTOFF = 64


# ---------------------------------------------------------------------------
# decision cores, shared verbatim with the distribution-level simulator


def weak_sample_size(n: int, T: int) -> int:
    """k = ceil(64 n / T)."""
    return -((-64 * n) // T)


def strong_sample_size(n: int, eps: float, T: int) -> int:
    """k = ceil(6 n / (eps^2 T)), evaluated in exact rational arithmetic."""
    e = Fraction(eps)
    return int(math.ceil(Fraction(6 * n) / (e * e * T)))


def is_large(x_count: int, k: int, T: int, n: int) -> bool:
    """Weak verdict: Large iff X >= k*T/(2n), cross-multiplied."""
    return 2 * n * x_count >= k * T


def majority_says_small(smalls: int, r1: int) -> bool:
    """Strict majority of Small continues the walk; a tie exits (counts as
    Large) — exiting early only hands a smaller, still-valid threshold on."""
    return 2 * smalls > r1


def lower_median(values: Sequence[int]) -> int:
    """Median, taking the lower of the two middles when the count is even."""
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


# ---------------------------------------------------------------------------
# parameter and result records


@dataclass(frozen=True)
class EstimatorParams:
    """(eps, delta) plus the derived repetition counts r1, r2."""

    eps: float
    delta: float
    r1: int = field(init=False)
    r2: int = field(init=False)

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise InvalidParameter(f"eps must be in (0,1), got {self.eps}")
        if not 0 < self.delta < 1:
            raise InvalidParameter(f"delta must be in (0,1), got {self.delta}")
        log_term = math.log(8 / self.delta)
        object.__setattr__(self, "r1", max(1, math.ceil(7 * log_term)))
        object.__setattr__(self, "r2", max(1, math.ceil(108 * log_term)))


@dataclass(frozen=True)
class WeakVerdict:
    verdict: Literal["Large", "Small"]
    queries_used: int  # always exactly ceil(64 n / T)
    threshold: int


@dataclass(frozen=True)
class HEstimate:
    h_tilde: int
    queries_used: int
    exact_fallback: bool
    T_final: int


# ---------------------------------------------------------------------------
# estimators


def weak_estimate(oracle: ArrayOracle, T: int, rng: RngHandle) -> WeakVerdict:
    """Threshold test for "is h(A) plausibly >= T". Exactly ceil(64n/T) reads."""
    n = oracle.n
    if not 1 <= T <= n:
        raise InvalidParameter(f"T must be in [1, n], got T={T}, n={n}")
    k = weak_sample_size(n, T)
    values = oracle.read_many(sample_indices(rng, n, k))
    x = int(np.count_nonzero(values >= T))
    return WeakVerdict(LARGE if is_large(x, k, T, n) else SMALL, k, T)


def strong_estimate(oracle: ArrayOracle, T: int, eps: float, rng: RngHandle) -> HEstimate:
    """(1 +- eps) estimate, valid when T <= h(A). Exactly ceil(6n/(eps^2 T)) reads."""
    n = oracle.n
    if not 1 <= T <= n:
        raise InvalidParameter(f"T must be in [1, n], got T={T}, n={n}")
    if not 0 < eps < 1:
        raise InvalidParameter(f"eps must be in (0,1), got {eps}")
    k = strong_sample_size(n, eps, T)
    sample = oracle.read_many(sample_indices(rng, n, k))
    values, counts = np.unique(np.minimum(sample, n), return_counts=True)
    alpha = Fraction(k, n)
    h = scaled_h_from_counts(values, counts, alpha.numerator, alpha.denominator, n)
    return HEstimate(h, k, False, T)


def estimate_h_index(
    oracle: ArrayOracle, params: EstimatorParams, rng: RngHandle
) -> HEstimate:
    """Full estimator: |h_tilde - h(A)| <= eps*h(A) with probability >= 1-delta.

    Per-run query count, conditioned on the walk stopping at T:
    r1 * sum_{T_j >= T} ceil(64n/T_j) + r2 * ceil(6n/(eps^2 * max(1, T//16))),
    plus n instead of the strong term when the exact fallback fires.
    """
    n = oracle.n
    start = oracle.query_count
    stream = 0
    T = n
    stopped = False
    while T >= FALLBACK_CUTOFF:
        smalls = 0
        for _ in range(params.r1):
            verdict = weak_estimate(oracle, T, rng.child(stream))
            stream += 1
            smalls += verdict.verdict == SMALL
        if majority_says_small(smalls, params.r1):
            T //= 4
        else:
            stopped = True
            break
    if not stopped:
        # h(A) is too small for sampling to pay off; scan and answer exactly.
        values = oracle.read_many(np.arange(1, n + 1, dtype=np.int64))
        return HEstimate(exact_h_index(values), oracle.query_count - start, True, T)
    T_strong = max(1, T // 16)
    estimates = []
    for _ in range(params.r2):
        run = strong_estimate(oracle, T_strong, params.eps, rng.child(stream))
        stream += 1
        estimates.append(run.h_tilde)
    return HEstimate(lower_median(estimates), oracle.query_count - start, False, T)


#: Signature shared by anything the reductions can drive as an h-index solver.
HIndexAlgorithm = Callable[[ArrayOracle, EstimatorParams, RngHandle], HEstimate]
