"""Popcount-threshold instances and the reduction onto h-index estimation.

A PTP instance is a bit string x of length m whose bits were drawn i.i.d.
Bernoulli with rate (1-2*gamma)*k/m (label 0, the "No" side) or
(1+2*gamma)*k/m (label 1, the "Yes" side); the task is to recover the
label. Popcounts concentrate: under label 0, |x| > (1-gamma)k with
probability <= delta, and under label 1, |x| < (1+gamma)k with probability
<= delta, so a popcount-threshold test at k separates the sides.

:func:`ptp_via_hindex` turns any h-index estimator into a PTP solver: serve
it the implicit array A[i] = floor((1+eps)*k) if x_i = 1 else 0 (eps =
gamma, confidence delta/2) under a hard query budget tau; exhausting the
budget is a defined outcome ("No"), otherwise answer Yes iff the estimate
reaches k - eps^2*k. The budget

    tau = ceil(m * ln(1/(4*delta)) / (24 * eps^2 * k))

is the query floor below which no algorithm can tell the two bit-string
distributions apart at confidence 1-delta, which is exactly why the
reduction may cut a solver off there: a solver cheap enough to matter would
have finished.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExhausted, InvalidParameter
from .estimator import EstimatorParams, HIndexAlgorithm
from .oracle import ArrayOracle
from .rng import RngHandle


@dataclass(frozen=True)
class PtpParams:
    """Instance parameters (m, k, gamma, delta).

    ``validate()`` enforces the regime the concentration bounds need:
    k >= 12*ln(1/delta)/gamma^2, k <= m/6, gamma in (0, 1/4), and both
    bit rates inside (0, 1/3). The underlying analysis is usually quoted
    for delta < 1/100; any delta in (0, 1) is accepted here since the
    desk-scale experiments run at delta = 0.05.
    """

    m: int
    k: int
    gamma: float
    delta: float

    @property
    def p0(self) -> float:
        return (1 - 2 * self.gamma) * self.k / self.m

    @property
    def p1(self) -> float:
        return (1 + 2 * self.gamma) * self.k / self.m

    def validate(self) -> None:
        if self.m < 1:
            raise InvalidParameter(f"m must be >= 1, got {self.m}")
        if not 0 < self.gamma < 0.25:
            raise InvalidParameter(f"gamma must be in (0, 1/4), got {self.gamma}")
        if not 0 < self.delta < 1:
            raise InvalidParameter(f"delta must be in (0, 1), got {self.delta}")
        k_floor = 12 * math.log(1 / self.delta) / self.gamma**2
        if self.k < k_floor:
            raise InvalidParameter(
                f"k={self.k} below the concentration floor {k_floor:.1f}"
            )
        if 6 * self.k > self.m:
            raise InvalidParameter(f"k={self.k} exceeds m/6={self.m / 6:.1f}")
        if not (0 < self.p0 < 1 / 3 and 0 < self.p1 < 1 / 3):
            raise InvalidParameter(
                f"bit rates p0={self.p0:.4f}, p1={self.p1:.4f} must lie in (0, 1/3)"
            )


@dataclass(frozen=True)
class PtpInstance:
    """A sampled bit string with its hidden label (harness-visible only)."""

    x: np.ndarray  # uint8, values in {0, 1}
    label: int  # 0 or 1

    def __post_init__(self):
        arr = np.asarray(self.x, dtype=np.uint8)
        if arr.ndim != 1 or arr.size < 1:
            raise InvalidParameter("x must be a one-dimensional bit array")
        if np.any(arr > 1):
            raise InvalidParameter("x must contain only 0/1")
        if self.label not in (0, 1):
            raise InvalidParameter(f"label must be 0 or 1, got {self.label}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "x", arr)

    @property
    def m(self) -> int:
        return int(self.x.size)


def popcount(x: np.ndarray) -> int:
    """Number of set bits."""
    return int(np.count_nonzero(np.asarray(x)))


def sample_ptp(
    params: PtpParams, theta: int | None = None, rng: RngHandle | None = None
) -> PtpInstance:
    """Draw an instance; label uniform unless ``theta`` pins it."""
    params.validate()
    if rng is None:
        raise InvalidParameter("sample_ptp requires an RngHandle")
    gen = rng.generator
    if theta is None:
        theta = int(gen.integers(0, 2))
    elif theta not in (0, 1):
        raise InvalidParameter(f"theta must be 0 or 1, got {theta}")
    p = params.p1 if theta == 1 else params.p0
    bits = (gen.random(params.m) < p).astype(np.uint8)
    return PtpInstance(bits, theta)


def save_instance(instance: PtpInstance, params: PtpParams, path: str | os.PathLike) -> None:
    """Write `m k gamma label` header + ASCII bit string."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{params.m} {params.k} {params.gamma!r} {instance.label}\n")
        fh.write("".join("1" if b else "0" for b in instance.x))
        fh.write("\n")


def load_instance(path: str | os.PathLike) -> tuple[PtpInstance, int, int, float]:
    """Read an instance file; returns (instance, m, k, gamma)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise InvalidParameter(f"{path}: header must be 'm k gamma label'")
        m, k, gamma, label = int(header[0]), int(header[1]), float(header[2]), int(header[3])
        bits_text = fh.readline().strip()
    if len(bits_text) != m or set(bits_text) - {"0", "1"}:
        raise InvalidParameter(f"{path}: bit string must be {m} ASCII 0/1 characters")
    bits = np.frombuffer(bits_text.encode("ascii"), dtype=np.uint8) - ord("0")
    return PtpInstance(bits, label), m, k, gamma


@dataclass(frozen=True)
class PtpOutcome:
    """Reduction verdict plus its accounting.

    ``answer`` is "Yes"/"No"; ``estimate`` is the wrapped algorithm's output
    when it finished (h-tilde or t-tilde), None when the budget cut it off.
    """

    answer: str
    estimate: int | float | None
    queries: int
    budget: int | None
    exhausted: bool


def hindex_budget(m: int, k: int, eps: float, delta: float) -> int:
    """tau = ceil(m * ln(1/(4*delta)) / (24 * eps^2 * k))."""
    if not 0 < delta < 0.25:
        raise InvalidParameter(f"need 0 < delta < 1/4 for a positive budget, got {delta}")
    return math.ceil(m * math.log(1 / (4 * delta)) / (24 * eps**2 * k))


def implicit_array_value(k: int, eps: float) -> int:
    """floor((1 + eps) * k), computed exactly."""
    e = Fraction(eps)
    return int(k + (e * k))  # int() floors a non-negative Fraction


def ptp_via_hindex(
    instance: PtpInstance,
    params: PtpParams,
    alg_h: HIndexAlgorithm,
    rng: RngHandle,
    *,
    enforce_budget: bool = True,
) -> PtpOutcome:
    """Solve a PTP instance with an h-index estimator (see module docstring).

    The estimator is run with n = m, eps = gamma, confidence delta/2 on the
    implicit two-valued array; its only access is the budgeted oracle.
    ``enforce_budget=False`` lifts tau (diagnostic runs only — the budget is
    part of the reduction's contract).
    """
    if instance.m != params.m:
        raise InvalidParameter(
            f"instance length {instance.m} does not match params.m={params.m}"
        )
    eps = params.gamma
    tau = hindex_budget(params.m, params.k, eps, params.delta)
    high = implicit_array_value(params.k, eps)
    values = instance.x.astype(np.int64) * high
    oracle = ArrayOracle(values, budget=tau if enforce_budget else None)
    est_params = EstimatorParams(eps=eps, delta=params.delta / 2)
    try:
        estimate = alg_h(oracle, est_params, rng)
    except BudgetExhausted:
        return PtpOutcome("No", None, oracle.query_count, tau, True)
    e = Fraction(eps)
    yes = estimate.h_tilde >= params.k - e * e * params.k
    return PtpOutcome(
        "Yes" if yes else "No", estimate.h_tilde, oracle.query_count, tau, False
    )
