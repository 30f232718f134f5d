"""Query-counted array access and synthetic instance generation.

The :class:`ArrayOracle` is the only channel estimators may use to see the
input array A[1:n]. Every successful index read costs exactly one query;
nothing else moves the counter. An optional budget turns the oracle into a
hard query cap: a read that would push the counter past the budget is
refused (counter unchanged, value not revealed) by raising
:class:`~subh.errors.BudgetExhausted`.

Indices are 1-based at this interface, matching the A[1:n] convention used
throughout the package; storage is 0-based internally.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import BudgetExhausted, IndexOutOfRange, InvalidParameter
from .rng import RngHandle


class ArrayOracle:
    """Read access to an immutable non-negative integer array, with accounting.

    One trial owns one oracle; instances are not safe for concurrent use.
    """

    __slots__ = ("_values", "query_count", "budget")

    def __init__(self, values: Sequence[int] | np.ndarray, budget: int | None = None):
        arr = np.asarray(values, dtype=np.int64)
        if arr.ndim != 1 or arr.size < 1:
            raise InvalidParameter("oracle needs a one-dimensional array of length >= 1")
        if np.any(arr < 0):
            raise InvalidParameter("array values must be non-negative")
        if budget is not None and budget < 0:
            raise InvalidParameter("budget must be non-negative")
        arr = arr.copy()
        arr.setflags(write=False)
        self._values = arr
        self.query_count = 0
        self.budget = budget

    @property
    def n(self) -> int:
        return int(self._values.size)

    def read(self, i: int) -> int:
        """Return A[i] for 1 <= i <= n, charging one query."""
        if not 1 <= i <= self._values.size:
            raise IndexOutOfRange(f"index {i} outside [1, {self._values.size}]")
        if self.budget is not None and self.query_count + 1 > self.budget:
            raise BudgetExhausted(f"budget {self.budget} reached")
        self.query_count += 1
        return int(self._values[i - 1])

    def read_many(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized read; charges one query per index.

        If the batch would cross the budget, the affordable prefix is charged
        and BudgetExhausted is raised; the caller sees none of the values
        (partial answers are paid for but unusable, which keeps the counter
        equal to the number of answered reads).
        """
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size == 0:
            return np.empty(0, dtype=np.int64)
        if idx.min() < 1 or idx.max() > self._values.size:
            raise IndexOutOfRange(f"index outside [1, {self._values.size}]")
        if self.budget is not None and self.query_count + idx.size > self.budget:
            self.query_count = self.budget
            raise BudgetExhausted(f"budget {self.budget} reached mid-batch")
        self.query_count += int(idx.size)
        return self._values[idx - 1]

    def snapshot_values(self) -> np.ndarray:
        """Uncounted copy of the full array. Harness/ground-truth use only."""
        return self._values.copy()


def sample_indices(rng: RngHandle, n: int, k: int) -> np.ndarray:
    """k i.i.d. uniform draws from [1, n], with repetition.

    Deterministic given the handle: the output depends only on
    (seed, stream_id, n, k).
    """
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    if k < 1:
        raise InvalidParameter(f"k must be >= 1, got {k}")
    return rng.generator.integers(1, n + 1, size=k, dtype=np.int64)


@dataclass(frozen=True)
class GenSpec:
    """Recipe for a synthetic array with a known, exact h-index.

    ``h`` entries take ``high_value`` (>= h); the other n-h entries follow
    ``low_profile`` and stay strictly below h, so the h-index is exactly h:

    * ``"uniform"`` — i.i.d. uniform on [0, h-1] (all zeros when h <= 1);
      exercises entries just below the threshold;
    * ``"zeros"``  — all low entries are 0; gives a two-valued array whose
      histogram is as small as possible.
    """

    n: int
    h: int
    high_value: int | None = None
    low_profile: Literal["uniform", "zeros"] = "uniform"

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameter(f"n must be >= 1, got {self.n}")
        if not 0 <= self.h <= self.n:
            raise InvalidParameter(f"h must be in [0, n], got h={self.h}, n={self.n}")
        high = self.n if self.high_value is None else self.high_value
        if high < self.h:
            raise InvalidParameter(f"high_value must be >= h, got {high} < {self.h}")
        if self.low_profile not in ("uniform", "zeros"):
            raise InvalidParameter(f"unknown low_profile {self.low_profile!r}")
        object.__setattr__(self, "high_value", high)


def generate_array(spec: GenSpec, rng: RngHandle) -> np.ndarray:
    """Materialize a GenSpec: exactly h entries equal high_value, the rest
    below h, positions shuffled. The exact h-index of the result is spec.h."""
    gen = rng.generator
    out = np.empty(spec.n, dtype=np.int64)
    out[: spec.h] = spec.high_value
    n_low = spec.n - spec.h
    if n_low:
        if spec.low_profile == "uniform" and spec.h > 1:
            out[spec.h :] = gen.integers(0, spec.h, size=n_low, dtype=np.int64)
        else:
            out[spec.h :] = 0
    return gen.permutation(out)


def load_array(path: str | os.PathLike) -> np.ndarray:
    """Read an array file: UTF-8, one non-negative decimal integer per line."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            try:
                v = int(text)
            except ValueError as exc:
                raise InvalidParameter(f"{path}:{lineno}: not an integer: {text!r}") from exc
            if v < 0:
                raise InvalidParameter(f"{path}:{lineno}: negative value {v}")
            values.append(v)
    if not values:
        raise InvalidParameter(f"{path}: empty array file")
    return np.asarray(values, dtype=np.int64)


def save_array(values: Sequence[int] | np.ndarray, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in np.asarray(values, dtype=np.int64):
            fh.write(f"{int(v)}\n")
