"""Seeded, splittable random streams.

Every randomized routine in this package draws from an :class:`RngHandle`,
a (seed, stream_id) pair mapped onto numpy's counter-based Philox generator
through ``SeedSequence``. The contract:

* equal (seed, stream_id) -> identical sample sequences, on every platform;
* distinct stream_id under one seed -> statistically independent streams.

Stream derivation rule: ``child(i)`` of a handle with stream_id ``s`` is the
handle with stream_id ``s * 2**32 + i + 1``. The map is injective for
``0 <= i < 2**32 - 1`` at every nesting depth (Python integers do not
overflow), so any tree of consumers — trials, repetitions inside a trial,
per-invocation streams inside an estimator — gets collision-free ids.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameter

_MASK64 = 0xFFFFFFFFFFFFFFFF

#: Default seed for CLI runs; fixed (not time-based) so default runs reproduce.
DEFAULT_SEED = 20220607


class RngHandle:
    """A reproducible random stream identified by (seed, stream_id).

    The underlying generator is created lazily and is stateful: two *calls*
    on one handle continue one stream, while two *handles* built from the
    same (seed, stream_id) restart identical streams.
    """

    __slots__ = ("seed", "stream_id", "_generator")

    def __init__(self, seed: int, stream_id: int = 0):
        if stream_id < 0:
            raise InvalidParameter(f"stream_id must be non-negative, got {stream_id}")
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id)
        self._generator: np.random.Generator | None = None

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            ss = np.random.SeedSequence((self.seed, self.stream_id))
            self._generator = np.random.Generator(np.random.Philox(seed=ss))
        return self._generator

    def child(self, i: int) -> "RngHandle":
        """Derive the i-th sub-stream of this handle (see module docstring)."""
        if i < 0:
            raise InvalidParameter(f"child index must be non-negative, got {i}")
        return RngHandle(self.seed, self.stream_id * 2**32 + i + 1)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, RngHandle)
            and self.seed == other.seed
            and self.stream_id == other.stream_id
        )

    def __hash__(self) -> int:
        return hash((self.seed, self.stream_id))

    def __repr__(self) -> str:
        return f"RngHandle(seed={self.seed}, stream_id={self.stream_id})"
