"""Seeded, splittable random streams for reproducible simulation runs.

A single run draws from ``SeedSequence(seed)``. Run ``k`` of a replication draws
from ``SeedSequence(seed, spawn_key=(k,))``, which is the ``k``-th child of
``SeedSequence(seed).spawn(n)``. Both feed a PCG64 bit generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RNG_NAME = "numpy.PCG64"


@dataclass(frozen=True, slots=True)
class StreamId:
    seed: int
    run: int | None = None

    @property
    def spawn_key(self) -> tuple[int, ...]:
        return () if self.run is None else (self.run,)

    def describe(self) -> str:
        suffix = "" if self.run is None else f"/run{self.run}"
        return f"{RNG_NAME}:{self.seed}{suffix}"


def seed_sequence(stream: StreamId) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=stream.seed, spawn_key=stream.spawn_key)


def make_generator(stream: StreamId) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence(stream)))


def replication_streams(seed: int, n_runs: int) -> list[StreamId]:
    return [StreamId(seed=seed, run=k) for k in range(n_runs)]
