"""Deterministic random streams derived from a master seed."""

from __future__ import annotations

from typing import Sequence

from numpy.random import PCG64, Generator, SeedSequence


def derive_rng(seed: int, *path: int) -> Generator:
    """Generator for the stream at `path` (e.g. suite index, case index, trial index).

    Equal (seed, path) pairs always give identical streams; distinct paths give
    independent ones.
    """
    return Generator(PCG64(SeedSequence(int(seed), spawn_key=tuple(int(x) for x in path))))


def stream_label(seed: int, path: Sequence[int]) -> str:
    return f"{seed}:" + "/".join(str(x) for x in path)
