"""Seeded RNG substreams keyed by (seed, purpose, index)."""
from __future__ import annotations
from enum import IntEnum
import numpy as np


class Stream(IntEnum):
    """Top-level purposes; each gets an independent branch of the seed tree."""
    ORACLE = 1
    PARTICLE = 2
    SWARM = 3


def make_stream(seed: int, purpose: Stream, *index: int) -> np.random.Generator:
    """
    Deterministic generator for one substream.

    The tree is seed -> purpose -> index..., so blocks and particles get
    streams that do not depend on how work is scheduled.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, int(purpose), *index]))
