"""Seeded random streams for reproducible runs.

One run seed fans out into independent named streams, so ground-truth
motion never depends on how many draws a controller makes.
"""

import numpy as np

from utils.errors import ConfigurationError


class SeededStreams:
    STREAMS = {"truth": 0, "controller": 1, "sensing": 2}

    def __init__(self, seed: int):
        if int(seed) < 0:
            raise ConfigurationError(f"seed must be non-negative, got {seed}")
        self._seed = int(seed)

    @property
    def seed(self) -> int:
        return self._seed

    def generator(self, name: str) -> np.random.Generator:
        """Fresh generator for the named stream; same (seed, name) gives the same draws"""
        try:
            stream_id = self.STREAMS[name]
        except KeyError:
            raise ConfigurationError(f"unknown random stream {name!r}") from None
        return np.random.default_rng(np.random.SeedSequence([self._seed, stream_id]))


def parse_seed_list(text: str):
    """Parse '7', '1..20' or '1,4,9' into a sorted list of unique seeds"""
    seeds = set()
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = (int(x) for x in part.split("..", 1))
            else:
                lo = hi = int(part)
        except ValueError:
            raise ConfigurationError(f"invalid seed list entry {part!r}") from None
        if hi < lo:
            raise ConfigurationError(f"seed range {part!r} is empty")
        seeds.update(range(lo, hi + 1))
    if not seeds:
        raise ConfigurationError("seed list is empty")
    if min(seeds) < 0:
        raise ConfigurationError("seeds must be non-negative")
    return sorted(seeds)
