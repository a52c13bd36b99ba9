"""Named, independent random streams derived from one master seed.

Every consumer of randomness asks for a stream by name plus optional integer
keys (client index, round index, ...). Streams never share state, so turning a
feature on or off cannot shift the draws seen by any other feature.
"""

from __future__ import annotations

import zlib

import numpy as np

PARTITION = "partition"
PROFILES = "profiles"
SELECTION = "selection"
SHUFFLE = "shuffle"
INIT = "init"
DATA = "data"
SPLIT = "split"


def _tag(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def stream(seed: int, name: str, *keys: int) -> np.random.Generator:
    """Return a fresh generator for ``(seed, name, *keys)``."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, _tag(name), *(int(k) for k in keys)]
    return np.random.default_rng(np.random.SeedSequence(entropy))
