"""Deterministic, role-separated random streams.

Every run owns one stream per role so that, for instance, the reward noise
seen by two different learners on the same (seed, replication) is identical
no matter how many random draws the learners themselves consume.
"""
from __future__ import annotations

import zlib

import numpy as np

ROLES = ("env", "ctx", "adv", "alg")


def _role_key(role: str) -> int:
    return zlib.crc32(role.encode("utf-8"))


def rng_stream(master_seed: int, replication: int, role: str) -> np.random.Generator:
    """Return the generator for ``(master_seed, replication, role)``."""
    if master_seed < 0 or replication < 0:
        raise ValueError("seed and replication must be non-negative")
    seq = np.random.SeedSequence(entropy=int(master_seed),
                                 spawn_key=(int(replication), _role_key(role)))
    return np.random.Generator(np.random.PCG64(seq))


def run_streams(master_seed: int, replication: int) -> dict[str, np.random.Generator]:
    return {role: rng_stream(master_seed, replication, role) for role in ROLES}
