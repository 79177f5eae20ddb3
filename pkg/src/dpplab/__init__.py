"""Determinantal point process toolkit.

Exact subset laws, admissibility and projection-frame checks, uniform
spanning tree statistics on complete graphs, eigenvalue ensembles, directed
last-passage times, and stochastic-dominance certificates, with a shared
deterministic seeding scheme.
"""

import os

import numpy as np

from ._kernels import BACKEND
from .errors import (
    ArgumentError,
    DegeneracyError,
    DependenceError,
    DimensionError,
    DomainError,
    DpplabError,
    PreconditionError,
    ResampleError,
    SizeError,
    SupportError,
    SymmetryError,
)

__version__ = "0.1.0"

DEFAULT_SEED = 0xD5EED
_SEED_ENV = "DPPLAB_SEED"


def resolve_seed(seed=None):
    """Explicit seed, else the DPPLAB_SEED environment variable, else default."""
    if seed is not None:
        return int(seed)
    env = os.environ.get(_SEED_ENV)
    if env is not None:
        return int(env, 0)
    return DEFAULT_SEED


def derive_substream(seed, index):
    """Independent generator number `index` of the stream family for `seed`.

    Streams are keyed by (seed, index) through the seed-sequence spawn
    mechanism, so replicas can be merged in any order without aliasing.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


from . import dominance, dpp, ensembles, lpp, numerics, stats, ust  # noqa: E402

__all__ = [
    "ArgumentError",
    "BACKEND",
    "DEFAULT_SEED",
    "DegeneracyError",
    "DependenceError",
    "DimensionError",
    "DomainError",
    "DpplabError",
    "PreconditionError",
    "ResampleError",
    "SizeError",
    "SupportError",
    "SymmetryError",
    "derive_substream",
    "dominance",
    "dpp",
    "ensembles",
    "lpp",
    "numerics",
    "resolve_seed",
    "stats",
    "ust",
]
