"""Backend selection for the hot sampling loops.

The compiled extension is used when it imported cleanly; otherwise the pure
reference code runs. Both produce bit-identical output for the same seed.
`force` lets tests and benchmarks pin a backend explicitly.
"""

import numpy as np

from . import _ref

try:
    from . import _fast
except ImportError:
    _fast = None

BACKEND = "compiled" if _fast is not None else "pure"


def _module(force):
    if force is None:
        return _fast if _fast is not None else _ref
    if force == "pure":
        return _ref
    if force == "compiled":
        if _fast is None:
            raise RuntimeError("compiled kernels are not available")
        return _fast
    raise ValueError(f"unknown backend {force!r}")


def wilson_parents(n, rng, force=None):
    return _module(force).wilson_parents(n, rng)


def project_sample(scaled, rng, force=None):
    scaled = np.asarray(scaled)
    if np.iscomplexobj(scaled):
        return _ref.project_sample_complex(scaled, rng)
    return _module(force).project_sample(scaled, rng)
