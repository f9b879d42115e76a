"""Reproducible random number generation.

All Monte Carlo code in the package draws from counter-based Philox
streams keyed by ``(seed, task_index)``.  A sweep that farms tasks out to
threads therefore produces bit-identical numbers regardless of scheduling
order, and a serial rerun with the same seed reproduces every stream.
"""

import numpy as np


def generator(seed: int, task_index: int = 0) -> np.random.Generator:
    """Return the Philox stream for one (seed, task) pair."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
                    np.uint64(task_index & 0xFFFFFFFFFFFFFFFF)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
