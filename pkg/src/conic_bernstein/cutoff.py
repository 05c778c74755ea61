"""Smooth cutoff used by the localized kernels.

The cutoff is 1 on [0,1], 0 on [2, infinity), and glues the two plateaus with
the standard bump-quotient h(2-x) / (h(2-x) + h(x-1)), h(s) = exp(-1/s) for
s > 0 and 0 otherwise.  All derivatives vanish at the junctions, so truncated
kernel sums built from it inherit the usual localization behaviour.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _bump(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


@dataclass(frozen=True)
class CutoffFn:
    """Admissible cutoff with plateau edge 1 and support edge 2 (fixed shape)."""

    def __call__(self, x):
        return cutoff_eval(x)

    def support(self) -> tuple[float, float]:
        return (0.0, 2.0)


def cutoff_eval(x):
    """Evaluate the cutoff at scalar or array argument (values in [0, 1])."""
    x = np.asarray(x, dtype=float)
    scalar = x.shape == ()
    x = np.atleast_1d(x)
    up = _bump(2.0 - x)
    down = _bump(x - 1.0)
    out = np.ones_like(x)
    out[x >= 2.0] = 0.0
    mid = (x > 1.0) & (x < 2.0)
    out[mid] = up[mid] / (up[mid] + down[mid])
    if np.any(x < 0.0):
        raise ValueError("cutoff argument must be nonnegative")
    return float(out[0]) if scalar else out
