"""Normalized Hermite functions, the eigenbasis of p^2 + x^2.

``phi_m`` satisfies ``(p^2 + x^2) phi_m = (2m + 1) phi_m`` and has parity
``(-1)**m``.  Values come from the three-term recurrence on the normalized
functions themselves,

    sqrt((m+1)/2) phi_{m+1} = x phi_m - sqrt(m/2) phi_{m-1},

started from an unscaled seed with the Gaussian factor carried as a separate
logarithm, so neither overflow nor premature underflow occurs for m ~ 10^4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_INDEX = 10_000

_RESCALE = 1e100


@dataclass(frozen=True)
class BasisSpec:
    """Truncated oscillator basis ``phi_0 .. phi_{size_n - 1}``."""

    size_n: int
    x_support: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if int(self.size_n) != self.size_n or self.size_n < 1:
            raise ValueError(f"size_n must be a positive integer, got {self.size_n}")
        if self.x_support is None:
            object.__setattr__(self, "x_support", default_support(self.size_n))
        floor = turning_point(self.size_n) + 4.0
        if self.x_support < floor:
            raise ValueError(
                f"x_support={self.x_support} is inside the decay margin of the "
                f"highest basis function (needs >= {floor:.6g})"
            )


def turning_point(size_n: int) -> float:
    """Classical turning point of the highest retained state."""
    return math.sqrt(2 * size_n + 1)


def default_support(size_n: int) -> float:
    return turning_point(size_n) + 6.0


def phi_table(size_n: int, x) -> np.ndarray:
    """Array ``out[m, j] = phi_m(x[j])`` for ``m < size_n``."""
    x = np.asarray(x, dtype=np.float64)
    flat = x.ravel()
    out = np.empty((size_n, flat.size))
    cur = np.ones_like(flat)
    prev = np.zeros_like(flat)
    log_scale = -0.5 * flat**2 - 0.25 * math.log(math.pi)
    for m in range(size_n):
        out[m] = cur * np.exp(log_scale)
        nxt = (flat * cur - math.sqrt(m / 2) * prev) / math.sqrt((m + 1) / 2)
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if big.any():
            s = np.where(big, np.abs(cur), 1.0)
            cur = cur / s
            prev = prev / s
            log_scale = log_scale + np.log(s)
    return out.reshape((size_n,) + x.shape)


def eval_phi(m: int, x):
    """Value of the m-th normalized Hermite function at ``x`` (scalar or array)."""
    if m < 0 or m >= MAX_INDEX:
        raise ValueError(f"index m={m} outside [0, {MAX_INDEX})")
    value = phi_table(m + 1, x)[m]
    return float(value) if np.ndim(value) == 0 else value


def x_element(m: int, n: int) -> float:
    """<phi_m| x |phi_n>."""
    if abs(m - n) == 1:
        return math.sqrt(max(m, n) / 2)
    return 0.0


def x2_element(m: int, n: int) -> float:
    """<phi_m| x^2 |phi_n>."""
    if m == n:
        return m + 0.5
    if abs(m - n) == 2:
        k = min(m, n)
        return math.sqrt((k + 1) * (k + 2)) / 2
    return 0.0


def x_matrix(size_n: int) -> np.ndarray:
    """Dense matrix of :func:`x_element` over the truncated basis."""
    off = np.sqrt(np.arange(1, size_n) / 2)
    return np.diag(off, 1) + np.diag(off, -1)


def x2_matrix(size_n: int) -> np.ndarray:
    """Dense matrix of :func:`x2_element` over the truncated basis."""
    k = np.arange(size_n - 2)
    off = np.sqrt((k + 1) * (k + 2)) / 2
    return np.diag(np.arange(size_n) + 0.5) + np.diag(off, 2) + np.diag(off, -2)
