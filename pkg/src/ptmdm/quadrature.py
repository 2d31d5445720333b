"""Composite Gauss-Legendre quadrature on the half line [0, x_max].

Every potential term handled here has definite parity, so full-line matrix
elements reduce to half-line integrals with the |x| kink sitting on the
panel boundary at 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

MAX_ORDER = 512
MAX_DOUBLINGS = 8


class QuadratureError(RuntimeError):
    """Successive refinements never agreed to the requested tolerance."""

    def __init__(self, value, achieved, tol, context=""):
        self.value = value
        self.achieved = achieved
        self.tol = tol
        self.context = context
        msg = f"tolerance {tol:g} not reached (best difference {achieved:.3g})"
        if context:
            msg = f"{context}: {msg}"
        super().__init__(msg)


@dataclass(frozen=True)
class QuadratureSpec:
    """``panel_count`` equal panels on [0, x_max], ``nodes_per_panel`` nodes each."""

    panel_count: int
    nodes_per_panel: int
    x_max: float

    def __post_init__(self):
        if self.nodes_per_panel < 8:
            raise ValueError("nodes_per_panel must be >= 8")
        if self.nodes_per_panel > MAX_ORDER:
            raise ValueError(f"nodes_per_panel must be <= {MAX_ORDER}")
        if self.panel_count < 4:
            raise ValueError("panel_count must be >= 4")
        if not self.x_max > 0:
            raise ValueError("x_max must be positive")

    def doubled(self) -> "QuadratureSpec":
        return replace(self, panel_count=2 * self.panel_count)

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(0.0, self.x_max, self.panel_count + 1)


def default_spec(x_max: float, size_n: int = 1, wavenumber: float = 0.0,
                 nodes_per_panel: int = 32) -> QuadratureSpec:
    """Panels fine enough for products of ``size_n`` basis functions.

    ``wavenumber`` is the largest local oscillation rate of the potential
    factor on [0, x_max] (e.g. ``4 x_max`` for ``exp(2i x^2)``).  Each panel
    is kept to ``k h / 2 <= nodes_per_panel / 2`` for the combined rate ``k``.
    """
    k = 2.0 * math.sqrt(2 * size_n + 1) + wavenumber
    panels = max(8, math.ceil(2 * x_max), math.ceil(x_max * k / nodes_per_panel))
    return QuadratureSpec(panels, nodes_per_panel, float(x_max))


def _legendre(order, x):
    p0 = np.ones_like(x)
    p1 = x.copy()
    if order == 0:
        return p0, np.zeros_like(x)
    for k in range(2, order + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = order * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@lru_cache(maxsize=64)
def _rule(order):
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in [1, {MAX_ORDER}], got {order}")
    half = (order + 1) // 2
    i = np.arange(half)
    x = np.cos(math.pi * (4 * i + 3) / (4 * order + 2))
    for _ in range(100):
        p, dp = _legendre(order, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= 1e-15:
            p, dp = _legendre(order, x)
            x = x - p / dp
            break
    else:
        raise RuntimeError(f"Legendre root iteration did not converge for order {order}")
    _, dp = _legendre(order, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    if order % 2:
        x[-1] = 0.0
        nodes = np.concatenate([-x, x[-2::-1]])
        weights = np.concatenate([w, w[-2::-1]])
    else:
        nodes = np.concatenate([-x, x[::-1]])
        weights = np.concatenate([w, w[::-1]])
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def legendre_rule(order: int):
    """Gauss-Legendre nodes and weights on (-1, 1), nodes ascending."""
    return _rule(int(order))


@lru_cache(maxsize=32)
def nodes_weights(spec: QuadratureSpec):
    """Flattened composite nodes and weights for ``spec``."""
    t, w = legendre_rule(spec.nodes_per_panel)
    e = spec.edges
    a, b = e[:-1, None], e[1:, None]
    x = ((b - a) / 2 * t + (a + b) / 2).ravel()
    ww = ((b - a) / 2 * w).ravel()
    x.flags.writeable = False
    ww.flags.writeable = False
    return x, ww


def integrate_half(f, spec: QuadratureSpec) -> complex:
    """Composite rule for the integral of ``f`` over [0, x_max].

    ``f`` is called once with the full node array.
    """
    x, w = nodes_weights(spec)
    return complex(np.sum(w * f(x)))


def integrate_full(f, spec: QuadratureSpec) -> complex:
    """Integral over [-x_max, x_max] with panels mirrored about 0."""
    x, w = nodes_weights(spec)
    return complex(np.sum(w * f(-x)) + np.sum(w * f(x)))


def refine_until(f, spec: QuadratureSpec, tol: float):
    """Double ``panel_count`` until successive values differ by less than ``tol``.

    Returns ``(value, achieved)``; raises :class:`QuadratureError` after
    ``MAX_DOUBLINGS`` doublings.
    """
    if tol < 1e-14:
        raise ValueError("tol must be >= 1e-14")
    value = integrate_half(f, spec)
    diff = math.inf
    for _ in range(MAX_DOUBLINGS):
        spec = spec.doubled()
        new = integrate_half(f, spec)
        diff = abs(new - value)
        value = new
        if diff < tol:
            return value, diff
    raise QuadratureError(value, diff, tol)
