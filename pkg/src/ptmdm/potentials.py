"""PT-symmetric potentials V(x) with their parity decomposition.

Every variant satisfies ``V(x) = conj(V(-x))``, i.e.

    V(x) = re_even(|x|) + i * sign(x) * im_odd(|x|)

with ``sign(0) = 0``.  Assembly consumes the decomposition on x >= 0 and
treats the terms ``x2_coeff * x^2`` (even) and ``x_coeff * x`` (odd)
analytically; whatever remains goes to quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar

import numpy as np

RealFn = Callable[[np.ndarray], np.ndarray]

_PT_TOL = 1e-12


@dataclass(frozen=True)
class PotentialSpec:
    """Base class; subclasses set the analytic coefficients and residual parts."""

    name: ClassVar[str] = ""
    x2_coeff: ClassVar[float] = 0.0
    x_coeff: ClassVar[float] = 0.0

    def params(self) -> dict:
        return {}

    def even_rest(self) -> RealFn | None:
        """Even real part minus ``x2_coeff * x^2`` on x >= 0, or None if zero."""
        return None

    def odd_rest(self) -> RealFn | None:
        """Odd imaginary part minus ``x_coeff * x`` on x >= 0, or None if zero."""
        return None

    def wavenumber(self, x: float) -> float:
        """Local oscillation rate of the quadrature residual at ``x``."""
        return 0.0

    def label(self) -> str:
        args = ", ".join(f"{k}={v:g}" for k, v in self.params().items())
        return f"{self.name}({args})" if args else self.name


@dataclass(frozen=True)
class AhmedCubicPT(PotentialSpec):
    """V(x) = x^2/4 + i g x|x|."""

    g: float = 2.0
    name: ClassVar[str] = "ahmed_cubic"
    x2_coeff: ClassVar[float] = 0.25

    def params(self):
        return {"g": self.g}

    def odd_rest(self):
        if self.g == 0:
            return None
        g = self.g
        return lambda x: g * x * x


@dataclass(frozen=True)
class ExpPT(PotentialSpec):
    """V(x) = x^2/4 + exp(-2i x|x|)."""

    name: ClassVar[str] = "exp_pt"
    x2_coeff: ClassVar[float] = 0.25

    def even_rest(self):
        return lambda x: np.cos(2 * x * x)

    def odd_rest(self):
        return lambda x: -np.sin(2 * x * x)

    def wavenumber(self, x):
        return 4.0 * x


@dataclass(frozen=True)
class ShiftedHO(PotentialSpec):
    """V(x) = x^2 + i x; spectrum 2n + 1 + 1/4."""

    name: ClassVar[str] = "shifted_ho"
    x2_coeff: ClassVar[float] = 1.0
    x_coeff: ClassVar[float] = 1.0


@dataclass(frozen=True)
class Harmonic(PotentialSpec):
    """V(x) = k x^2 (real)."""

    k: float = 1.0
    name: ClassVar[str] = "harmonic"

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"harmonic k must be positive, got {self.k}")

    @property
    def x2_coeff(self):  # type: ignore[override]
        return self.k

    def params(self):
        return {"k": self.k}


@dataclass(frozen=True)
class CustomPT(PotentialSpec):
    """User potential ``V(x) = re_even(x) + i im_odd(x)``.

    ``re_even`` must be even and ``im_odd`` odd; both take arrays.  Assembly
    only samples them on x >= 0, so it refuses specs failing :func:`pt_check`.
    """

    re_even: RealFn = field(default=lambda x: np.zeros_like(x))
    im_odd: RealFn = field(default=lambda x: np.zeros_like(x))
    oscillation: float = 0.0
    name: ClassVar[str] = "custom_pt"

    def even_rest(self):
        return self.re_even

    def odd_rest(self):
        return self.im_odd

    def wavenumber(self, x):
        return self.oscillation * x


BUILTIN = {
    "ahmed_cubic": AhmedCubicPT,
    "exp_pt": ExpPT,
    "shifted_ho": ShiftedHO,
    "harmonic": Harmonic,
}


def from_name(name: str, **params) -> PotentialSpec:
    """Build a built-in potential from its config name."""
    try:
        cls = BUILTIN[name]
    except KeyError:
        raise ValueError(
            f"unknown potential {name!r}; choose from {sorted(BUILTIN)}"
        ) from None
    return cls(**params)


def parity_parts(spec: PotentialSpec):
    """``(re_even, im_odd)`` as functions on x >= 0."""
    a2, a1 = spec.x2_coeff, spec.x_coeff
    er, orr = spec.even_rest(), spec.odd_rest()

    def re_even(x):
        x = np.asarray(x, dtype=float)
        out = a2 * x * x
        return out + er(x) if er is not None else out

    def im_odd(x):
        x = np.asarray(x, dtype=float)
        out = a1 * x
        return out + orr(x) if orr is not None else out

    return re_even, im_odd


def evaluate(spec: PotentialSpec, x):
    """V(x), computed from each variant's closed form."""
    x = np.asarray(x, dtype=float)
    if isinstance(spec, AhmedCubicPT):
        v = x * x / 4 + 1j * spec.g * x * np.abs(x)
    elif isinstance(spec, ExpPT):
        v = x * x / 4 + np.exp(-2j * x * np.abs(x))
    elif isinstance(spec, ShiftedHO):
        v = x * x + 1j * x
    elif isinstance(spec, Harmonic):
        v = spec.k * x * x + 0j
    elif isinstance(spec, CustomPT):
        v = spec.re_even(x) + 1j * spec.im_odd(x)
    else:
        re_even, im_odd = parity_parts(spec)
        ax = np.abs(x)
        v = re_even(ax) + 1j * np.sign(x) * im_odd(ax)
    return complex(v) if v.ndim == 0 else v


def pt_check(spec: PotentialSpec, samples: int = 64, x_support: float = 10.0) -> bool:
    """True iff ``|V(x) - conj(V(-x))| <= 1e-12`` at quasi-random points."""
    if samples < 16:
        raise ValueError("samples must be >= 16")
    # additive recurrence with the golden ratio: low-discrepancy on [0, 1)
    u = np.mod(0.5 + np.arange(samples) * (math.sqrt(5) - 1) / 2, 1.0)
    x = (2 * u - 1) * x_support
    v = evaluate(spec, x)
    w = evaluate(spec, -x)
    return bool(np.all(np.abs(v - np.conj(w)) <= _PT_TOL))
