"""From raw spectra to converged real levels, g-scans and merge brackets."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .assembly import assemble
from .basis import BasisSpec
from .eigen import ConvergenceError, decompose, eigenvalues
from .potentials import AhmedCubicPT, PotentialSpec, from_name
from .quadrature import QuadratureError


NUMERICAL_ERRORS = (ConvergenceError, QuadratureError)


class SpectrumError(RuntimeError):
    """A numerical failure inside the pipeline, tagged with potential and size."""


@dataclass(frozen=True)
class Tolerances:
    """Reality filter ``|Im E| <= filter_abs + filter_rel |Re E|`` and cross-size delta."""

    filter_abs: float = 1e-6
    filter_rel: float = 1e-8
    delta: float = 5e-3
    max_energy: float | None = None

    def __post_init__(self):
        if self.filter_abs < 0 or self.filter_rel < 0:
            raise ValueError("filter tolerances must be non-negative")
        if not self.delta > 0:
            raise ValueError("delta must be positive")


TABLE_TOLERANCES = Tolerances()
ANALYTIC_TOLERANCES = Tolerances(delta=1e-6)


@dataclass
class Level:
    quantum_number: int
    energy: float
    cross_size_delta: float
    parity_weight: float | None = None

    @property
    def parity(self) -> str | None:
        if self.parity_weight is None:
            return None
        return "even" if self.parity_weight > 0.5 else "odd"

    @property
    def classification(self) -> str:
        return "real" if self.parity is None else f"real/{self.parity}"


@dataclass
class SpectrumReport:
    potential: PotentialSpec
    sizes: tuple[int, int]
    real_levels: list[Level]
    complex_levels: list[complex]
    filter_tol: float
    filter_rel: float
    delta: float
    converged_cutoff: float
    closure_error: float = 0.0

    def energies(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.real_levels])

    def even_levels(self) -> list[Level]:
        return [lv for lv in self.real_levels if lv.parity == "even"]

    def odd_levels(self) -> list[Level]:
        """Odd-dominant levels; a listing of even states skips these."""
        return [lv for lv in self.real_levels if lv.parity == "odd"]

    def to_dict(self) -> dict:
        return {
            "potential": {"name": self.potential.name, **self.potential.params()},
            "sizes": list(self.sizes),
            "real_levels": [asdict(lv) for lv in self.real_levels],
            "complex_levels": [[z.real, z.imag] for z in self.complex_levels],
            "filter_tol": self.filter_tol,
            "filter_rel": self.filter_rel,
            "delta": self.delta,
            "converged_cutoff": self.converged_cutoff,
            "closure_error": self.closure_error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumReport":
        pot = dict(d["potential"])
        return cls(
            potential=from_name(pot.pop("name"), **pot),
            sizes=tuple(d["sizes"]),
            real_levels=[Level(**lv) for lv in d["real_levels"]],
            complex_levels=[complex(re, im) for re, im in d["complex_levels"]],
            filter_tol=d["filter_tol"],
            filter_rel=d["filter_rel"],
            delta=d["delta"],
            converged_cutoff=d["converged_cutoff"],
            closure_error=d.get("closure_error", 0.0),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for lv in self.real_levels:
            w.writerow([
                lv.quantum_number, repr(lv.energy), repr(lv.cross_size_delta),
                lv.classification,
                "" if lv.parity_weight is None else repr(lv.parity_weight),
                repr(self.filter_tol), repr(self.filter_rel), repr(self.delta),
            ])
        return buf.getvalue()


CSV_COLUMNS = [
    "quantum_number", "energy", "cross_size_delta", "classification",
    "parity_weight", "filter_abs", "filter_rel", "delta",
]


@dataclass
class GScanResult:
    g_values: list[float]
    real_counts: list[int | None]
    merge_brackets: list[tuple[float, float]]
    failures: dict[float, str] = field(default_factory=dict)


def filter_real(eigs, tol_abs: float, tol_rel: float):
    """Split into ascending real parts and one ``Im > 0`` member per complex pair."""
    if tol_abs < 0 or tol_rel < 0:
        raise ValueError("tolerances must be non-negative")
    eigs = np.asarray(eigs, dtype=complex)
    is_real = np.abs(eigs.imag) <= tol_abs + tol_rel * np.abs(eigs.real)
    real = np.sort(eigs[is_real].real)
    cplx = eigs[~is_real]
    cplx = cplx[cplx.imag > 0]
    cplx = cplx[np.lexsort((cplx.imag, cplx.real))]
    return real, cplx


def conjugate_closure(eigs) -> float:
    """Largest distance from an eigenvalue's conjugate to the nearest eigenvalue."""
    eigs = np.asarray(eigs, dtype=complex)
    worst = 0.0
    for start in range(0, eigs.size, 512):
        z = np.conj(eigs[start:start + 512])
        worst = max(worst, float(np.abs(z[:, None] - eigs[None, :]).min(axis=1).max()))
    return worst


def match_across_sizes(levels_n1, levels_n2, delta: float):
    """Greedy nearest-neighbour matching, in order of ``levels_n1``.

    Returns ``[(energy_n2, |energy_n2 - energy_n1|), ...]`` for matches within
    ``delta``; unmatched levels are dropped.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    b = np.asarray(levels_n2, dtype=float)
    used = np.zeros(b.size, dtype=bool)
    out = []
    for e in levels_n1:
        if used.all():
            break
        d = np.where(used, np.inf, np.abs(b - e))
        j = int(np.argmin(d))
        if d[j] <= delta:
            used[j] = True
            out.append((float(b[j]), float(d[j])))
    out.sort()
    return out


def _parity_weight(v) -> float:
    p = np.abs(v) ** 2
    return float(p[0::2].sum() / p.sum())


def spectrum_report(potential: PotentialSpec, n1: int, n2: int,
                    tol: Tolerances = TABLE_TOLERANCES, *, parity: bool = False,
                    seed: int = 0) -> SpectrumReport:
    """Converged real levels of ``potential`` from basis sizes ``n1 < n2``.

    With ``parity`` the eigenvectors of the converged levels are computed at
    ``n2`` and each level carries its even-index weight.
    """
    if not n1 < n2:
        raise ValueError(f"need n1 < n2, got {n1}, {n2}")
    try:
        w1 = eigenvalues(assemble(potential, BasisSpec(n1)))
    except NUMERICAL_ERRORS as exc:
        raise SpectrumError(f"{potential.label()} at N={n1}: {exc}") from exc
    real1, _ = filter_real(w1, tol.filter_abs, tol.filter_rel)
    if tol.max_energy is not None:
        real1 = real1[real1 <= tol.max_energy + tol.delta]

    def near_n1(vals):
        ok = np.abs(vals.imag) <= tol.filter_abs + tol.filter_rel * np.abs(vals.real)
        if real1.size == 0:
            return np.zeros(vals.size, dtype=bool)
        idx = np.clip(np.searchsorted(real1, vals.real), 1, real1.size) - 1
        d = np.minimum(np.abs(vals.real - real1[idx]),
                       np.abs(vals.real - real1[np.minimum(idx + 1, real1.size - 1)]))
        return ok & (d <= tol.delta)

    try:
        m2 = assemble(potential, BasisSpec(n2))
        if parity:
            w2, pairs = decompose(m2, near_n1, seed=seed)
        else:
            w2, pairs = eigenvalues(m2), []
    except NUMERICAL_ERRORS as exc:
        raise SpectrumError(f"{potential.label()} at N={n2}: {exc}") from exc
    real2, cplx2 = filter_real(w2, tol.filter_abs, tol.filter_rel)

    matched = match_across_sizes(real1, real2, tol.delta)
    if tol.max_energy is not None:
        matched = [(e, d) for e, d in matched if e <= tol.max_energy]
    weights = {}
    for p in pairs:
        if p.vector is not None:
            weights[p.value.real] = _parity_weight(p.vector)
    levels = []
    for k, (e, d) in enumerate(matched):
        wgt = None
        if parity:
            key = min(weights, key=lambda r: abs(r - e)) if weights else None
            wgt = weights[key] if key is not None and abs(key - e) <= 1e-9 * max(1, abs(e)) else None
        levels.append(Level(k, e, d, wgt))
    if len(levels) >= 2:
        cutoff = levels[-1].energy + (levels[-1].energy - levels[-2].energy)
    elif levels:
        cutoff = levels[-1].energy
    else:
        cutoff = -math.inf
    return SpectrumReport(
        potential=potential,
        sizes=(n1, n2),
        real_levels=levels,
        complex_levels=[complex(z) for z in cplx2 if z.real <= cutoff],
        filter_tol=tol.filter_abs,
        filter_rel=tol.filter_rel,
        delta=tol.delta,
        converged_cutoff=cutoff,
        closure_error=conjugate_closure(w2),
    )


def real_count(g: float, n1: int, n2: int, tol: Tolerances = TABLE_TOLERANCES) -> int:
    """Number of converged real levels of ``x^2/4 + i g x|x|``."""
    return len(spectrum_report(AhmedCubicPT(g), n1, n2, tol).real_levels)


def scan_g(g_grid, n1: int, n2: int, tol: Tolerances = TABLE_TOLERANCES) -> GScanResult:
    """Converged real counts over ``g_grid``; brackets where the count drops by 2."""
    g_grid = [float(g) for g in g_grid]
    if any(b <= a for a, b in zip(g_grid, g_grid[1:])):
        raise ValueError("g_grid must be strictly increasing")
    if any(g < 0 for g in g_grid):
        raise ValueError("g values must be non-negative")
    counts: list[int | None] = []
    failures = {}
    for g in g_grid:
        try:
            counts.append(real_count(g, n1, n2, tol))
        except SpectrumError as exc:
            counts.append(None)
            failures[g] = f"{type(exc).__name__}: {exc}"
    brackets = [
        (g_grid[i], g_grid[i + 1])
        for i in range(len(g_grid) - 1)
        if counts[i] is not None and counts[i + 1] is not None
        and counts[i] == counts[i + 1] + 2
    ]
    return GScanResult(g_grid, counts, brackets, failures)


class BracketError(ValueError):
    """Bisection met a count matching neither endpoint."""

    def __init__(self, g: float, count: int, expected: tuple[int, int]):
        self.g = g
        self.count = count
        super().__init__(
            f"real count {count} at g={g:.12g} matches neither endpoint count {expected}"
        )


def bracket_exceptional_point(g_low: float, g_high: float, sizes=(400, 500),
                              tol_g: float = 1e-3,
                              tol: Tolerances = TABLE_TOLERANCES):
    """Bisect on g until the interval with a real-count drop of 2 is <= ``tol_g``."""
    if not tol_g > 0:
        raise ValueError("tol_g must be positive")
    n1, n2 = sizes
    c_low = real_count(g_low, n1, n2, tol)
    c_high = real_count(g_high, n1, n2, tol)
    if c_low - c_high != 2:
        raise ValueError(
            f"endpoint counts ({c_low}, {c_high}) do not differ by 2"
        )
    while g_high - g_low > tol_g:
        mid = 0.5 * (g_low + g_high)
        c = real_count(mid, n1, n2, tol)
        if c == c_low:
            g_low = mid
        elif c == c_high:
            g_high = mid
        else:
            raise BracketError(mid, c, (c_low, c_high))
    return g_low, g_high
