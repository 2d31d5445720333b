"""Finite-difference oracle: 3-point stencil on [-L, L] with Dirichlet walls.

Shares nothing with the basis/quadrature path except the eigensolver, so
agreement between the two checks assembly independently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import default_support
from .eigen import eigenvalues
from .potentials import PotentialSpec, evaluate


@dataclass(frozen=True)
class GridSpec:
    half_width: float = 12.0
    points: int = 3000

    def __post_init__(self):
        if self.points < 100:
            raise ValueError("points must be >= 100")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def spacing(self) -> float:
        return 2 * self.half_width / (self.points + 1)

    @property
    def x(self) -> np.ndarray:
        return -self.half_width + self.spacing * np.arange(1, self.points + 1)


@dataclass(frozen=True)
class OracleMatch:
    energy_mdm: float
    energy_fd: float
    gap: float
    flagged: bool = False


def fd_matrix(potential: PotentialSpec, grid: GridSpec) -> np.ndarray:
    """Dense ``-d^2/dx^2 + V`` on the interior grid points."""
    h = grid.spacing
    n = grid.points
    m = np.zeros((n, n), dtype=complex)
    i = np.arange(n)
    m[i, i] = 2.0 / h**2 + evaluate(potential, grid.x)
    m[i[:-1], i[1:]] = -1.0 / h**2
    m[i[1:], i[:-1]] = -1.0 / h**2
    return m


def fd_levels(potential: PotentialSpec, grid: GridSpec, tol_abs: float = 1e-6,
              tol_rel: float = 1e-8) -> np.ndarray:
    """Real FD eigenvalues, ascending."""
    from .analysis import filter_real

    real, _ = filter_real(eigenvalues(fd_matrix(potential, grid)), tol_abs, tol_rel)
    return real


def oracle_compare(potential: PotentialSpec, report, grid: GridSpec | None = None,
                   fd_real=None) -> list[OracleMatch]:
    """Pair each converged MDM real level with the nearest FD real level.

    Entries whose gap exceeds ten times the report's convergence delta are
    flagged; no other judgement is made.  ``fd_real`` skips the FD solve.
    """
    levels = report.real_levels
    if not levels:
        raise ValueError("report has no converged real levels")
    if fd_real is None:
        grid = grid or GridSpec()
        if grid.half_width < default_support(1):
            raise ValueError("grid half_width is narrower than the basis support")
        fd_real = fd_levels(potential, grid, report.filter_tol, report.filter_rel)
    fd_real = np.asarray(fd_real)
    limit = 10 * report.delta
    out = []
    for lv in levels:
        if fd_real.size == 0:
            out.append(OracleMatch(lv.energy, float("nan"), float("inf"), True))
            continue
        j = int(np.argmin(np.abs(fd_real - lv.energy)))
        gap = abs(float(fd_real[j]) - lv.energy)
        out.append(OracleMatch(lv.energy, float(fd_real[j]), gap, gap > limit))
    return out
