"""Matrix of H = p^2 + V(x) in the oscillator basis.

Writing V = x^2 + (V - x^2) puts p^2 + x^2 on the diagonal as 2m + 1.  The
polynomial pieces of V - x^2 use the ladder identities; the rest is
integrated on the half line with parity factors:

    <phi_m| f_even |phi_n> = 2 int_0^X phi_m phi_n f_even   (m + n even)
    <phi_m| i sign(x) f_odd(|x|) |phi_n> = 2i int_0^X phi_m phi_n f_odd   (m + n odd)

and zero otherwise.  The result is complex symmetric, real where m + n is
even and purely imaginary where m + n is odd.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .basis import BasisSpec, phi_table, x2_matrix, x_matrix
from .potentials import CustomPT, PotentialSpec, pt_check
from .quadrature import QuadratureError, QuadratureSpec, default_spec, nodes_weights

ZERO_CUTOFF = 1e-15
SYMMETRY_TOL = 1e-13
PHASE_TOL = 1e-12


@dataclass(frozen=True)
class StructureReport:
    is_symmetric: bool
    max_asym: float
    parity_phase_ok: bool
    max_phase_violation: float


def quadrature_for(potential: PotentialSpec, basis: BasisSpec) -> QuadratureSpec:
    """Default quadrature resolving both basis products and potential oscillation."""
    x_max = basis.x_support
    return default_spec(x_max, basis.size_n, potential.wavenumber(x_max))


@lru_cache(maxsize=4)
def _node_table(size_n: int, spec: QuadratureSpec):
    x, w = nodes_weights(spec)
    table = phi_table(size_n, x)
    table.flags.writeable = False
    return table


def _half_line_block(table, w, x, f):
    # 2 * sum_j phi_m(x_j) phi_n(x_j) w_j f(x_j), upper triangle mirrored
    a = 2.0 * (table * (w * f(x))) @ table.T
    return np.triu(a) + np.triu(a, 1).T


def _quadrature_part(potential, basis, spec):
    n = basis.size_n
    even_rest, odd_rest = potential.even_rest(), potential.odd_rest()
    out = np.zeros((n, n), dtype=complex)
    if even_rest is None and odd_rest is None:
        return out
    x, w = nodes_weights(spec)
    table = _node_table(n, spec)
    idx = np.arange(n)
    even = (idx[:, None] + idx[None, :]) % 2 == 0
    if even_rest is not None:
        out.real[even] = _half_line_block(table, w, x, even_rest)[even]
    if odd_rest is not None:
        out.imag[~even] = _half_line_block(table, w, x, odd_rest)[~even]
    return out


def assemble(potential: PotentialSpec, basis: BasisSpec,
             quad: QuadratureSpec | None = None, *, tol: float | None = None) -> np.ndarray:
    """Complex N x N matrix ``(2m+1) delta_mn + <phi_m|V - x^2|phi_n>``.

    With ``tol`` set, the quadrature part is recomputed with doubled panel
    counts until no element moves by ``tol`` or more (at most 8 doublings);
    failure raises :class:`QuadratureError` naming the worst element.
    """
    n = basis.size_n
    if n < 2:
        raise ValueError("assembly needs size_n >= 2")
    if isinstance(potential, CustomPT) and not pt_check(potential, 64, basis.x_support):
        raise ValueError("custom potential is not PT-symmetric (even real, odd imaginary)")
    if quad is None:
        quad = quadrature_for(potential, basis)
    if quad.x_max < basis.x_support:
        raise ValueError("quadrature x_max must cover the basis support")

    m = np.diag(2.0 * np.arange(n) + 1.0).astype(complex)
    a2 = potential.x2_coeff - 1.0
    if a2:
        m.real += a2 * x2_matrix(n)
    if potential.x_coeff:
        m.imag += potential.x_coeff * x_matrix(n)

    q = _quadrature_part(potential, basis, quad)
    if tol is not None:
        for _ in range(8):
            quad = quad.doubled()
            q_new = _quadrature_part(potential, basis, quad)
            diff = np.abs(q_new - q)
            worst = np.unravel_index(np.argmax(diff), diff.shape)
            q = q_new
            if diff[worst] < tol:
                break
        else:
            raise QuadratureError(
                q[worst], float(diff[worst]), tol,
                context=f"matrix element ({worst[0]}, {worst[1]})",
            )
    m += q
    m.real[np.abs(m.real) < ZERO_CUTOFF] = 0.0
    m.imag[np.abs(m.imag) < ZERO_CUTOFF] = 0.0
    return m


def structure_report(m) -> StructureReport:
    """Symmetry and parity-phase checks of an assembled matrix."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    idx = np.arange(m.shape[0])
    even = (idx[:, None] + idx[None, :]) % 2 == 0
    m = m.astype(complex)
    violation = max(
        float(np.max(np.abs(m.imag[even]), initial=0.0)),
        float(np.max(np.abs(m.real[~even]), initial=0.0)),
    )
    return StructureReport(asym <= SYMMETRY_TOL, asym, violation <= PHASE_TOL, violation)


# ---------------------------------------------------------------------------
# matrix dump: one JSON header line, then dim*dim little-endian complex128, row-major

MAGIC = "ptmdm-matrix/1"


def save_matrix(path, m, potential: PotentialSpec | None = None) -> None:
    m = np.asarray(m, dtype="<c16")
    header = {
        "format": MAGIC,
        "dim": int(m.shape[0]),
        "potential": potential.name if potential is not None else None,
        "g": getattr(potential, "g", None),
        "N": int(m.shape[0]),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(np.ascontiguousarray(m).tobytes())


def load_matrix(path):
    """Return ``(matrix, header)`` from a file written by :func:`save_matrix`."""
    raw = Path(path).read_bytes()
    line, _, body = raw.partition(b"\n")
    header = json.loads(line)
    if header.get("format") != MAGIC:
        raise ValueError(f"{path}: not a {MAGIC} file")
    dim = header["dim"]
    if len(body) != dim * dim * 16:
        raise ValueError(f"{path}: expected {dim * dim * 16} data bytes, found {len(body)}")
    return np.frombuffer(body, dtype="<c16").reshape(dim, dim).copy(), header
