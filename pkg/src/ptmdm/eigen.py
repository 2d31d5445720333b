"""Dense eigensolver for complex non-Hermitian matrices.

Pipeline: diagonal balancing, Householder reduction to upper Hessenberg form,
then shifted QR iteration with deflation on negligible subdiagonals.

Two QR kernels share the pipeline:

* a complex single-shift kernel (Wilkinson shifts, implicit bulge chase with
  Givens rotations), used for general complex input;
* a real Francis double-shift kernel, used when the matrix is real or can be
  made real by a diagonal phase similarity ``diag(i**m)``.  Matrices assembled
  in a real parity-definite basis from a PT-symmetric potential have exactly
  this structure, and the real kernel returns their eigenvalues as exact
  conjugate pairs.

Eigenvectors come from inverse iteration on the Hessenberg form, transformed
back through the Householder reflectors, the phase similarity and the
balancing scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

EPS = np.finfo(np.float64).eps

MAX_SWEEPS = 40
EXCEPTIONAL_EVERY = 10

__all__ = [
    "ConvergenceError",
    "EigenPair",
    "balance",
    "decompose",
    "eigenpairs",
    "eigenvalues",
    "hessenberg",
    "phase_realify",
    "residual",
]


class ConvergenceError(RuntimeError):
    """QR iteration failed to deflate an eigenvalue within the sweep budget."""

    def __init__(self, index: int, sweeps: int = MAX_SWEEPS):
        self.index = index
        self.sweeps = sweeps
        super().__init__(
            f"eigenvalue {index} did not deflate within {sweeps} QR sweeps"
        )


@dataclass
class EigenPair:
    """Eigenvalue with optional unit-norm eigenvector and its residual."""

    value: complex
    vector: np.ndarray | None = None
    residual: float | None = None
    defective: bool = False


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True)
def _balance_kernel(a):
    n = a.shape[0]
    d = np.ones(n)
    radix = 2.0
    sqrdx = radix * radix
    done = False
    while not done:
        done = True
        for i in range(n):
            c = 0.0
            r = 0.0
            for j in range(n):
                if j != i:
                    c += abs(a[j, i])
                    r += abs(a[i, j])
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                d[i] *= f
                for j in range(n):
                    a[i, j] /= f
                    a[j, i] *= f
    return d


@numba.njit(cache=True)
def _hessenberg_kernel(a):
    # Householder reflectors P_k = I - 2 v v^H acting on rows/cols k+1..n-1.
    n = a.shape[0]
    refl = np.zeros((max(n - 2, 0), n), dtype=np.complex128)
    active = np.zeros(max(n - 2, 0), dtype=np.bool_)
    for k in range(n - 2):
        tail = 0.0
        for i in range(k + 2, n):
            tail += abs(a[i, k]) ** 2
        if tail == 0.0:
            continue
        x0 = a[k + 1, k]
        norm = np.sqrt(abs(x0) ** 2 + tail)
        phase = x0 / abs(x0) if x0 != 0 else 1.0 + 0.0j
        alpha = -phase * norm
        v = refl[k]
        v[k + 1] = x0 - alpha
        for i in range(k + 2, n):
            v[i] = a[i, k]
        vn = 0.0
        for i in range(k + 1, n):
            vn += abs(v[i]) ** 2
        vn = np.sqrt(vn)
        for i in range(k + 1, n):
            v[i] /= vn
        active[k] = True
        # left: A[k+1:, k:] -= 2 v (v^H A[k+1:, k:])
        for j in range(k, n):
            s = 0.0j
            for i in range(k + 1, n):
                s += np.conj(v[i]) * a[i, j]
            s *= 2.0
            for i in range(k + 1, n):
                a[i, j] -= v[i] * s
        # right: A[:, k+1:] -= 2 (A[:, k+1:] v) v^H
        for i in range(n):
            s = 0.0j
            for j in range(k + 1, n):
                s += a[i, j] * v[j]
            s *= 2.0
            for j in range(k + 1, n):
                a[i, j] -= s * np.conj(v[j])
        a[k + 1, k] = alpha
        for i in range(k + 2, n):
            a[i, k] = 0.0
    return refl, active


@numba.njit(cache=True)
def _hess_norm(h):
    n = h.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            s += abs(h[i, j])
    return s


@numba.njit(cache=True)
def _qr_complex(h, max_sweeps, exceptional_every):
    # Eigenvalues only; rotations are confined to the active window.
    n = h.shape[0]
    w = np.zeros(n, dtype=np.complex128)
    rot_c = np.ones(n)
    rot_s = np.zeros(n, dtype=np.complex128)
    anorm = _hess_norm(h)
    hi = n - 1
    its = 0
    while hi >= 0:
        l = hi
        while l > 0:
            s = abs(h[l - 1, l - 1]) + abs(h[l, l])
            if s == 0.0:
                s = anorm
            if abs(h[l, l - 1]) <= EPS * s:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            w[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if its == max_sweeps:
            return w, hi
        if its > 0 and its % exceptional_every == 0:
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1].real) + 0.75j * abs(h[hi, hi - 1].imag)
        else:
            a = h[hi - 1, hi - 1]
            b = h[hi - 1, hi]
            c = h[hi, hi - 1]
            d = h[hi, hi]
            tr = 0.5 * (a + d)
            disc = np.sqrt((0.5 * (a - d)) ** 2 + b * c)
            mu1 = tr + disc
            mu2 = tr - disc
            mu = mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2
        its += 1
        # Column rotations for rows above the bulge are deferred and applied
        # row by row after the sweep (row-major friendly); rows k+1, k+2 are
        # updated at once because the next rotation reads them.
        x = h[l, l] - mu
        y = h[l + 1, l]
        for k in range(l, hi):
            if k > l:
                x = h[k, k - 1]
                y = h[k + 1, k - 1]
            ax = abs(x)
            r = np.hypot(ax, abs(y))
            if r == 0.0:
                rot_c[k] = 1.0
                rot_s[k] = 0.0
                continue
            if ax == 0.0:
                c = 0.0
                s = 1.0 + 0.0j
                rr = y
            else:
                c = ax / r
                s = (x / ax) * np.conj(y) / r
                rr = (x / ax) * r
            rot_c[k] = c
            rot_s[k] = s
            if k > l:
                h[k, k - 1] = rr
                h[k + 1, k - 1] = 0.0
            cs = np.conj(s)
            for j in range(k, hi + 1):
                t1 = h[k, j]
                t2 = h[k + 1, j]
                h[k, j] = c * t1 + s * t2
                h[k + 1, j] = c * t2 - cs * t1
            for i in range(k + 1, min(k + 2, hi) + 1):
                t1 = h[i, k]
                t2 = h[i, k + 1]
                h[i, k] = c * t1 + cs * t2
                h[i, k + 1] = c * t2 - s * t1
        for i in range(l, hi + 1):
            for k in range(i, hi):
                c = rot_c[k]
                s = rot_s[k]
                t1 = h[i, k]
                t2 = h[i, k + 1]
                h[i, k] = c * t1 + np.conj(s) * t2
                h[i, k + 1] = c * t2 - s * t1
    return w, -1


@numba.njit(cache=True)
def _sign(a, b):
    return abs(a) if b >= 0.0 else -abs(a)


@numba.njit(cache=True)
def _qr_real(a, max_sweeps, exceptional_every):
    # Francis double-shift QR on a real Hessenberg matrix, eigenvalues only.
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = _hess_norm(a)
    nn = n - 1
    t = 0.0
    its = 0
    while nn >= 0:
        l = nn
        while l > 0:
            s = abs(a[l - 1, l - 1]) + abs(a[l, l])
            if s == 0.0:
                s = anorm
            if abs(a[l, l - 1]) <= EPS * s:
                a[l, l - 1] = 0.0
                break
            l -= 1
        x = a[nn, nn]
        if l == nn:
            wr[nn] = x + t
            wi[nn] = 0.0
            nn -= 1
            its = 0
            continue
        y = a[nn - 1, nn - 1]
        w = a[nn, nn - 1] * a[nn - 1, nn]
        if l == nn - 1:
            p = 0.5 * (y - x)
            q = p * p + w
            z = np.sqrt(abs(q))
            x += t
            if q >= 0.0:
                z = p + _sign(z, p)
                wr[nn - 1] = x + z
                wr[nn] = x + z
                if z != 0.0:
                    wr[nn] = x - w / z
                wi[nn - 1] = 0.0
                wi[nn] = 0.0
            else:
                wr[nn - 1] = x + p
                wr[nn] = x + p
                wi[nn - 1] = -z
                wi[nn] = z
            nn -= 2
            its = 0
            continue
        if its == max_sweeps:
            return wr, wi, nn
        if its > 0 and its % exceptional_every == 0:
            t += x
            for i in range(nn + 1):
                a[i, i] -= x
            s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
            x = 0.75 * s
            y = x
            w = -0.4375 * s * s
        its += 1
        m = nn - 2
        p = q = r = 0.0
        while m >= l:
            z = a[m, m]
            r = x - z
            s = y - z
            p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
            q = a[m + 1, m + 1] - z - r - s
            r = a[m + 2, m + 1]
            s = abs(p) + abs(q) + abs(r)
            p /= s
            q /= s
            r /= s
            if m == l:
                break
            u = abs(a[m, m - 1]) * (abs(q) + abs(r))
            v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
            if u <= EPS * v:
                break
            m -= 1
        for i in range(m + 2, nn + 1):
            a[i, i - 2] = 0.0
            if i != m + 2:
                a[i, i - 3] = 0.0
        for k in range(m, nn):
            if k != m:
                p = a[k, k - 1]
                q = a[k + 1, k - 1]
                r = 0.0
                if k != nn - 1:
                    r = a[k + 2, k - 1]
                x = abs(p) + abs(q) + abs(r)
                if x != 0.0:
                    p /= x
                    q /= x
                    r /= x
            s = _sign(np.sqrt(p * p + q * q + r * r), p)
            if s == 0.0:
                continue
            if k == m:
                if l != m:
                    a[k, k - 1] = -a[k, k - 1]
            else:
                a[k, k - 1] = -s * x
            p += s
            x = p / s
            y = q / s
            z = r / s
            q /= p
            r /= p
            for j in range(k, nn + 1):
                p = a[k, j] + q * a[k + 1, j]
                if k != nn - 1:
                    p += r * a[k + 2, j]
                    a[k + 2, j] -= p * z
                a[k + 1, j] -= p * y
                a[k, j] -= p * x
            top = nn if nn < k + 3 else k + 3
            for i in range(l, top + 1):
                p = x * a[i, k] + y * a[i, k + 1]
                if k != nn - 1:
                    p += z * a[i, k + 2]
                    a[i, k + 2] -= p * r
                a[i, k + 1] -= p * q
                a[i, k] -= p
    return wr, wi, -1


@numba.njit(cache=True)
def _hess_lu(h, sigma, tiny):
    # LU with partial pivoting of (H - sigma I); Hessenberg keeps one multiplier per column.
    n = h.shape[0]
    u = h.astype(np.complex128)
    for i in range(n):
        u[i, i] -= sigma
    mult = np.zeros(n, dtype=np.complex128)
    swap = np.zeros(n, dtype=np.bool_)
    for k in range(n - 1):
        if abs(u[k + 1, k]) > abs(u[k, k]):
            swap[k] = True
            for j in range(k, n):
                t = u[k, j]
                u[k, j] = u[k + 1, j]
                u[k + 1, j] = t
        if u[k, k] == 0:
            u[k, k] = tiny
        f = u[k + 1, k] / u[k, k]
        mult[k] = f
        u[k + 1, k] = 0.0
        for j in range(k + 1, n):
            u[k + 1, j] -= f * u[k, j]
    if u[n - 1, n - 1] == 0:
        u[n - 1, n - 1] = tiny
    return u, mult, swap


@numba.njit(cache=True)
def _hess_solve(u, mult, swap, b):
    n = u.shape[0]
    y = b.copy()
    for k in range(n - 1):
        if swap[k]:
            t = y[k]
            y[k] = y[k + 1]
            y[k + 1] = t
        y[k + 1] -= mult[k] * y[k]
    for i in range(n - 1, -1, -1):
        s = y[i]
        for j in range(i + 1, n):
            s -= u[i, j] * y[j]
        y[i] = s / u[i, i]
    return y


@numba.njit(cache=True)
def _apply_reflectors(refl, active, y):
    # v = P_0 P_1 ... P_{n-3} y
    n = y.shape[0]
    out = y.copy()
    for k in range(refl.shape[0] - 1, -1, -1):
        if not active[k]:
            continue
        v = refl[k]
        s = 0.0j
        for i in range(k + 1, n):
            s += np.conj(v[i]) * out[i]
        s *= 2.0
        for i in range(k + 1, n):
            out[i] -= v[i] * s
    return out


# ---------------------------------------------------------------------------
# public pieces


def balance(a):
    """Return ``(b, d)`` with ``b = diag(d)^-1 @ a @ diag(d)`` and ``d`` powers of 2."""
    b = np.array(a, copy=True)
    d = _balance_kernel(b)
    return b, d


def hessenberg(a):
    """Householder reduction ``h = Q^H a Q``; returns ``(h, reflectors, active)``.

    Row ``k`` of ``reflectors`` holds the unit vector of the k-th reflector;
    ``active[k]`` is False where the column was already reduced and the
    reflector was skipped.
    """
    h = np.array(a, dtype=np.complex128, copy=True)
    refl, active = _hessenberg_kernel(h)
    return h, refl, active


_PHASES = np.array([1, 1j, -1, -1j])


def phase_realify(a):
    """Try to write ``a = T r T^-1`` with ``T = diag(i**m)`` and ``r`` real.

    Returns ``(r, phases)`` or ``None``.  The test is exact: entries with
    ``m + n`` even must be real and entries with ``m + n`` odd purely
    imaginary, which is how assembly stores them.
    """
    a = np.asarray(a)
    if not np.iscomplexobj(a) or not np.any(a.imag):
        return np.array(a.real, dtype=np.float64), np.ones(a.shape[0], dtype=complex)
    idx = np.arange(a.shape[0])
    even = (idx[:, None] + idx[None, :]) % 2 == 0
    if np.any(a.imag[even]) or np.any(a.real[~even]):
        return None
    phases = _PHASES[idx % 4]
    # r[m, n] = i**(n - m) a[m, n]
    r = (np.conj(phases)[:, None] * a * phases[None, :]).real
    return np.ascontiguousarray(r), phases


@dataclass
class _Reduction:
    scale: np.ndarray
    phases: np.ndarray
    h: np.ndarray
    refl: np.ndarray
    active: np.ndarray
    real: bool


def _reduce(m, use_balance):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    n = m.shape[0]
    realified = phase_realify(m)
    if realified is not None:
        work, phases = realified
    else:
        work, phases = np.array(m, dtype=np.complex128), np.ones(n, dtype=complex)
    if use_balance:
        work, scale = balance(work)
    else:
        scale = np.ones(n)
    h, refl, active = hessenberg(work)
    return _Reduction(scale, phases, h, refl, active, realified is not None)


def _qr(red):
    if red.real:
        wr, wi, stuck = _qr_real(
            np.ascontiguousarray(red.h.real), MAX_SWEEPS, EXCEPTIONAL_EVERY
        )
        w = wr + 1j * wi
    else:
        w, stuck = _qr_complex(red.h.copy(), MAX_SWEEPS, EXCEPTIONAL_EVERY)
    if stuck >= 0:
        raise ConvergenceError(int(stuck))
    return _sorted(w)


def _sorted(w):
    return w[np.lexsort((w.imag, w.real))]


def eigenvalues(m, *, balance: bool = True) -> np.ndarray:
    """All eigenvalues of the square matrix ``m``, sorted by (real, imag)."""
    m = np.asarray(m)
    if m.shape == (0, 0):
        return np.zeros(0, dtype=complex)
    return _qr(_reduce(m, balance))


def residual(m, pair: EigenPair) -> float:
    """``||m v - E v||_2`` recomputed from scratch."""
    if pair.vector is None:
        raise ValueError("pair has no eigenvector")
    v = np.asarray(pair.vector)
    m = np.asarray(m)
    if m.shape[1] != v.shape[0]:
        raise ValueError("dimension mismatch between matrix and eigenvector")
    return float(np.linalg.norm(m @ v - pair.value * v))


def decompose(m, window=None, *, seed: int = 0, balance: bool = True):
    """Eigenvalues plus eigenpairs for those with real part inside ``window``.

    ``window`` is ``(lo, hi)`` on the real part (inclusive), a callable
    mapping the sorted eigenvalue array to a boolean mask, or ``None`` for
    every eigenvalue.  Returns ``(values, pairs)``.
    """
    m = np.asarray(m)
    red = _reduce(m, balance)
    values = _qr(red)
    if window is None:
        chosen = values
    elif callable(window):
        chosen = values[np.asarray(window(values), dtype=bool)]
    else:
        lo, hi = window
        if lo > hi:
            raise ValueError(f"empty window {window}")
        chosen = values[(values.real >= lo) & (values.real <= hi)]
    n = m.shape[0]
    fro = float(np.linalg.norm(m))
    hnorm = max(float(np.abs(red.h).sum(axis=1).max()), np.finfo(float).tiny)
    tiny = EPS * hnorm
    rng = np.random.default_rng(seed)
    pairs = []
    found = []  # (value, vector in Hessenberg coordinates)
    for lam in chosen:
        sigma = lam + tiny
        u, mult, swap = _hess_lu(red.h, sigma, tiny)
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y /= np.linalg.norm(y)
        twins = [v for mu, v in found if abs(mu - lam) <= 1e-10 * max(1.0, abs(lam))]
        defective = False
        for _ in range(2):
            y = _hess_solve(u, mult, swap, y)
            for v in twins:
                y -= np.vdot(v, y) * v
            ny = np.linalg.norm(y)
            if not np.isfinite(ny) or ny == 0.0:
                defective = True
                break
            y /= ny
        if not defective and twins:
            # a collapsed remainder after deflating the twins signals a Jordan block
            probe = _hess_solve(u, mult, swap, y)
            orth = probe.copy()
            for v in twins:
                orth -= np.vdot(v, orth) * v
            if np.linalg.norm(orth) < 1e-8 * np.linalg.norm(probe):
                defective = True
        if defective:
            pairs.append(EigenPair(complex(lam), None, None, True))
            continue
        found.append((lam, y))
        x = _apply_reflectors(red.refl, red.active, y.astype(np.complex128))
        x = red.phases * red.scale * x
        x /= np.linalg.norm(x)
        pair = EigenPair(complex(lam), x)
        pair.residual = residual(m, pair)
        if twins and pair.residual > 1e-8 * fro:
            pair = EigenPair(complex(lam), None, None, True)
        pairs.append(pair)
    return values, pairs


def eigenpairs(m, window=None, *, seed: int = 0, balance: bool = True) -> list[EigenPair]:
    """Eigenpairs with real part in ``window`` (see :func:`decompose`)."""
    return decompose(m, window, seed=seed, balance=balance)[1]
