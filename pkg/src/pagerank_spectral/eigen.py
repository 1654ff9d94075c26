"""Dense eigenvalues of real unsymmetric matrices.

Householder reduction to upper Hessenberg form followed by the implicit
double-shift (Francis) QR iteration.  Only eigenvalues are computed, so each
bulge-chasing sweep updates just the active diagonal block.  Converged 1x1
blocks give real eigenvalues; 2x2 blocks are solved in closed form and give
either two real eigenvalues or a complex-conjugate pair.
"""
from __future__ import annotations

import math

import numpy as np

from .core import DENSE_CAP
from .errors import DenseCapError, DimensionError, EigenConvergenceError, InputError

DEFLATION_TOL = 1e-12
SWEEPS_PER_EIGENVALUE = 50
EXCEPTIONAL_EVERY = 10


def _square(M, cap: int) -> np.ndarray:
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] > cap:
        raise DenseCapError(f"refusing dense eigensolve for n={M.shape[0]} > cap {cap}")
    if not np.all(np.isfinite(M)):
        raise InputError("matrix has non-finite entries")
    return M


def _reflector(x: np.ndarray) -> np.ndarray | None:
    """Unit ``u`` with ``(I - 2uu^T) x`` parallel to ``e_1``; ``None`` for ``x = 0``."""
    norm = math.hypot(*x) if x.size <= 3 else float(np.linalg.norm(x))
    if norm == 0.0:
        return None
    u = np.array(x, dtype=float)
    u[0] += math.copysign(norm, u[0])
    return u / np.linalg.norm(u)


def hessenberg(M, return_q: bool = False, cap: int = DENSE_CAP):
    """Orthogonal reduction ``M = Q H Q^T`` with ``H`` upper Hessenberg."""
    H = _square(M, cap)
    n = H.shape[0]
    Q = np.eye(n) if return_q else None
    for k in range(n - 2):
        u = _reflector(H[k + 1:, k])
        if u is None:
            continue
        H[k + 1:, k:] -= 2.0 * np.outer(u, u @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ u, u)
        H[k + 2:, k] = 0.0
        if return_q:
            Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ u, u)
    return (H, Q) if return_q else H


def _eig2x2(a: float, b: float, c: float, d: float) -> tuple[complex, complex]:
    p = 0.5 * (a - d)
    bc = b * c
    disc = p * p + bc
    if disc >= 0.0:
        z = p + math.copysign(math.sqrt(disc), p)
        if z == 0.0:
            return complex(d), complex(d)
        # product form avoids cancellation in the smaller root
        return complex(d + z), complex(d - bc / z)
    re = d + p
    im = math.sqrt(-disc)
    return complex(re, im), complex(re, -im)


def _double_shift_sweep(H: np.ndarray, lo: int, hi: int, trace: float, det: float) -> None:
    """One Francis step on the active block ``H[lo:hi+1, lo:hi+1]`` (in place)."""
    h = H
    x = h[lo, lo] * h[lo, lo] + h[lo, lo + 1] * h[lo + 1, lo] - trace * h[lo, lo] + det
    y = h[lo + 1, lo] * (h[lo, lo] + h[lo + 1, lo + 1] - trace)
    z = h[lo + 1, lo] * h[lo + 2, lo + 1]
    for k in range(lo, hi - 1):
        u = _reflector(np.array([x, y, z]))
        if u is not None:
            q = max(lo, k - 1)
            blk = h[k:k + 3, q:hi + 1]
            blk -= 2.0 * np.outer(u, u @ blk)
            r = min(k + 3, hi)
            blk = h[lo:r + 1, k:k + 3]
            blk -= 2.0 * np.outer(blk @ u, u)
            if k > lo:
                h[k + 1, k - 1] = 0.0
                h[k + 2, k - 1] = 0.0
        x = h[k + 1, k]
        y = h[k + 2, k]
        if k < hi - 2:
            z = h[k + 3, k]
    u = _reflector(np.array([x, y]))
    if u is not None:
        blk = h[hi - 1:hi + 1, hi - 2:hi + 1]
        blk -= 2.0 * np.outer(u, u @ blk)
        blk = h[lo:hi + 1, hi - 1:hi + 1]
        blk -= 2.0 * np.outer(blk @ u, u)
        h[hi, hi - 2] = 0.0


def eigenvalues_dense(
    M,
    deflation_tol: float = DEFLATION_TOL,
    max_sweeps: int | None = None,
    cap: int = DENSE_CAP,
) -> np.ndarray:
    """All eigenvalues of a real square matrix as a complex array.

    A subdiagonal entry is set to zero once it falls below ``deflation_tol``
    times the sum of its two diagonal neighbours.  Every ``EXCEPTIONAL_EVERY``
    sweeps without deflation an ad hoc shift breaks cycling (permutation
    matrices need it).  Raises :class:`EigenConvergenceError` listing the
    undeflated indices if ``max_sweeps`` (default ``50 n``) is exhausted.
    """
    H = hessenberg(M, cap=cap)
    n = H.shape[0]
    eig = np.empty(n, dtype=complex)
    if max_sweeps is None:
        max_sweeps = SWEEPS_PER_EIGENVALUE * max(n, 1)
    scale = float(np.abs(H).sum()) or 1.0
    sweeps = 0
    its = 0
    hi = n - 1
    while hi >= 0:
        lo = hi
        while lo > 0:
            s = abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])
            if s == 0.0:
                s = scale
            if abs(H[lo, lo - 1]) <= deflation_tol * s:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eig[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        if lo == hi - 1:
            eig[hi - 1], eig[hi] = _eig2x2(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
            hi -= 2
            its = 0
            continue
        if sweeps >= max_sweeps:
            raise EigenConvergenceError(list(range(hi + 1)), sweeps)
        sweeps += 1
        its += 1
        if its % EXCEPTIONAL_EVERY == 0:
            if its % (2 * EXCEPTIONAL_EVERY) == EXCEPTIONAL_EVERY:
                s = abs(H[lo + 1, lo]) + abs(H[lo + 2, lo + 1])
                h11 = 0.75 * s + H[lo, lo]
            else:
                s = abs(H[hi, hi - 1]) + abs(H[hi - 1, hi - 2])
                h11 = 0.75 * s + H[hi, hi]
            trace = 2.0 * h11
            det = h11 * h11 + 0.4375 * s * s
        else:
            a, b = H[hi - 1, hi - 1], H[hi - 1, hi]
            c, d = H[hi, hi - 1], H[hi, hi]
            trace = a + d
            det = a * d - b * c
        _double_shift_sweep(H, lo, hi, trace, det)
    return eig


def smallest_singular_value(M, lam: complex) -> float:
    """``sigma_min(M - lam I)``; zero exactly when ``lam`` is an eigenvalue."""
    M = np.asarray(M)
    shifted = M - lam * np.eye(M.shape[0])
    return float(np.linalg.svd(shifted, compute_uv=False)[-1])


def drop_nearest(spectrum, target: complex = 1.0) -> np.ndarray:
    """Remove the single eigenvalue closest to ``target``."""
    s = np.asarray(spectrum, dtype=complex)
    if s.size == 0:
        raise InputError("cannot drop from an empty spectrum")
    return np.delete(s, int(np.argmin(np.abs(s - target))))


def second_modulus(spectrum) -> float:
    """Largest modulus after removing the eigenvalue nearest to 1 (0 for n = 1)."""
    rest = drop_nearest(spectrum, 1.0)
    return float(np.abs(rest).max()) if rest.size else 0.0


def match_multisets(s1, s2) -> float:
    """Largest pair distance of a greedy nearest-neighbour matching.

    All cross distances are sorted ascending and pairs are accepted whenever
    both members are still unmatched.
    """
    a = np.asarray(s1, dtype=complex).ravel()
    b = np.asarray(s2, dtype=complex).ravel()
    if a.size != b.size:
        raise DimensionError(f"multisets differ in size: {a.size} vs {b.size}")
    if a.size == 0:
        return 0.0
    dist = np.abs(a[:, None] - b[None, :])
    order = np.argsort(dist, axis=None, kind="stable")
    used_a = np.zeros(a.size, dtype=bool)
    used_b = np.zeros(b.size, dtype=bool)
    worst = 0.0
    matched = 0
    for flat in order:
        i, j = divmod(int(flat), b.size)
        if used_a[i] or used_b[j]:
            continue
        used_a[i] = used_b[j] = True
        worst = max(worst, float(dist[i, j]))
        matched += 1
        if matched == a.size:
            break
    return worst


def is_conjugate_closed(spectrum, tol: float = 1e-8) -> bool:
    s = np.asarray(spectrum, dtype=complex)
    return match_multisets(s, s.conj()) <= tol
