"""Numerical check that ``eig(A) = {1} U alpha * (eig(P) minus one copy of 1)``.

With ``U = [e_hat U1]`` orthogonal and ``e_hat = e / sqrt(n)``, column
stochasticity (``e_hat^T M = e_hat^T``) forces

    U^T P U = [[1, 0], [w,  T]]
    U^T A U = [[1, 0], [w1, alpha T]]

so the trailing blocks of the two transformed matrices differ exactly by the
factor ``alpha``.  :func:`verify_theorem` rebuilds both block forms and
measures every deviation, then compares the spectra with the eigensolver.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import DENSE_CAP, GoogleOperator, SparseTransition, materialize_dense
from .eigen import drop_nearest, eigenvalues_dense, match_multisets, second_modulus
from .errors import DenseCapError, DimensionError, InputError

ORTHOGONALITY_TOL = 1e-8


def build_orthogonal_U(n: int) -> np.ndarray:
    """Householder reflector ``I - 2uu^T/(u^T u)`` with ``u = e_hat - e_1``.

    The reflector swaps ``e_1`` and ``e_hat``, so its first column is
    ``e_hat``.  No sign flip is needed: ``e_hat[0] = 1/sqrt(n) < 1`` for
    ``n >= 2``.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if n == 1:
        return np.ones((1, 1))
    u = np.full(n, 1.0 / math.sqrt(n))
    u[0] -= 1.0
    return np.eye(n) - (2.0 / (u @ u)) * np.outer(u, u)


@dataclass
class SimilarityReport:
    top_left: float
    top_right_norm: float
    w: np.ndarray
    T: np.ndarray
    transformed: np.ndarray = field(repr=False)


def similarity_reduce(M, U) -> SimilarityReport:
    """Split ``U^T M U`` into its leading scalar, top row, first column and trailing block."""
    M = np.asarray(M, dtype=float)
    U = np.asarray(U, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if U.shape != M.shape:
        raise DimensionError(f"U has shape {U.shape}, M has shape {M.shape}")
    n = M.shape[0]
    orth = np.abs(U.T @ U - np.eye(n)).max()
    if orth > ORTHOGONALITY_TOL:
        raise InputError(f"U is not orthogonal (max |U^T U - I| = {orth:.3e})")
    if np.abs(M.sum(axis=0) - 1.0).max() > 1e-10:
        warnings.warn("matrix is not column-stochastic; the top row need not be (1, 0)",
                      stacklevel=2)
    B = U.T @ M @ U
    top_right = float(np.abs(B[0, 1:]).max()) if n > 1 else 0.0
    return SimilarityReport(
        top_left=float(B[0, 0]),
        top_right_norm=top_right,
        w=B[1:, 0].copy(),
        T=B[1:, 1:].copy(),
        transformed=B,
    )


@dataclass
class TheoremReport:
    n: int
    alpha: float
    p_report: SimilarityReport = field(repr=False)
    a_report: SimilarityReport = field(repr=False)
    block_defect: float
    block_scale: float
    structure_defects: dict[str, float]
    teleport_defect: float
    w1_defect: float
    eig_multiset_defect: float | None
    lambda2_modulus: float | None
    eig_P: np.ndarray | None = field(default=None, repr=False)
    eig_A: np.ndarray | None = field(default=None, repr=False)
    passed: bool = False

    @property
    def max_structure_defect(self) -> float:
        return max(self.structure_defects.values())


def verify_theorem(
    P: SparseTransition,
    alpha: float,
    v=None,
    tol: float = 1e-10,
    eig_tol: float = 1e-8,
    check_spectrum: bool = True,
    cap: int = DENSE_CAP,
) -> TheoremReport:
    """Rebuild both block forms for ``P`` and ``A`` and measure every deviation.

    Tolerance violations are recorded in ``passed`` rather than raised.  The
    trailing-block defect is judged relative to ``1 + ||T_P||_F``; the
    spectra, when checked, against ``eig_tol``.
    """
    if P.n > cap:
        raise DenseCapError(f"refusing to verify n={P.n} > dense cap {cap}")
    op = GoogleOperator(P, alpha, v)
    n = op.n
    P_dense = P.to_dense(op.v, cap=cap)
    A_dense = materialize_dense(op, cap=cap)
    U = build_orthogonal_U(n)
    rp = similarity_reduce(P_dense, U)
    ra = similarity_reduce(A_dense, U)

    block_defect = float(np.linalg.norm(ra.T - op.alpha * rp.T))
    block_scale = 1.0 + float(np.linalg.norm(rp.T))
    structure = {
        "P_top_left": abs(rp.top_left - 1.0),
        "P_top_right": rp.top_right_norm,
        "A_top_left": abs(ra.top_left - 1.0),
        "A_top_right": ra.top_right_norm,
    }

    # U^T v = (1/sqrt(n); U1^T v) and e^T U = (sqrt(n), 0, ..., 0)
    root_n = math.sqrt(n)
    Utv = U.T @ op.v
    eU = U.sum(axis=0)
    lhs = (1.0 - op.alpha) * np.outer(Utv, eU)
    col = np.concatenate([[1.0 / root_n], U[:, 1:].T @ op.v])
    row = np.zeros(n)
    row[0] = root_n
    rhs = (1.0 - op.alpha) * np.outer(col, row)
    teleport_defect = float(np.abs(lhs - rhs).max())
    w1_expected = op.alpha * rp.w + (1.0 - op.alpha) * root_n * (U[:, 1:].T @ op.v)
    w1_defect = float(np.abs(ra.w - w1_expected).max()) if n > 1 else 0.0

    passed = (
        max(structure.values()) <= tol
        and block_defect <= tol * block_scale
        and teleport_defect <= tol
        and w1_defect <= tol
    )

    eig_defect = lam2 = eig_P = eig_A = None
    if check_spectrum:
        eig_P = eigenvalues_dense(P_dense, cap=cap)
        eig_A = eigenvalues_dense(A_dense, cap=cap)
        eig_defect = match_multisets(drop_nearest(eig_A), op.alpha * drop_nearest(eig_P))
        lam2 = second_modulus(eig_A)
        passed = passed and eig_defect <= eig_tol

    return TheoremReport(
        n=n,
        alpha=op.alpha,
        p_report=rp,
        a_report=ra,
        block_defect=block_defect,
        block_scale=block_scale,
        structure_defects=structure,
        teleport_defect=teleport_defect,
        w1_defect=w1_defect,
        eig_multiset_defect=eig_defect,
        lambda2_modulus=lam2,
        eig_P=eig_P,
        eig_A=eig_A,
        passed=bool(passed),
    )
