"""Power iteration on the implicit Google operator.

The stopping rule is the 1-norm of successive differences.  The residual
``||Ax - x||_1`` is computed separately after the loop and reported as an
independent certificate.

Successive differences ``d_k = x_{k+1} - x_k`` satisfy ``e^T d_k = 0``, so the
teleportation term drops out and ``d_{k+1} = alpha * P d_k``.  The ratios
``||d_{k+1}|| / ||d_k||`` therefore approach ``alpha * |lambda_2(P)|``, the
modulus of the subdominant eigenvalue of ``A``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import GoogleOperator, apply_google, check_rank_vector
from .errors import DimensionError, InputError, InsufficientTraceError

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITERS = 10000
DEFAULT_WINDOW = 10
# Differences below this are dominated by rounding (~1e-17 per entry), which
# would bias the ratios; 1e-6 keeps each ratio accurate to about 1e-10.
RATE_FLOOR = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    tol: float = DEFAULT_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    record_trace: bool = True
    window: int = DEFAULT_WINDOW
    rate_floor: float = RATE_FLOOR

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError(f"tol must be positive, got {self.tol!r}")
        if self.max_iters < 1:
            raise InputError(f"max_iters must be >= 1, got {self.max_iters!r}")
        if self.window < 1:
            raise InputError(f"window must be >= 1, got {self.window!r}")


@dataclass
class ConvergenceTrace:
    """Per-iteration ``||x_{k+1} - x_k||_1`` values of one power-method run."""

    diff_norms: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.diff_norms)

    @property
    def ratios(self) -> np.ndarray:
        """``diff[k] / diff[k-1]``; NaN where the denominator is zero."""
        d = np.asarray(self.diff_norms, dtype=float)
        if d.size < 2:
            return np.empty(0)
        num, den = d[1:], d[:-1]
        out = np.full(num.shape, np.nan)
        np.divide(num, den, out=out, where=den > 0)
        return out


@dataclass
class RankResult:
    x: np.ndarray
    iterations: int
    converged: bool
    final_residual: float
    estimated_rate: float | None
    trace: ConvergenceTrace | None = None

    @property
    def n(self) -> int:
        return int(self.x.size)


def estimate_rate(
    trace: ConvergenceTrace, window: int = DEFAULT_WINDOW, floor: float = RATE_FLOOR
) -> float:
    """Geometric mean of the last ``window`` contraction ratios.

    Ratios involving a difference norm at or below ``floor`` are excluded.
    Raises :class:`InsufficientTraceError` (carrying the excluded count) when
    fewer than ``window`` ratios remain.
    """
    d = np.asarray(trace.diff_norms, dtype=float)
    usable = d > floor
    excluded = int(np.count_nonzero(~usable))
    ok = usable[1:] & usable[:-1]
    ratios = d[1:][ok] / d[:-1][ok]
    if ratios.size < window:
        raise InsufficientTraceError(
            f"need {window} ratios above floor {floor:g}, have {ratios.size} "
            f"({excluded} of {d.size} differences excluded)",
            excluded=excluded,
        )
    if excluded:
        log.debug("estimate_rate: %d difference norms below floor %g excluded", excluded, floor)
    tail = ratios[-window:]
    return math.exp(float(np.mean(np.log(tail))))


def residual(op: GoogleOperator, x: np.ndarray) -> float:
    """``||A x - x||_1``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (op.n,):
        raise DimensionError(f"vector has shape {x.shape}, expected ({op.n},)")
    return float(np.abs(apply_google(op, x) - x).sum())


def power_method(
    op: GoogleOperator, x0: np.ndarray | None = None, cfg: SolverConfig | None = None
) -> RankResult:
    """Iterate ``x <- A x / ||A x||_1`` from ``x0`` (uniform by default).

    Exhausting ``max_iters`` is not an error; the result carries
    ``converged=False``.
    """
    cfg = cfg or SolverConfig()
    n = op.n
    x = np.full(n, 1.0 / n) if x0 is None else check_rank_vector(x0, n)
    trace = ConvergenceTrace()
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iters + 1):
        y = apply_google(op, x)
        y /= y.sum()
        diff = float(np.abs(y - x).sum())
        trace.diff_norms.append(diff)
        x = y
        if diff <= cfg.tol:
            converged = True
            break
    if not converged:
        log.warning("power method stopped after %d iterations without reaching tol %g",
                    iterations, cfg.tol)
    try:
        rate = estimate_rate(trace, window=cfg.window, floor=cfg.rate_floor)
    except InsufficientTraceError:
        rate = None
    return RankResult(
        x=x,
        iterations=iterations,
        converged=converged,
        final_residual=residual(op, x),
        estimated_rate=rate,
        trace=trace if cfg.record_trace else None,
    )
