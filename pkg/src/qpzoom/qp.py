"""Zoom/rigid energy as an equality-constrained QP over grid intervals.

Unknowns are stacked as ``d = (d_row[0..m), d_col[0..n))``.  The objective
``1/2 d.P d + q.d + const`` equals ``E_zoom + lam * E_rigid`` exactly, and the
only constraints are that the row intervals sum to ``H`` and the column
intervals sum to ``W``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from .errors import DegenerateDeformationError, InvalidArgumentError, SolverError
from .importance import ScoreGrid


@dataclass(frozen=True)
class ZoomParams:
    gamma: float = 1.5
    lam: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma >= 1):
            raise InvalidArgumentError(f"zoom factor must be finite and >= 1, got {self.gamma}")
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise InvalidArgumentError(f"balance weight must be finite and >= 0, got {self.lam}")


@dataclass(frozen=True)
class QPProblem:
    P: np.ndarray
    q: np.ndarray
    A: np.ndarray
    b_eq: np.ndarray
    m: int
    n: int
    const: float = 0.0

    def objective(self, d) -> float:
        """``1/2 d.P d + q.d + const``."""
        d = np.asarray(d, dtype=float)
        return float(0.5 * d @ self.P @ d + self.q @ d + self.const)


@dataclass(frozen=True)
class Intervals:
    d_row: np.ndarray
    d_col: np.ndarray

    @classmethod
    def uniform(cls, W: float, H: float, m: int, n: int) -> "Intervals":
        return cls(np.full(m, H / m), np.full(n, W / n))

    @property
    def m(self) -> int:
        return len(self.d_row)

    @property
    def n(self) -> int:
        return len(self.d_col)

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.d_row, self.d_col])

    def check_positive(self):
        for axis, vals in (("row", self.d_row), ("col", self.d_col)):
            bad = np.flatnonzero(~(vals > 0))
            if bad.size:
                i = int(bad[0])
                raise DegenerateDeformationError(axis, i, float(vals[i]))


def assemble(S: ScoreGrid, W: float, H: float, zp: ZoomParams) -> QPProblem:
    """Build ``P, q, A, b_eq`` for the interval QP."""
    if not (W > 0 and H > 0):
        raise InvalidArgumentError(f"crop extent must be positive, got {W}x{H}")
    s2 = np.asarray(S.scores, dtype=float) ** 2
    m, n = s2.shape
    lam, gamma = zp.lam, zp.gamma
    s_row = s2.sum(axis=1)  # summed over columns, one per row interval
    s_col = s2.sum(axis=0)

    N = m + n
    P = np.zeros((N, N))
    idx_r = np.arange(m)
    idx_c = np.arange(m, N)
    P[idx_r, idx_r] = 2 * s_row * (lam * (m / H) ** 2 + 1)
    P[idx_c, idx_c] = 2 * s_col * (lam * (n / W) ** 2 + 1)
    cross = -2 * lam * s2 * (m * n / (H * W))
    P[:m, m:] = cross
    P[m:, :m] = cross.T

    q = np.concatenate([-2 * s_row * H / (gamma * m), -2 * s_col * W / (gamma * n)])

    A = np.zeros((2, N))
    A[0, :m] = 1.0
    A[1, m:] = 1.0
    b_eq = np.array([H, W], dtype=float)

    const = float(s2.sum() * ((H / (gamma * m)) ** 2 + (W / (gamma * n)) ** 2))
    return QPProblem(P, q, A, b_eq, m, n, const)


def solve_kkt(p: QPProblem) -> Tuple[np.ndarray, np.ndarray]:
    """Minimizer and multipliers of the QP via Cholesky of ``P`` and a 2x2 Schur complement.

    Solves ``[P A^T; A 0] [d; nu] = [-q; b_eq]`` followed by one round of
    iterative refinement.
    """
    try:
        cf = scipy.linalg.cho_factor(p.P, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"QP matrix is not positive definite: {exc}") from exc
    Y = scipy.linalg.cho_solve(cf, p.A.T)
    schur = p.A @ Y
    if not np.isfinite(schur).all() or abs(np.linalg.det(schur)) < 1e-300:
        raise SolverError("singular Schur complement in KKT system")

    def kkt(r1, r2):
        x0 = scipy.linalg.cho_solve(cf, r1)
        nu = np.linalg.solve(schur, p.A @ x0 - r2)
        return x0 - Y @ nu, nu

    d, nu = kkt(-p.q, p.b_eq)
    d_corr, nu_corr = kkt(-(p.P @ d + p.q + p.A.T @ nu), p.b_eq - p.A @ d)
    d, nu = d + d_corr, nu + nu_corr
    if not np.isfinite(d).all():
        raise SolverError("KKT solve produced non-finite intervals")
    return d, nu


def kkt_residuals(p: QPProblem, d, nu) -> Tuple[float, float]:
    """Infinity norms of the stationarity and feasibility residuals."""
    stat = np.max(np.abs(p.P @ d + p.q + p.A.T @ nu))
    feas = np.max(np.abs(p.A @ d - p.b_eq))
    return float(stat), float(feas)


def solve(p: QPProblem) -> Intervals:
    """Solve the interval QP; raises if any interval comes out non-positive."""
    d, _ = solve_kkt(p)
    iv = Intervals(d[:p.m].copy(), d[p.m:].copy())
    iv.check_positive()
    return iv


def energy(d: Intervals, S: ScoreGrid, W: float, H: float, zp: ZoomParams) -> Tuple[float, float]:
    """Zoom and rigid energies of ``d`` evaluated term by term (not via ``P``)."""
    s2 = np.asarray(S.scores, dtype=float) ** 2
    m, n = s2.shape
    if d.m != m or d.n != n:
        raise InvalidArgumentError(f"intervals {d.m}x{d.n} do not match score grid {m}x{n}")
    dr = d.d_row[:, None]
    dc = d.d_col[None, :]
    e_zoom = np.sum(s2 * ((dr - H / (zp.gamma * m)) ** 2 + (dc - W / (zp.gamma * n)) ** 2))
    e_rigid = np.sum(s2 * (m / H * dr - n / W * dc) ** 2)
    return float(e_zoom), float(e_rigid)
