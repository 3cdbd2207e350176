"""Finite differences, bracketing root scans and a batched damped Newton."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

TAU_GRP = 1e-9
TAU_LOOP = 1e-8
TAU_FD = 1e-5
DELTA_OBS = 0.01
RANK_TOL = 1e-6
FD_STEP = 1e-3
DEFAULT_SEED = 20110101


class ExtractionUnstable(RuntimeError):
    """Two finite-difference step sizes disagree beyond tolerance."""


class NoSolution(RuntimeError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class MultipleSolutions(RuntimeError):
    def __init__(self, message: str, witness=None, roots=None):
        super().__init__(message)
        self.witness = witness
        self.roots = roots


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def mixed_second(F: Callable[[float, float], np.ndarray], h: float = FD_STEP, tol: float = TAU_FD) -> np.ndarray:
    """d^2 F / ds dt at (0, 0) by central differences plus one Richardson step.

    Raises ExtractionUnstable when the h and h/2 extrapolants disagree.
    """

    def d(step):
        return (F(step, step) - F(step, -step) - F(-step, step) + F(-step, -step)) / (4 * step * step)

    d1, d2, d4 = d(h), d(h / 2), d(h / 4)
    r1 = (4 * d2 - d1) / 3
    r2 = (4 * d4 - d2) / 3
    if np.max(np.abs(r1 - r2)) > tol:
        raise ExtractionUnstable(f"Richardson estimates differ by {np.max(np.abs(r1 - r2)):.3g}")
    return r2


def first_derivative(F: Callable[[float], np.ndarray], h: float = FD_STEP, tol: float = TAU_FD) -> np.ndarray:
    """dF/dt at 0, central differences with Richardson."""

    def d(step):
        return (F(step) - F(-step)) / (2 * step)

    d1, d2, d4 = d(h), d(h / 2), d(h / 4)
    r1 = (4 * d2 - d1) / 3
    r2 = (4 * d4 - d2) / 3
    if np.max(np.abs(r1 - r2)) > tol:
        raise ExtractionUnstable(f"Richardson estimates differ by {np.max(np.abs(r1 - r2)):.3g}")
    return r2


def to_rational(x: float, max_den: int = 12) -> Fraction:
    return Fraction(x).limit_denominator(max_den)


def numeric_rank(vectors, tol: float = RANK_TOL) -> tuple[int, np.ndarray]:
    m = np.atleast_2d(np.asarray(vectors, dtype=float))
    if m.size == 0:
        return 0, np.zeros(0)
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv > tol)), sv


# --- scalar roots -----------------------------------------------------------


@dataclass(frozen=True)
class ScanResult:
    roots: np.ndarray  # shape (N, max_roots), NaN padded
    count: np.ndarray  # shape (N,)


def scan_roots(g: Callable[[np.ndarray, np.ndarray], np.ndarray], n_problems: int, lo: float = -10.0,
               hi: float = 10.0, n_brackets: int = 401, tol: float = 1e-12, max_iter: int = 100) -> ScanResult:
    """Find all sign-change roots of N scalar functions on [lo, hi].

    ``g(idx, t)`` evaluates problems ``idx`` (shape (K,)) at points ``t``
    (shape (K, M)).  Each bracket is refined by Newton steps with a
    finite-difference slope, falling back to bisection whenever a step
    leaves the bracket.
    """
    t = np.linspace(lo, hi, n_brackets + 1)
    idx = np.arange(n_problems)
    G = np.asarray(g(idx, np.broadcast_to(t, (n_problems, t.size))), dtype=float)
    exact = G == 0.0
    # a node that is an exact zero is attributed to the bracket on its left
    starts = (G[:, :-1] * G[:, 1:] < 0) | exact[:, :-1]
    counts = starts.sum(axis=1) + exact[:, -1]
    roots = np.full((n_problems, max(int(counts.max(initial=0)), 1)), np.nan)
    rows, cols = np.nonzero(starts)
    if rows.size:
        x = _refine(g, rows, t[cols], t[cols + 1], G[rows, cols], tol, max_iter)
        slot = np.zeros(n_problems, dtype=int)
        for r, xv in zip(rows, x):
            roots[r, slot[r]] = xv
            slot[r] += 1
    for r in np.nonzero(exact[:, -1])[0]:
        roots[r, counts[r] - 1] = t[-1]
    return ScanResult(roots, counts)


def _refine(g, rows, a, b, ga, tol, max_iter):
    def ev(x):
        return np.asarray(g(rows, x[:, None]), dtype=float)[:, 0]

    a = a.copy()
    b = b.copy()
    ga = ga.copy()
    x = np.where(ga == 0.0, a, 0.5 * (a + b))
    frozen = ga == 0.0
    for _ in range(max_iter):
        gx = ev(x)
        frozen |= gx == 0.0
        left = np.sign(gx) == np.sign(ga)
        a, ga = np.where(left, x, a), np.where(left, gx, ga)
        b = np.where(left, b, x)
        h = 1e-7 * np.maximum(1.0, np.abs(x))
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = (ev(x + h) - ev(x - h)) / (2 * h)
            newton = x - gx / slope
        inside = np.isfinite(newton) & (newton > np.minimum(a, b)) & (newton < np.maximum(a, b))
        x_new = np.where(inside, newton, 0.5 * (a + b))
        done = frozen | (np.abs(x_new - x) < tol) | (np.abs(b - a) < tol)
        x = np.where(frozen, x, x_new)
        if np.all(done):
            break
    return x


# --- vector Newton ----------------------------------------------------------


def newton_batch(F: Callable[[np.ndarray], np.ndarray], target: np.ndarray, x0: np.ndarray,
                 tol: float = 1e-12, max_iter: int = 60, h: float = 1e-7) -> tuple[np.ndarray, np.ndarray]:
    """Solve F(x) = target column-wise; arrays have shape (k, N).

    Damped Newton with a finite-difference Jacobian and step halving on the
    residual norm.  Returns (x, final residual norms).
    """
    x = np.array(x0, dtype=float)
    k, N = x.shape
    r = F(x) - target
    res = np.max(np.abs(r), axis=0)
    for _ in range(max_iter):
        active = res > tol
        if not np.any(active):
            break
        J = np.empty((N, k, k))
        for j in range(k):
            step = h * np.maximum(1.0, np.abs(x[j]))
            xp = x.copy()
            xm = x.copy()
            xp[j] += step
            xm[j] -= step
            J[:, :, j] = ((F(xp) - F(xm)) / (2 * step)).T
        with np.errstate(all="ignore"):
            try:
                dx = np.linalg.solve(J, (-r).T[:, :, None])[:, :, 0].T
            except np.linalg.LinAlgError:
                dx = (np.linalg.pinv(J) @ (-r).T[:, :, None])[:, :, 0].T
        dx = np.where(np.isfinite(dx), dx, 0.0)
        lam = np.ones(N)
        for _ in range(30):
            xn = x + lam * dx
            with np.errstate(all="ignore"):
                rn = F(xn) - target
            rn_res = np.max(np.abs(rn), axis=0)
            better = np.isfinite(rn_res) & (rn_res < res)
            if np.all(better | ~active):
                break
            lam = np.where(better | ~active, lam, lam / 2)
        upd = active & np.isfinite(rn_res) & (rn_res <= res)
        x = np.where(upd, xn, x)
        r = np.where(upd, rn, r)
        res = np.where(upd, rn_res, res)
        if not np.any(upd & active):
            break
    return x, res
