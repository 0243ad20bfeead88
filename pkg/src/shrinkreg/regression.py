"""Least-squares fitting under linear restrictions and the Wald-type test.

Everything here works from a pivoted QR factorisation of the design matrix;
``X'X`` is never formed or inverted explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    RankDeficient,
    SingularRestriction,
    ZeroVariance,
)

# Relative bound on condition numbers used for rank and singularity checks.
COND_LIMIT = 1e12

KINDS = ("UR", "R", "S", "S+", "PT")

_EPS = np.finfo(float).eps


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RegressionData:
    """Response vector and design matrix with column metadata.

    Parameters
    ----------
    y : array-like, shape (n,)
    X : array-like, shape (n, p)
    column_names : sequence of str, optional
        Defaults to ``x0 .. x{p-1}``.
    standardized : bool
        Claims every non-intercept column has mean 0 and sample sd 1.
    intercept : bool
        Whether column 0 is an intercept column of ones.
    """

    y: np.ndarray
    X: np.ndarray
    column_names: tuple = ()
    standardized: bool = False
    intercept: bool = False

    def __post_init__(self):
        y = _frozen(self.y)
        X = _frozen(self.X)
        if X.ndim == 1:
            X = _frozen(X[:, None])
        if y.ndim != 1:
            raise DimensionMismatch(f"y must be one-dimensional, got shape {y.shape}")
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise DimensionMismatch(
                f"len(y)={y.shape[0]} does not match rows(X)={X.shape[0]}"
            )
        names = tuple(self.column_names) or tuple(f"x{j}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DimensionMismatch(
                f"{len(names)} column names for {X.shape[1]} columns"
            )
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "column_names", names)
        if self.intercept and not np.all(X[:, 0] == 1.0):
            raise ValueError("intercept=True but column 0 is not all ones")
        if self.standardized:
            start = 1 if self.intercept else 0
            Z = X[:, start:]
            if Z.shape[0] > 1 and Z.shape[1]:
                means = Z.mean(axis=0)
                sds = Z.std(axis=0, ddof=1)
                if np.any(np.abs(means) > 1e-10) or np.any(np.abs(sds - 1) > 1e-10):
                    raise ValueError("standardized=True but columns are not standardized")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def subset(self, rows) -> "RegressionData":
        """Rows ``rows`` as a new data set (standardized flag dropped)."""
        return RegressionData(
            self.y[rows], self.X[rows], self.column_names, False, self.intercept
        )


@dataclass(frozen=True, eq=False)
class LinearRestriction:
    """The linear hypothesis ``H beta = h``."""

    H: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        H = _frozen(self.H)
        if H.ndim == 1:
            H = _frozen(H[None, :])
        h = _frozen(np.atleast_1d(self.h))
        if h.shape != (H.shape[0],):
            raise DimensionMismatch(f"h has shape {h.shape}, expected ({H.shape[0]},)")
        p2, p = H.shape
        if not 1 <= p2 <= p:
            raise DimensionMismatch(f"need 1 <= p2 <= p, got p2={p2}, p={p}")
        sv = np.linalg.svd(H, compute_uv=False)
        if sv[-1] <= sv[0] / COND_LIMIT:
            raise SingularRestriction("H does not have full row rank")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "h", h)

    @property
    def p2(self) -> int:
        return self.H.shape[0]

    @property
    def p(self) -> int:
        return self.H.shape[1]

    @classmethod
    def nuisance_subset(cls, p: int, p2: int) -> "LinearRestriction":
        """``H = [0 | I_p2]``, ``h = 0``: the trailing ``p2`` coefficients vanish."""
        if not 1 <= p2 <= p:
            raise DimensionMismatch(f"need 1 <= p2 <= p, got p2={p2}, p={p}")
        H = np.zeros((p2, p))
        H[:, p - p2:] = np.eye(p2)
        return cls(H, np.zeros(p2))

    def residual(self, beta) -> np.ndarray:
        return self.H @ np.asarray(beta, dtype=float) - self.h


@dataclass(frozen=True, eq=False)
class FitResult:
    """Coefficients from one estimator.

    ``s2`` is always the unrestricted residual variance ``RSS/(n-p)`` and
    ``psi`` the Wald statistic of the restriction (0 for plain OLS).
    ``degenerate`` marks a Stein fit whose statistic was zero.
    """

    beta: np.ndarray
    s2: float
    psi: float = 0.0
    kind: str = "UR"
    alpha: Optional[float] = None
    degenerate: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        object.__setattr__(self, "beta", _frozen(self.beta))

    def predict(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.beta


class LeastSquares:
    """Pivoted QR factorisation of ``X`` with the unrestricted fit.

    Shared by the restricted, Stein and pretest estimators so a data set is
    factorised once however many restrictions are tested against it.
    """

    def __init__(self, data: RegressionData):
        n, p = data.X.shape
        if n <= p:
            raise DimensionMismatch(f"need n > p, got n={n}, p={p}")
        Q, R, piv = scipy.linalg.qr(data.X, mode="economic", pivoting=True)
        d = np.abs(np.diag(R))
        if d[0] == 0.0 or d[-1] <= d[0] / COND_LIMIT:
            raise RankDeficient(f"design matrix has rank < {p}")
        self.data = data
        self._R = R
        self._piv = piv
        coef = scipy.linalg.solve_triangular(R, Q.T @ data.y)
        beta = np.empty(p)
        beta[piv] = coef
        self.beta = beta
        resid = data.y - data.X @ beta
        rss = float(resid @ resid)
        # Round-off floor: an exact interpolation reports s2 = 0.
        if rss <= (64 * _EPS) ** 2 * n * max(float(data.y @ data.y), 1e-300):
            rss = 0.0
        self.rss = rss
        self.s2 = rss / (n - p)

    def cinv(self, M) -> np.ndarray:
        """``(X'X)^{-1} M`` through two triangular solves."""
        M = np.asarray(M, dtype=float)
        vec = M.ndim == 1
        if vec:
            M = M[:, None]
        Mp = M[self._piv]
        Z = scipy.linalg.solve_triangular(self._R, Mp, trans="T")
        Z = scipy.linalg.solve_triangular(self._R, Z)
        out = np.empty_like(Z)
        out[self._piv] = Z
        return out[:, 0] if vec else out

    def fit(self) -> FitResult:
        return FitResult(self.beta, self.s2, 0.0, "UR")

    def _restriction_parts(self, r: LinearRestriction):
        if r.p != self.data.p:
            raise DimensionMismatch(f"restriction has {r.p} columns, data has {self.data.p}")
        CiHt = self.cinv(r.H.T)
        B = r.H @ CiHt
        B = (B + B.T) / 2
        if np.linalg.cond(B) > COND_LIMIT:
            raise SingularRestriction("H C^-1 H' is numerically singular")
        return CiHt, scipy.linalg.cho_factor(B), r.residual(self.beta)

    def restricted(self, r: LinearRestriction) -> FitResult:
        CiHt, Bf, d = self._restriction_parts(r)
        beta = self.beta - CiHt @ scipy.linalg.cho_solve(Bf, d)
        # Coordinate restrictions hold exactly rather than to round-off.
        sel = np.flatnonzero(np.count_nonzero(r.H, axis=1) == 1)
        if sel.size:
            cols = np.argmax(r.H[sel] != 0, axis=1)
            beta[cols] = r.h[sel] / r.H[sel, cols]
        return FitResult(beta, self.s2, 0.0, "R")

    def wald(self, r: LinearRestriction) -> float:
        """Wald statistic; ``inf`` when s2 is zero but the restriction fails."""
        _, Bf, d = self._restriction_parts(r)
        num = float(d @ scipy.linalg.cho_solve(Bf, d))
        num = max(num, 0.0)
        if self.s2 > 0:
            return num / self.s2
        scale = float(self.beta @ self.beta) + float(r.h @ r.h) + 1.0
        if num <= (64 * _EPS) ** 2 * scale:
            return 0.0
        return math.inf


def ols_fit(data: RegressionData) -> FitResult:
    """Unrestricted least squares; ``s2 = RSS / (n - p)``."""
    return LeastSquares(data).fit()


def restricted_fit(data: RegressionData, r: LinearRestriction) -> FitResult:
    """Least squares subject to ``H beta = h``.

    The reported ``s2`` and ``psi`` come from the unrestricted fit, as used by
    the test statistic.
    """
    ls = LeastSquares(data)
    fit = ls.restricted(r)
    return FitResult(fit.beta, ls.s2, ls.wald(r), "R")


def wald_statistic(data: RegressionData, r: LinearRestriction) -> float:
    """``(H b - h)' (H C^-1 H')^-1 (H b - h) / s2`` for the OLS estimate ``b``.

    Raises
    ------
    ZeroVariance
        If ``s2 == 0`` while the restriction is violated; ``err.value`` is inf.
    """
    psi = LeastSquares(data).wald(r)
    if math.isinf(psi):
        raise ZeroVariance("residual variance is zero; statistic overflows", value=psi)
    return psi

