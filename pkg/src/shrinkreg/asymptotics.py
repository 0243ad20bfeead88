"""Asymptotic bias and quadratic risk under local alternatives.

Setting: ``H beta = h + omega / sqrt(n)``, limiting design ``C``, error
variance ``sigma2``, loss weight ``W``.  With ``B = H C^-1 H'`` the test
statistic converges to a noncentral chi-square with ``p2`` degrees of freedom
and noncentrality ``omega' B^-1 omega / sigma2``.

Two formula variants are available for the shrinkage risks:

``"derived"`` (default)
    Expressions obtained from the normal limit of ``sqrt(n)(b_UR - beta)``
    using ``E[d g(psi)] = omega E[g(chi2_{p2+2})]`` and
    ``E[d'Md g(psi)] = sigma2 tr(MB) E[g(chi2_{p2+2})] + omega'M omega E[g(chi2_{p2+4})]``.
``"printed"``
    The historical displayed expressions, kept for comparison.  They use
    ``omega' B^-1 omega`` as the pretest quadratic weight, chi^-4 moments of
    ``p2+4`` degrees of freedom in the Stein risk, the factor ``p2+6``, and
    an extra ``kappa E[chi^-2]`` term in the positive-part bias.  These do
    not satisfy the dominance ordering for ``p2 > 4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.linalg

from .distributions import NoncentralChiSq, central_quantile
from .errors import DimensionMismatch, MissingAlpha, TooFewRestrictions, UnknownKind
from .tables import RmseTable

VARIANTS = ("derived", "printed")
ADB_KINDS = ("UR", "R", "S", "S+", "PT")


def _spd(name, M) -> np.ndarray:
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    if not np.allclose(M, M.T, rtol=1e-10, atol=1e-12):
        raise ValueError(f"{name} must be symmetric")
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        raise ValueError(f"{name} must be positive definite") from None
    M.setflags(write=False)
    return M


@dataclass(frozen=True, eq=False)
class LocalAlternative:
    """Drift ``omega`` of the restriction plus the limiting model quantities."""

    omega: np.ndarray
    sigma2: float
    C: np.ndarray
    H: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        C = _spd("C", self.C)
        W = _spd("W", self.W)
        H = np.atleast_2d(np.array(self.H, dtype=float))
        omega = np.atleast_1d(np.array(self.omega, dtype=float))
        p = C.shape[0]
        if W.shape != C.shape or H.shape[1] != p or omega.shape != (H.shape[0],):
            raise DimensionMismatch(
                f"incompatible shapes C{C.shape} W{W.shape} H{H.shape} omega{omega.shape}"
            )
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        H.setflags(write=False)
        omega.setflags(write=False)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "sigma2", float(self.sigma2))
        Cf = scipy.linalg.cho_factor(C)
        CiHt = scipy.linalg.cho_solve(Cf, H.T)
        B = _spd("B", (H @ CiHt + (H @ CiHt).T) / 2)
        Bf = scipy.linalg.cho_factor(B)
        Ci = scipy.linalg.cho_solve(Cf, np.eye(p))
        # Q = H C^-1 W C^-1 H' B^-1
        Q = (CiHt.T @ W @ CiHt) @ scipy.linalg.cho_solve(Bf, np.eye(B.shape[0]))
        Bi_omega = scipy.linalg.cho_solve(Bf, omega)
        object.__setattr__(self, "_CiHt", CiHt)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "_Bi_omega", Bi_omega)
        object.__setattr__(self, "_tr_WCi", float(np.trace(W @ Ci)))

    @property
    def p2(self) -> int:
        return self.H.shape[0]

    @property
    def noncentrality(self) -> float:
        """``omega' B^-1 omega / sigma2``."""
        return max(float(self.omega @ self._Bi_omega), 0.0) / self.sigma2

    def quad_Q(self) -> float:
        """``omega' B^-1 Q omega``."""
        return float(self._Bi_omega @ self.Q @ self.omega)

    def quad_B(self) -> float:
        """``omega' B^-1 omega``."""
        return float(self.omega @ self._Bi_omega)

    def restricted_bias(self) -> np.ndarray:
        """``-C^-1 H' B^-1 omega``."""
        return -self._CiHt @ self._Bi_omega

    def with_noncentrality(self, target: float, direction=None) -> "LocalAlternative":
        """Copy with ``omega`` rescaled along ``direction`` to noncentrality ``target``."""
        if target < 0:
            raise ValueError("noncentrality must be >= 0")
        if direction is None:
            direction = self.omega if np.any(self.omega) else np.eye(self.p2)[0]
        u = np.asarray(direction, dtype=float)
        norm = float(u @ scipy.linalg.solve(self.B, u, assume_a="pos"))
        if norm <= 0:
            raise ValueError("direction must be nonzero")
        omega = u * math.sqrt(target * self.sigma2 / norm)
        return LocalAlternative(omega, self.sigma2, self.C, self.H, self.W)

    @classmethod
    def nuisance_subset(cls, p1: int, p2: int, noncentrality: float = 0.0, sigma2: float = 1.0,
                        C=None, W=None) -> "LocalAlternative":
        """``H = [0 | I_p2]`` with identity ``C`` and ``W`` unless given."""
        p = p1 + p2
        H = np.hstack([np.zeros((p2, p1)), np.eye(p2)])
        C = np.eye(p) if C is None else C
        W = np.eye(p) if W is None else W
        base = cls(np.zeros(p2), sigma2, C, H, W)
        return base.with_noncentrality(noncentrality)


def _check(kind: str, alpha: Optional[float], variant: str, allowed=ADB_KINDS):
    if kind not in allowed:
        raise UnknownKind(f"unknown estimator kind {kind!r}")
    if kind == "PT" and alpha is None:
        raise MissingAlpha("the pretest estimator needs alpha")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def _require_stein(alt: LocalAlternative):
    if alt.p2 < 3:
        raise TooFewRestrictions(f"Stein-type estimators need p2 >= 3, got {alt.p2}")


class _Moments:
    """Noncentral chi-square quantities at the alternative's noncentrality."""

    def __init__(self, alt: LocalAlternative):
        self.p2 = alt.p2
        self.kappa = alt.p2 - 2
        self.delta = alt.noncentrality

    def dist(self, extra: int) -> NoncentralChiSq:
        return NoncentralChiSq(self.p2 + extra, self.delta)

    def H(self, extra: int, x: float) -> float:
        return self.dist(extra).cdf(x)

    def E(self, extra: int, j: int) -> float:
        return self.dist(extra).inverse_moment(j)

    def Eb(self, extra: int, j: int, below: bool = True) -> float:
        """Inverse moment restricted to ``chi2 <= kappa`` (or ``> kappa``)."""
        return self.dist(extra).truncated_inverse_moment(j, self.kappa, below)


def bias_factor(kind: str, alt: LocalAlternative, alpha: Optional[float] = None,
                variant: str = "derived") -> float:
    """Scalar multiplying the restricted-estimator bias ``-C^-1 H' B^-1 omega``."""
    _check(kind, alpha, variant)
    if kind == "UR":
        return 0.0
    if kind == "R":
        return 1.0
    m = _Moments(alt)
    if kind == "PT":
        return m.H(2, central_quantile(alt.p2, alpha))
    _require_stein(alt)
    k = m.kappa
    if kind == "S":
        return k * m.E(2, 1)
    if variant == "printed":
        return m.H(2, k) + k * m.E(2, 1) + m.Eb(2, 1, below=False)
    return m.H(2, k) + k * m.Eb(2, 1, below=False)


def adb(kind: str, alt: LocalAlternative, alpha: Optional[float] = None,
        variant: str = "derived") -> np.ndarray:
    """Asymptotic distributional bias vector (length ``p``)."""
    factor = bias_factor(kind, alt, alpha, variant)
    if factor == 0.0:
        return np.zeros(alt.C.shape[0])
    return factor * alt.restricted_bias()


def aqdb(kind: str, alt: LocalAlternative, alpha: Optional[float] = None,
         variant: str = "derived") -> float:
    """Quadratic bias ``ADB' (C / sigma2) ADB`` = ``Delta * factor^2``."""
    factor = bias_factor(kind, alt, alpha, variant)
    return alt.noncentrality * factor * factor


def _risk_stein(alt: LocalAlternative, m: _Moments, variant: str) -> float:
    k = m.kappa
    s2trQ = alt.sigma2 * float(np.trace(alt.Q))
    base = alt.sigma2 * alt._tr_WCi
    q = alt.quad_Q()
    if variant == "printed":
        e4 = m.E(4, 2)
        return base - k * s2trQ * (2 * e4 - k * e4) + k * (alt.p2 + 6) * q * e4
    return (base - k * s2trQ * (2 * m.E(2, 1) - k * m.E(2, 2))
            + k * (k + 4) * q * m.E(4, 2))


def _risk_positive(alt: LocalAlternative, m: _Moments, variant: str) -> float:
    k = m.kappa
    s2trQ = alt.sigma2 * float(np.trace(alt.Q))
    q = alt.quad_Q()
    rs = _risk_stein(alt, m, variant)
    if variant == "printed":
        return (rs
                + k * s2trQ * (m.Eb(2, 1) - k * m.Eb(2, 2))
                - s2trQ * m.H(2, k)
                + q * 2 * m.H(4, k)
                - k * q * (2 * m.Eb(2, 1) - 2 * m.Eb(4, 1) + k * m.Eb(4, 2)))

    # E[(1 - k/X) I(X <= k)] and E[(1 - k/X)^2 I(X <= k)] for X ~ chi2_{p2+extra}(Delta)
    def lin(extra):
        return m.H(extra, k) - k * m.Eb(extra, 1)

    def sq(extra):
        return m.H(extra, k) - 2 * k * m.Eb(extra, 1) + k * k * m.Eb(extra, 2)

    return rs - s2trQ * sq(2) + q * (2 * lin(2) - sq(4))


def adqr(kind: str, alt: LocalAlternative, alpha: Optional[float] = None,
         variant: str = "derived") -> float:
    """Asymptotic distributional quadratic risk ``tr(W Gamma)``."""
    _check(kind, alpha, variant)
    base = alt.sigma2 * alt._tr_WCi
    if kind == "UR":
        return base
    s2trQ = alt.sigma2 * float(np.trace(alt.Q))
    if kind == "R":
        return base - s2trQ + alt.quad_Q()
    m = _Moments(alt)
    if kind == "PT":
        c = central_quantile(alt.p2, alpha)
        h2, h4 = m.H(2, c), m.H(4, c)
        weight = alt.quad_B() if variant == "printed" else alt.quad_Q()
        return base - s2trQ * h2 + weight * (2 * h2 - h4)
    _require_stein(alt)
    if kind == "S":
        return _risk_stein(alt, m, variant)
    return _risk_positive(alt, m, variant)


def risk_curve(
    alt_template: LocalAlternative,
    kinds: Sequence[str],
    delta_grid: Iterable[float],
    alpha: Optional[float] = 0.05,
    variant: str = "derived",
) -> RmseTable:
    """Theoretical ``R(UR) / R(kind)`` over a grid of noncentralities.

    ``omega`` keeps the template's direction (first coordinate when the
    template drift is zero) and is rescaled to each grid value.
    """
    grid = np.asarray(list(delta_grid), dtype=float)
    if np.any(grid < 0):
        raise ValueError("noncentrality grid values must be >= 0")
    direction = alt_template.omega if np.any(alt_template.omega) else None
    cols = {kind: np.empty(grid.size) for kind in kinds}
    for i, t in enumerate(grid):
        alt = alt_template.with_noncentrality(t, direction)
        r_ur = adqr("UR", alt)
        for kind in kinds:
            cols[kind][i] = r_ur / adqr(kind, alt, alpha, variant)
    return RmseTable(grid, cols, delta_label="noncentrality",
                     meta={"alpha": alpha, "variant": variant, "p2": alt_template.p2})
