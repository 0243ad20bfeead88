"""Stein-type, positive-part Stein and pretest estimators.

Each combines the unrestricted and restricted fits of the same data through
the Wald statistic ``psi``; the shrinkage constant is ``kappa = p2 - 2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .distributions import central_quantile
from .errors import DegenerateStatistic, InvalidLevel, TooFewRestrictions
from .regression import FitResult, LeastSquares, LinearRestriction, RegressionData


@dataclass(frozen=True)
class ShrinkageContext:
    unrestricted: FitResult
    restricted: FitResult
    psi: float
    p2: int

    @property
    def kappa(self) -> int:
        return self.p2 - 2

    @classmethod
    def from_data(
        cls,
        data: RegressionData,
        restriction: LinearRestriction,
        ls: Optional[LeastSquares] = None,
    ) -> "ShrinkageContext":
        """Fit both models; pass ``ls`` to reuse an existing factorisation."""
        ls = ls if ls is not None else LeastSquares(data)
        psi = ls.wald(restriction)
        ur = FitResult(ls.beta, ls.s2, psi, "UR")
        r = FitResult(ls.restricted(restriction).beta, ls.s2, psi, "R")
        return cls(ur, r, psi, restriction.p2)


def _require_stein(ctx: ShrinkageContext):
    if ctx.p2 < 3:
        raise TooFewRestrictions(f"Stein-type estimators need p2 >= 3, got {ctx.p2}")


def _combine(ctx: ShrinkageContext, weight: float, kind: str, **extra) -> FitResult:
    r, ur = ctx.restricted.beta, ctx.unrestricted.beta
    return FitResult(r + (ur - r) * weight, ctx.unrestricted.s2, ctx.psi, kind, **extra)


def stein_factor(psi: float, kappa: float) -> float:
    if math.isinf(psi):
        return 1.0
    return 1.0 - kappa / psi


def stein_estimate(ctx: ShrinkageContext) -> FitResult:
    """``b_R + (b_UR - b_R)(1 - kappa/psi)``.

    A zero statistic returns the restricted fit flagged ``degenerate``
    and emits :class:`DegenerateStatistic`.
    """
    _require_stein(ctx)
    if ctx.psi == 0:
        warnings.warn("psi = 0; returning the restricted estimate", DegenerateStatistic, stacklevel=2)
        return FitResult(ctx.restricted.beta, ctx.unrestricted.s2, 0.0, "S", degenerate=True)
    return _combine(ctx, stein_factor(ctx.psi, ctx.kappa), "S")


def positive_stein_estimate(ctx: ShrinkageContext) -> FitResult:
    """Stein estimate with the shrink factor clipped to ``max(0, 1 - kappa/psi)``."""
    _require_stein(ctx)
    weight = 0.0 if ctx.psi <= ctx.kappa else stein_factor(ctx.psi, ctx.kappa)
    return _combine(ctx, weight, "S+")


def pretest_estimate(ctx: ShrinkageContext, alpha: float) -> FitResult:
    """Restricted fit if ``psi`` is below the upper-``alpha`` chi-square(p2)
    critical value, unrestricted otherwise (ties keep the unrestricted fit)."""
    if not 0.0 < alpha < 1.0:
        raise InvalidLevel(f"alpha must lie in (0, 1), got {alpha}")
    crit = central_quantile(ctx.p2, alpha)
    src = ctx.restricted if ctx.psi < crit else ctx.unrestricted
    return FitResult(src.beta, ctx.unrestricted.s2, ctx.psi, "PT", alpha=alpha)


def estimate(kind: str, ctx: ShrinkageContext, alpha: Optional[float] = None) -> FitResult:
    """Dispatch on the estimator tag ``UR | R | S | S+ | PT``."""
    if kind == "UR":
        return ctx.unrestricted
    if kind == "R":
        return ctx.restricted
    if kind == "S":
        return stein_estimate(ctx)
    if kind == "S+":
        return positive_stein_estimate(ctx)
    if kind == "PT":
        if alpha is None:
            raise InvalidLevel("the pretest estimator needs alpha")
        return pretest_estimate(ctx, alpha)
    raise ValueError(f"unknown estimator kind {kind!r}")
