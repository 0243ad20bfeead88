"""Monte Carlo relative-MSE experiment for the shrinkage estimators.

Covariates follow a skewed, correlated scheme sharing one standard normal
term per row; responses are ``X beta + N(0, 1)`` with no intercept.  The
nuisance block ``beta_2`` is moved away from zero along its first
coordinate by a Euclidean distance ``delta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ._parallel import chunks, ordered_map
from .errors import RankDeficient, ReplicationFailure, SingularRestriction, TooFewRestrictions
from .estimators import ShrinkageContext, estimate
from .regression import LeastSquares, LinearRestriction, RegressionData
from .tables import RmseTable

# 20 equally spaced points on [0, 1], rounded to two decimals.
DEFAULT_GRID = (0.00, 0.05, 0.11, 0.16, 0.21, 0.26, 0.32, 0.37, 0.42, 0.47,
              0.53, 0.58, 0.63, 0.68, 0.74, 0.79, 0.84, 0.89, 0.95, 1.00)

BERNOULLI_P = 0.45
_CHUNK = 100


@dataclass(frozen=True)
class SimConfig:
    n: int = 50
    p1: int = 4
    p2: int = 6
    beta1: Optional[Tuple[float, ...]] = None
    delta_grid: Tuple[float, ...] = DEFAULT_GRID
    replications: int = 2000
    alpha: float = 0.05
    seed: int = 0
    kinds: Tuple[str, ...] = ("R", "S+", "PT")
    # "full": squared error over every coefficient; "main": beta_1 block only.
    loss_block: str = "full"
    threads: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "delta_grid", tuple(float(d) for d in self.delta_grid))
        object.__setattr__(self, "kinds", tuple(self.kinds))
        if self.beta1 is None:
            object.__setattr__(self, "beta1", (1.0,) * self.p1)
        else:
            object.__setattr__(self, "beta1", tuple(float(b) for b in self.beta1))
        if len(self.beta1) != self.p1:
            raise ValueError(f"beta1 has {len(self.beta1)} entries, p1={self.p1}")
        if self.p1 < 0 or self.p2 < 1:
            raise ValueError("need p1 >= 0 and p2 >= 1")
        if self.p < 3:
            raise ValueError("the covariate scheme needs p1 + p2 >= 3")
        if self.n <= self.p:
            raise ValueError(f"need n > p1 + p2, got n={self.n}, p={self.p}")
        if any(d < 0 for d in self.delta_grid):
            raise ValueError("delta values must be >= 0")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.p2 < 3 and {"S", "S+"} & set(self.kinds):
            raise TooFewRestrictions(f"Stein-type estimators need p2 >= 3, got {self.p2}")
        if self.loss_block not in ("full", "main"):
            raise ValueError(f"loss_block must be 'full' or 'main', got {self.loss_block!r}")

    @property
    def p(self) -> int:
        return self.p1 + self.p2


def generate_design(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    """``n x p`` covariates.

    Column ``s`` is ``z_s^2 + z`` with a row-wide normal ``z``; the first two
    columns add ``b_1`` and ``2 b_2`` with ``b ~ Bernoulli(0.45)``.
    """
    if p < 3:
        raise ValueError(f"need p >= 3, got {p}")
    common = rng.standard_normal(n)
    X = rng.standard_normal((n, p)) ** 2 + common[:, None]
    X[:, 0] += rng.binomial(1, BERNOULLI_P, n)
    X[:, 1] += 2 * rng.binomial(1, BERNOULLI_P, n)
    return X


def beta_for_delta(cfg: SimConfig, delta: float) -> np.ndarray:
    """``(beta_1, delta * e_1)``, at Euclidean distance ``delta`` from ``(beta_1, 0)``."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    beta = np.zeros(cfg.p)
    beta[: cfg.p1] = cfg.beta1
    beta[cfg.p1] = delta
    return beta


def _stream(seed: int, delta_index: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, delta_index, rep]))


def _draw(cfg: SimConfig, beta: np.ndarray, rng: np.random.Generator) -> RegressionData:
    X = generate_design(cfg.n, cfg.p, rng)
    y = X @ beta + rng.standard_normal(cfg.n)
    return RegressionData(y, X)


def _replication(cfg, restriction, beta, delta_index, rep):
    """Squared errors of UR followed by ``cfg.kinds``; also the number of redraws."""
    rng = _stream(cfg.seed, delta_index, rep)
    block = slice(0, cfg.p1) if cfg.loss_block == "main" else slice(None)
    rejected = 0
    while True:
        data = _draw(cfg, beta, rng)
        try:
            ctx = ShrinkageContext.from_data(data, restriction, LeastSquares(data))
            break
        except (RankDeficient, SingularRestriction):
            rejected += 1
            if rejected > max(1, cfg.replications // 100):
                raise ReplicationFailure(f"replication {rep} kept drawing singular designs")
    out = [ctx.unrestricted.beta] + [estimate(k, ctx, cfg.alpha).beta for k in cfg.kinds]
    err = np.array([np.sum((b[block] - beta[block]) ** 2) for b in out])
    return err, rejected


def replication_errors(cfg: SimConfig, delta_index: int) -> np.ndarray:
    """``(replications, 1 + len(kinds))`` squared errors at one grid point."""
    beta = beta_for_delta(cfg, cfg.delta_grid[delta_index])
    restriction = LinearRestriction.nuisance_subset(cfg.p, cfg.p2)

    def run(reps):
        return [_replication(cfg, restriction, beta, delta_index, r) for r in reps]

    parts = ordered_map(run, chunks(cfg.replications, _CHUNK), cfg.threads)
    results = [res for part in parts for res in part]
    rejected = sum(r for _, r in results)
    if rejected > cfg.replications // 100:
        raise ReplicationFailure(
            f"{rejected} of {cfg.replications} designs rejected at delta index {delta_index}"
        )
    return np.array([e for e, _ in results])


def rmse_sweep(cfg: SimConfig) -> RmseTable:
    """Relative MSE ``MSE(UR) / MSE(kind)`` for each delta on the grid."""
    if list(cfg.delta_grid) != sorted(set(cfg.delta_grid)):
        raise ValueError("delta grid must be strictly increasing")
    cols = {k: np.empty(len(cfg.delta_grid)) for k in cfg.kinds}
    for i in range(len(cfg.delta_grid)):
        mse = replication_errors(cfg, i).sum(axis=0)
        for j, k in enumerate(cfg.kinds, start=1):
            cols[k][i] = mse[0] / mse[j]
    meta = {"n": cfg.n, "p1": cfg.p1, "p2": cfg.p2, "alpha": cfg.alpha,
            "loss_block": cfg.loss_block}
    return RmseTable(np.array(cfg.delta_grid), cols, cfg.replications, cfg.seed, "delta", meta)


def null_statistics(n: int, p1: int, p2: int, replications: int, seed: int = 0,
                    threads: Optional[int] = None) -> np.ndarray:
    """Wald statistics for ``beta_2 = 0`` on data generated with ``beta_2 = 0``."""
    cfg = SimConfig(n=n, p1=p1, p2=p2, delta_grid=(0.0,), replications=replications,
                    seed=seed, kinds=(), threads=threads)
    beta = beta_for_delta(cfg, 0.0)
    restriction = LinearRestriction.nuisance_subset(cfg.p, p2)

    def run(reps):
        out = []
        for r in reps:
            rng = _stream(seed, 0, r)
            out.append(LeastSquares(_draw(cfg, beta, rng)).wald(restriction))
        return out

    parts = ordered_map(run, chunks(replications, _CHUNK), threads)
    return np.array([v for part in parts for v in part])
