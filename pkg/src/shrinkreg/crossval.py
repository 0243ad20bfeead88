"""Repeated K-fold cross-validation of prediction error.

Every estimator is refitted on each training complement (the test statistic,
residual variance and pretest critical value included) and scored by mean
squared prediction error on the held-out fold.  Alongside the raw estimate
an adjusted estimate is reported,

    corrected = raw + err(full fit on all data)
                    - sum_k (n_k / n) * err(fold-k fit on all data),

which removes most of the upward bias of K-fold relative to leave-one-out.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._parallel import chunks, ordered_map
from .errors import FoldTooSmall, InvalidLevel
from .estimators import ShrinkageContext, estimate
from .regression import KINDS, LeastSquares, LinearRestriction, RegressionData

_CHUNK = 50


@dataclass(frozen=True, eq=False)
class EstimatorSpec:
    """One estimator to assess; ``restriction`` is ignored for ``UR``."""

    kind: str
    restriction: Optional[LinearRestriction] = None
    label: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        if self.kind != "UR" and self.restriction is None:
            raise ValueError(f"estimator {self.kind} needs a restriction")
        if self.label is None:
            object.__setattr__(self, "label", self.kind)


@dataclass(frozen=True)
class CvConfig:
    k: int = 10
    repetitions: int = 5000
    alpha: float = 0.05
    seed: int = 0
    estimators: Tuple[EstimatorSpec, ...] = (EstimatorSpec("UR"),)
    threads: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if self.k < 2:
            raise ValueError(f"need at least 2 folds, got {self.k}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidLevel(f"alpha must lie in (0, 1), got {self.alpha}")
        labels = [e.label for e in self.estimators]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate estimator labels: {labels}")


@dataclass(frozen=True)
class Summary:
    """Mean over repetitions, its standard error, and the spread across repetitions."""

    mean: float
    se: float
    sd: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "se": self.se, "sd": self.sd}

    @classmethod
    def of(cls, values: np.ndarray) -> "Summary":
        r = values.size
        mean = float(np.mean(values))
        sd = float(np.std(values, ddof=1)) if r > 1 else 0.0
        return cls(mean, sd / math.sqrt(r), sd)


@dataclass(frozen=True)
class CvEntry:
    estimator: str
    raw: Summary
    corrected: Summary


@dataclass(frozen=True)
class CvReport:
    entries: Tuple[CvEntry, ...]
    k: int
    repetitions: int
    seed: int

    def __getitem__(self, label: str) -> CvEntry:
        for e in self.entries:
            if e.estimator == label:
                return e
        raise KeyError(label)

    @property
    def labels(self) -> List[str]:
        return [e.estimator for e in self.entries]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "repetitions": self.repetitions,
            "seed": self.seed,
            "results": [
                {"estimator": e.estimator, "k": self.k,
                 "raw": e.raw.to_dict(), "corrected": e.corrected.to_dict()}
                for e in self.entries
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CvReport":
        entries = tuple(
            CvEntry(r["estimator"], Summary(**r["raw"]), Summary(**r["corrected"]))
            for r in d["results"]
        )
        return cls(entries, d["k"], d["repetitions"], d["seed"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "CvReport":
        return cls.from_dict(json.loads(text))


def fold_assignment(n: int, k: int, seed: int, rep_index: int) -> List[np.ndarray]:
    """Random permutation cut into ``k`` contiguous blocks.

    The first ``n mod k`` blocks hold ``ceil(n/k)`` indices, the rest
    ``floor(n/k)``.  The permutation stream depends only on ``(seed, rep_index)``.
    """
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, rep_index]))
    return np.array_split(rng.permutation(n), k)


def _fit_all(data: RegressionData, specs: Sequence[EstimatorSpec], alpha: float) -> List[np.ndarray]:
    """Coefficients of every estimator on ``data`` sharing one factorisation."""
    ls = LeastSquares(data)
    contexts: Dict[int, ShrinkageContext] = {}
    betas = []
    for spec in specs:
        if spec.kind == "UR":
            betas.append(ls.beta)
            continue
        key = id(spec.restriction)
        if key not in contexts:
            contexts[key] = ShrinkageContext.from_data(data, spec.restriction, ls)
        betas.append(estimate(spec.kind, contexts[key], alpha).beta)
    return betas


def apparent_errors(data: RegressionData, cfg: CvConfig) -> np.ndarray:
    """In-sample mean squared error of each estimator fitted to all of ``data``."""
    betas = _fit_all(data, cfg.estimators, cfg.alpha)
    return np.array([np.mean((data.y - data.X @ b) ** 2) for b in betas])


def _kfold(data: RegressionData, cfg: CvConfig, rep_index: int, apparent: np.ndarray) -> np.ndarray:
    n = data.n
    folds = fold_assignment(n, cfg.k, cfg.seed, rep_index)
    raw = np.zeros(len(cfg.estimators))
    full = np.zeros(len(cfg.estimators))
    for test in folds:
        train = np.setdiff1d(np.arange(n), test, assume_unique=True)
        if train.size <= data.p:
            raise FoldTooSmall(
                f"training set of {train.size} rows cannot fit {data.p} coefficients"
            )
        betas = _fit_all(data.subset(train), cfg.estimators, cfg.alpha)
        w = test.size / n
        for i, b in enumerate(betas):
            raw[i] += w * np.mean((data.y[test] - data.X[test] @ b) ** 2)
            full[i] += w * np.mean((data.y - data.X @ b) ** 2)
    return np.stack([raw, raw + apparent - full], axis=1)


def kfold_once(data: RegressionData, cfg: CvConfig, rep_index: int) -> Dict[str, Tuple[float, float]]:
    """``{label: (raw, corrected)}`` for one random split into ``cfg.k`` folds."""
    out = _kfold(data, cfg, rep_index, apparent_errors(data, cfg))
    return {spec.label: (float(r), float(c)) for spec, (r, c) in zip(cfg.estimators, out)}


def repetition_values(data: RegressionData, cfg: CvConfig) -> np.ndarray:
    """``(repetitions, n_estimators, 2)`` raw and corrected errors."""
    if not 2 <= cfg.k <= data.n:
        raise ValueError(f"need 2 <= k <= n, got k={cfg.k}, n={data.n}")
    apparent = apparent_errors(data, cfg)

    def run(reps):
        return [_kfold(data, cfg, r, apparent) for r in reps]

    parts = ordered_map(run, chunks(cfg.repetitions, _CHUNK), cfg.threads)
    return np.array([v for part in parts for v in part])


def repeated_cv(data: RegressionData, cfg: CvConfig) -> CvReport:
    """Mean and standard error of raw and corrected CV error over repetitions."""
    vals = repetition_values(data, cfg)
    entries = tuple(
        CvEntry(spec.label, Summary.of(vals[:, i, 0]), Summary.of(vals[:, i, 1]))
        for i, spec in enumerate(cfg.estimators)
    )
    return CvReport(entries, cfg.k, cfg.repetitions, cfg.seed)
