"""CSV ingestion, standardisation and the bundled example data sets."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ChecksumMismatch, EmptyFile, MissingColumn, NonNumericCell, ZeroVariance
from .regression import LinearRestriction, RegressionData

INTERCEPT = "(Intercept)"


@dataclass(frozen=True)
class BundledDataset:
    filename: str
    sha256: str
    response: str
    covariates: Tuple[str, ...]


BUNDLED: Dict[str, BundledDataset] = {
    "prostate": BundledDataset(
        "prostate.csv",
        "789dc86fd42def449393526c634a017102493486e5abc7037af32246b4cb034d",
        "lpsa",
        ("lcavol", "lweight", "svi", "lbph", "age", "lcp", "gleason", "pgg45"),
    ),
    "state": BundledDataset(
        "state.csv",
        "2525368231841f773a04f6b7861a11378f1a8013b2274d99d4bd429ef97ef80a",
        "Life.Exp",
        ("Population", "Murder", "HS.Grad", "Frost", "Income", "Illiteracy", "Area"),
    ),
    # Ships without the Endemics column; see data/PROVENANCE.md.
    "galapagos": BundledDataset(
        "galapagos.csv",
        "2cc528dc16624b98fe1a0adb85359e56405c7601dc16664d4db014e33734dbf7",
        "Species",
        ("Area", "Elevation", "Nearest", "Scruz", "Adjacent"),
    ),
}


def bundled_path(name: str) -> Path:
    """Path of a bundled CSV after verifying its checksum."""
    info = BUNDLED[name]
    path = Path(str(resources.files("shrinkreg").joinpath("data", info.filename)))
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    if digest != info.sha256:
        raise ChecksumMismatch(f"{info.filename}: sha256 {digest} != {info.sha256}")
    return path


def resolve(source: str) -> Path:
    """A bundled data set name or a filesystem path."""
    if source in BUNDLED:
        return bundled_path(source)
    return Path(source)


def read_columns(path) -> Tuple[List[str], Dict[str, List[str]]]:
    """Header and raw string columns of a comma-separated UTF-8 file."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header:
            raise EmptyFile(f"{path}: no header row")
        header = [h.strip() for h in header]
        cols: Dict[str, List[str]] = {h: [] for h in header}
        for row in reader:
            if not row:
                continue
            for h, v in zip(header, row):
                cols[h].append(v.strip())
    if not cols[header[0]]:
        raise EmptyFile(f"{path}: no data rows")
    return header, cols


def _numeric(cols: Dict[str, List[str]], name: str) -> np.ndarray:
    if name not in cols:
        raise MissingColumn(f"column {name!r} not found; available: {', '.join(cols)}")
    out = np.empty(len(cols[name]))
    for i, v in enumerate(cols[name]):
        try:
            out[i] = float(v)
        except ValueError:
            raise NonNumericCell(i + 1, name, v) from None
        if not math.isfinite(out[i]):
            raise NonNumericCell(i + 1, name, v)
    return out


def load_csv(
    path,
    response: str,
    covariates: Sequence[str],
    sub: Optional[Sequence[str]] = None,
    intercept: bool = True,
) -> RegressionData:
    """Read ``response`` and ``covariates`` into a :class:`RegressionData`.

    Columns are ordered intercept, then the ``sub`` covariates, then the
    remaining (nuisance) covariates, so restricting the nuisance block is
    always a trailing-block restriction.

    Rows are numbered from 1 after the header in error messages.
    """
    covariates = list(covariates)
    if response in covariates:
        raise ValueError(f"response {response!r} is also listed as a covariate")
    if len(set(covariates)) != len(covariates):
        raise ValueError("duplicate covariates")
    if sub is not None:
        extra = [c for c in sub if c not in covariates]
        if extra:
            raise ValueError(f"sub-model columns not in the full model: {extra}")
        ordered = list(sub) + [c for c in covariates if c not in sub]
    else:
        ordered = covariates
    _, cols = read_columns(path)
    y = _numeric(cols, response)
    Xcols = [_numeric(cols, c) for c in ordered]
    names = list(ordered)
    if intercept:
        Xcols.insert(0, np.ones_like(y))
        names.insert(0, INTERCEPT)
    X = np.column_stack(Xcols) if Xcols else np.empty((y.size, 0))
    return RegressionData(y, X, tuple(names), False, intercept)


def standardize(data: RegressionData) -> RegressionData:
    """Centre every non-intercept column and scale it to unit sd (divisor n-1)."""
    X = np.array(data.X)
    start = 1 if data.intercept else 0
    for j in range(start, data.p):
        col = X[:, j]
        sd = col.std(ddof=1)
        if not sd > 0:
            raise ZeroVariance(f"column {data.column_names[j]!r} has zero variance")
        X[:, j] = (col - col.mean()) / sd
    return RegressionData(data.y, X, data.column_names, True, data.intercept)


@dataclass(frozen=True)
class AnalysisSpec:
    """One full model and a set of candidate sub-models for it."""

    data: str
    response: Optional[str] = None
    full: Optional[Tuple[str, ...]] = None
    subs: Tuple[Tuple[str, ...], ...] = ()
    sub_labels: Optional[Tuple[str, ...]] = None
    estimators: Tuple[str, ...] = ("UR", "R", "S+", "PT")
    standardize: bool = True

    def __post_init__(self):
        info = BUNDLED.get(self.data)
        if self.response is None:
            if info is None:
                raise ValueError("--response is required for a CSV file")
            object.__setattr__(self, "response", info.response)
        if self.full is None:
            if info is None or self.response != info.response:
                raise ValueError("--full is required unless using a bundled data set's defaults")
            object.__setattr__(self, "full", info.covariates)
        object.__setattr__(self, "full", tuple(self.full))
        object.__setattr__(self, "subs", tuple(tuple(s) for s in self.subs))
        if self.response in self.full:
            raise ValueError(f"response {self.response!r} is among the covariates")
        for s in self.subs:
            missing = [c for c in s if c not in self.full]
            if missing:
                raise ValueError(f"sub-model columns not in the full model: {missing}")
            if len(s) == len(self.full):
                raise ValueError("a sub-model must drop at least one covariate")
        labels = self.sub_labels or tuple(
            "+".join(s) if len(self.subs) > 1 else "sub" for s in self.subs
        )
        if len(labels) != len(self.subs):
            raise ValueError("one label per sub-model is required")
        object.__setattr__(self, "sub_labels", tuple(labels))

    def load(self) -> RegressionData:
        """The full-model data; a single sub-model's columns are placed first."""
        sub = self.subs[0] if len(self.subs) == 1 else None
        data = load_csv(resolve(self.data), self.response, self.full, sub)
        return standardize(data) if self.standardize else data


def nuisance_restriction(data: RegressionData, sub: Sequence[str]) -> LinearRestriction:
    """``beta_j = 0`` for every non-intercept column of ``data`` not in ``sub``.

    With the sub-model block placed first this is ``H = [0 | I]``, ``h = 0``.
    """
    keep = set(sub)
    missing = keep.difference(data.column_names)
    if missing:
        raise MissingColumn(f"sub-model columns not in the data: {sorted(missing)}")
    idx = [j for j, name in enumerate(data.column_names)
           if name not in keep and not (data.intercept and j == 0)]
    if not idx:
        raise ValueError("the sub-model keeps every covariate")
    H = np.zeros((len(idx), data.p))
    H[np.arange(len(idx)), idx] = 1.0
    return LinearRestriction(H, np.zeros(len(idx)))
