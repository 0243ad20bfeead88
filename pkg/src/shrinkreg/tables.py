"""Relative-MSE tables shared by the simulation and asymptotic modules."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np


@dataclass(eq=False)
class RmseTable:
    """Rows of ``MSE(UR) / MSE(kind)`` indexed by a distance grid.

    ``delta_label`` is ``"delta"`` for the Euclidean distance used in
    simulations and ``"noncentrality"`` for theoretical curves.
    """

    delta: np.ndarray
    columns: Dict[str, np.ndarray]
    replications: Optional[int] = None
    seed: Optional[int] = None
    delta_label: str = "delta"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.delta = np.asarray(self.delta, dtype=float)
        self.columns = {k: np.asarray(v, dtype=float) for k, v in self.columns.items()}
        for k, v in self.columns.items():
            if v.shape != self.delta.shape:
                raise ValueError(f"column {k!r} has {v.size} rows, grid has {self.delta.size}")

    def __getitem__(self, kind: str) -> np.ndarray:
        return self.columns[kind]

    def rows(self):
        kinds = list(self.columns)
        for i, d in enumerate(self.delta):
            yield {self.delta_label: float(d), **{k: float(self.columns[k][i]) for k in kinds}}

    def equals(self, other: "RmseTable") -> bool:
        """Bit-for-bit equality of grid and every column."""
        return (
            np.array_equal(self.delta, other.delta)
            and self.columns.keys() == other.columns.keys()
            and all(np.array_equal(self.columns[k], other.columns[k]) for k in self.columns)
            and self.replications == other.replications
            and self.seed == other.seed
        )

    def to_dict(self) -> dict:
        return {
            "delta_label": self.delta_label,
            "replications": self.replications,
            "seed": self.seed,
            "meta": self.meta,
            "rows": list(self.rows()),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RmseTable":
        label = d.get("delta_label", "delta")
        rows = d["rows"]
        kinds = [k for k in (rows[0] if rows else {}) if k != label]
        return cls(
            np.array([r[label] for r in rows], dtype=float),
            {k: np.array([r[k] for r in rows], dtype=float) for k in kinds},
            d.get("replications"),
            d.get("seed"),
            label,
            d.get("meta", {}),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        kinds = list(self.columns)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.delta_label, *kinds])
        for row in self.rows():
            w.writerow([repr(row[self.delta_label]), *(repr(row[k]) for k in kinds)])
        return buf.getvalue()

    def format(self, digits: int = 2) -> str:
        kinds = list(self.columns)
        head = f"{self.delta_label:>13}" + "".join(f"{k:>9}" for k in kinds)
        lines = [head, "-" * len(head)]
        for row in self.rows():
            lines.append(
                f"{row[self.delta_label]:>13.{digits}f}"
                + "".join(f"{row[k]:>9.{digits}f}" for k in kinds)
            )
        return "\n".join(lines)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True)
