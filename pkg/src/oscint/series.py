"""Per-step energy records and their CSV/JSON serialization."""
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["FORMAT_TAG", "COLUMNS", "EnergySeries", "read_csv"]

FORMAT_TAG = "oscint-series v1"
COLUMNS = (
    "step",
    "t",
    "H",
    "Hmod",
    "drift_H",
    "drift_mod",
    "q_norm",
    "omega_q_norm",
    "qdot_norm",
)
T_RTOL = 1e-12


def _fmt(x):
    return format(float(x), ".17g")


@dataclass
class EnergySeries:
    """Energies and norms recorded along one trajectory.

    ``scale`` (not serialized) is the sum of magnitudes of the terms of the
    modified energy at each row; it is the natural yardstick for roundoff.
    ``max_step_defect`` is the largest |Hmod_{n+1} - Hmod_n| over *all* steps,
    not only recorded ones, and ``max_rel_step_defect`` the same divided by
    the local scale.
    """

    h: float
    step: np.ndarray
    H: np.ndarray
    Hmod: np.ndarray
    q_norm: np.ndarray
    omega_q_norm: np.ndarray
    qdot_norm: np.ndarray
    scale: Optional[np.ndarray] = None
    max_step_defect: float = 0.0
    max_rel_step_defect: float = 0.0
    states_q: Optional[np.ndarray] = field(default=None, repr=False)
    states_qdot: Optional[np.ndarray] = field(default=None, repr=False)

    def __len__(self):
        return len(self.step)

    @property
    def t(self):
        return self.step * self.h

    @property
    def drift_H(self):
        return self.H - self.H[0] if len(self) else self.H.copy()

    @property
    def drift_mod(self):
        return self.Hmod - self.Hmod[0] if len(self) else self.Hmod.copy()

    @classmethod
    def empty(cls, h):
        z = np.zeros(0)
        return cls(h, np.zeros(0, dtype=np.int64), z, z, z, z, z, z)

    def column(self, name):
        return np.asarray(getattr(self, name))

    def max_abs_drift(self, which="H"):
        d = self.drift_H if which == "H" else self.drift_mod
        return float(np.max(np.abs(d))) if len(d) else 0.0

    def validate(self):
        step = np.asarray(self.step)
        if np.any(np.diff(step) <= 0):
            raise ValueError("step indices are not strictly increasing")
        t = self.t
        expected = step * self.h
        if np.any(np.abs(t - expected) > T_RTOL * np.maximum(np.abs(expected), 1.0)):
            raise ValueError("time column disagrees with n*h")

    def to_csv(self, fh):
        self.validate()
        fh.write(f"# {FORMAT_TAG}\n")
        fh.write(",".join(COLUMNS) + "\n")
        cols = [self.column(c) for c in COLUMNS]
        for i in range(len(self)):
            fh.write(
                str(int(cols[0][i]))
                + ","
                + ",".join(_fmt(c[i]) for c in cols[1:])
                + "\n"
            )

    def to_dict(self):
        self.validate()
        return {
            "format": FORMAT_TAG,
            "h": self.h,
            "max_step_defect": self.max_step_defect,
            "columns": {
                c: [int(x) for x in self.step]
                if c == "step"
                else [float(x) for x in self.column(c)]
                for c in COLUMNS
            },
        }

    def to_json(self, fh):
        json.dump(self.to_dict(), fh)
        fh.write("\n")


def read_csv(fh, h):
    """Read a series written by :meth:`EnergySeries.to_csv`."""
    first = fh.readline().strip()
    if first != f"# {FORMAT_TAG}":
        raise ValueError(f"not an {FORMAT_TAG} file (header {first!r})")
    header = fh.readline().strip().split(",")
    if tuple(header) != COLUMNS:
        raise ValueError(f"unexpected columns {header}")
    rows = [line.split(",") for line in fh if line.strip()]
    data = np.array(rows, dtype=np.float64).reshape(-1, len(COLUMNS))
    ix = {c: i for i, c in enumerate(COLUMNS)}
    return EnergySeries(
        h,
        data[:, ix["step"]].astype(np.int64),
        data[:, ix["H"]],
        data[:, ix["Hmod"]],
        data[:, ix["q_norm"]],
        data[:, ix["omega_q_norm"]],
        data[:, ix["qdot_norm"]],
    )
