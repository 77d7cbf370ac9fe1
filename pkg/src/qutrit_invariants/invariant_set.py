"""The value bundle (I6, I9, I12, Delta333) shared by both evaluation paths."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

__all__ = ["InvariantSet", "hyperdet_from_fundamentals"]


def hyperdet_from_fundamentals(I6, I9, I12):
    """Degree-36 hyperdeterminant as a polynomial in the fundamental invariants.

    Works elementwise on scalars or arrays, real or complex.
    """
    return (
        I6**3 * I9**2
        - I6**2 * I12**2
        + 36 * I6 * I9**2 * I12
        + 108 * I9**4
        - 32 * I12**3
    )


def _as_pair(z) -> list[float] | None:
    if z is None:
        return None
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class InvariantSet:
    I6: complex
    I9: complex
    I12: complex
    Delta333: complex
    g6: Optional[complex] = None
    g9: Optional[complex] = None
    g12: Optional[complex] = None

    @classmethod
    def from_fundamentals(cls, I6, I9, I12, **raw) -> "InvariantSet":
        return cls(I6, I9, I12, hyperdet_from_fundamentals(I6, I9, I12), **raw)

    def magnitudes(self) -> dict[str, float]:
        return {
            "I6": abs(self.I6),
            "I9": abs(self.I9),
            "I12": abs(self.I12),
            "Delta333": abs(self.Delta333),
        }

    def as_array(self) -> np.ndarray:
        return np.array([self.I6, self.I9, self.I12, self.Delta333], dtype=complex)

    def to_dict(self) -> dict:
        return {f.name: _as_pair(getattr(self, f.name)) for f in fields(self)}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "InvariantSet":
        kwargs = {}
        for f in fields(cls):
            v = data.get(f.name)
            kwargs[f.name] = None if v is None else complex(v[0], v[1])
        return cls(**kwargs)

    def csv_header(self) -> list[str]:
        return [f"{f.name}_{part}" for f in fields(self) for part in ("re", "im")]

    def csv_row(self) -> list[str]:
        row = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                row += ["", ""]
            else:
                v = complex(v)
                row += [f"{v.real:.17g}", f"{v.imag:.17g}"]
        return row

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_header())
        w.writerow(self.csv_row())
        return buf.getvalue()
