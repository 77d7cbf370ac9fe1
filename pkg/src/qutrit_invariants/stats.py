"""Monte Carlo statistics of the invariants over random real semi-simple states."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import closed_form as cf
from .optimize import objective

__all__ = [
    "CHUNK_SIZE",
    "SAMPLE_COLUMNS",
    "SampleTable",
    "Histogram",
    "SphereGrid",
    "sample_coefficients",
    "sample_and_evaluate",
    "histogram",
    "histogram_auto",
    "last_bin_fraction",
    "sorted_curve",
    "sphere_grid",
    "write_csv",
]

CHUNK_SIZE = 65536
SAMPLE_COLUMNS = ("a", "b", "c", "absI6", "absI9", "absI12", "absDelta", "S_I")
_COLUMN_OF_TAG = {"I6": "absI6", "I9": "absI9", "I12": "absI12", "Delta333": "absDelta", "S_I": "S_I"}


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def write_csv(header: Sequence[str], rows: Iterable[Sequence], out=None) -> str | None:
    """Write rows with floats at 17 significant digits; returns the text when ``out`` is None."""
    buf = io.StringIO() if out is None else out
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue() if out is None else None


# -- sampling -----------------------------------------------------------------

def _chunk_coefficients(seed: int, chunk: int, n: int) -> np.ndarray:
    # per-chunk stream: the chunk index is mixed into the master seed
    rng = np.random.default_rng([seed, chunk])
    out = np.empty((0, 3))
    while len(out) < n:
        x = rng.uniform(-1.0, 1.0, size=(n - len(out), 3))
        norms = np.linalg.norm(x, axis=1)
        keep = norms > 0.0
        out = np.vstack([out, x[keep] / norms[keep, None]])
    return out


def sample_coefficients(n: int, seed: int = 0) -> np.ndarray:
    """``n`` unit triples, drawn uniformly in the cube and renormalized."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    chunks = [
        _chunk_coefficients(seed, k, min(CHUNK_SIZE, n - start))
        for k, start in enumerate(range(0, n, CHUNK_SIZE))
    ]
    return np.vstack(chunks)


def _evaluate(abc: np.ndarray, tags: set[str]) -> dict[str, np.ndarray]:
    a, b, c = abc.T
    cols = {"a": a, "b": b, "c": c}
    need = set(tags)
    if "S_I" in need:
        need |= {"I6", "I9", "I12"}
    if "I6" in need:
        cols["absI6"] = np.abs(cf.i6_ss(a, b, c))
    if "I9" in need:
        cols["absI9"] = np.abs(cf.i9_ss(a, b, c))
    if "I12" in need:
        cols["absI12"] = np.abs(cf.i12_ss(a, b, c))
    if "Delta333" in need:
        cols["absDelta"] = np.abs(cf.delta_ss(a, b, c))
    if "S_I" in need:
        cols["S_I"] = cols["absI6"] / cf.M_I6 + cols["absI9"] / cf.M_I9 + cols["absI12"] / cf.M_I12
    return cols


@dataclass
class SampleTable:
    """Column store of sampled coefficients and invariant magnitudes."""

    columns: dict[str, np.ndarray]
    seed: int

    def __len__(self) -> int:
        return len(self.columns["a"])

    def __getitem__(self, key: str) -> np.ndarray:
        return self.columns[key]

    def values(self, tag: str) -> np.ndarray:
        return self.columns[_COLUMN_OF_TAG[objective(tag).tag]]

    def to_csv(self, out=None) -> str | None:
        names = [c for c in SAMPLE_COLUMNS if c in self.columns]
        data = np.column_stack([self.columns[c] for c in names])
        return write_csv(names, data.tolist(), out)


def sample_and_evaluate(
    n: int,
    objective_tags: Iterable[str] | None = None,
    seed: int = 0,
    threads: int | None = 1,
) -> SampleTable:
    """Evaluate closed-form magnitudes on ``n`` random unit triples.

    Chunks of ``CHUNK_SIZE`` samples use independent generators seeded with
    ``[seed, chunk_index]``, so the table does not depend on ``threads``.
    ``threads=None`` uses all available cores.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    tags = {objective(t).tag for t in (objective_tags or _COLUMN_OF_TAG)}
    starts = list(range(0, n, CHUNK_SIZE))

    def work(k: int) -> dict[str, np.ndarray]:
        abc = _chunk_coefficients(seed, k, min(CHUNK_SIZE, n - starts[k]))
        return _evaluate(abc, tags)

    workers = threads or os.cpu_count() or 1
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, range(len(starts))))
    else:
        parts = [work(k) for k in range(len(starts))]
    columns = {key: np.concatenate([p[key] for p in parts]) for key in parts[0]}
    return SampleTable(columns, seed)


# -- histograms -----------------------------------------------------------------

@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    total: int
    objective_tag: str | None = None

    def __post_init__(self):
        if len(self.counts) != len(self.bin_edges) - 1:
            raise ValueError("need len(counts) == len(bin_edges) - 1")
        if np.any(np.diff(self.bin_edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")
        if int(np.sum(self.counts)) != self.total:
            raise ValueError("counts do not sum to total")

    def to_csv(self, out=None) -> str | None:
        rows = zip(self.bin_edges[:-1].tolist(), self.bin_edges[1:].tolist(), self.counts.tolist())
        return write_csv(("bin_lo", "bin_hi", "count"), rows, out)

    def to_dict(self) -> dict:
        return {
            "objective": self.objective_tag,
            "bin_edges": self.bin_edges.tolist(),
            "counts": self.counts.tolist(),
            "total": self.total,
            "last_bin_fraction": last_bin_fraction(self),
        }


def histogram(values, n_bins: int = 100, upper: float = 1.0, objective_tag: str | None = None) -> Histogram:
    """Uniform bins on ``[0, upper]``; values above ``upper`` fall in the last bin.

    Raises:
        ValueError: empty input, ``n_bins < 2`` or ``upper <= 0``.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("histogram of an empty sample")
    if n_bins < 2 or not upper > 0:
        raise ValueError(f"need n_bins >= 2 and upper > 0, got {n_bins}, {upper}")
    edges = np.linspace(0.0, upper, n_bins + 1)
    idx = np.clip((v / upper * n_bins).astype(np.int64), 0, n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    return Histogram(edges, counts, int(v.size), objective_tag)


def histogram_auto(values, objective_tag: str | None = None) -> Histogram:
    """Data-driven binning over the observed range (numpy's ``bins='auto'`` rule)."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("histogram of an empty sample")
    counts, edges = np.histogram(v, bins="auto")
    return Histogram(edges, counts, int(v.size), objective_tag)


def last_bin_fraction(h: Histogram) -> float:
    if h.total <= 0:
        raise ValueError("empty histogram")
    return float(h.counts[-1]) / h.total


def sorted_curve(values) -> np.ndarray:
    return np.sort(np.asarray(values, dtype=float).ravel())


def sorted_curve_csv(values, out=None) -> str | None:
    curve = sorted_curve(values)
    return write_csv(("rank", "value"), zip(range(len(curve)), curve.tolist()), out)


# -- level sets on the sphere -----------------------------------------------

@dataclass(frozen=True)
class SphereGrid:
    objective_tag: str
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray  # shape (n_theta, n_phi), signed

    @property
    def resolution(self) -> tuple[int, int]:
        return self.values.shape

    def coordinates(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        th, ph = np.meshgrid(self.theta, self.phi, indexing="ij")
        return _snap(np.sin(th) * np.cos(ph)), _snap(np.sin(th) * np.sin(ph)), _snap(np.cos(th))

    def to_csv(self, out=None) -> str | None:
        th, ph = np.meshgrid(self.theta, self.phi, indexing="ij")
        a, b, c = self.coordinates()
        data = np.column_stack([x.ravel() for x in (th, ph, a, b, c, self.values)])
        return write_csv(("theta", "phi", "a", "b", "c", "value"), data.tolist(), out)


def _snap(x: np.ndarray) -> np.ndarray:
    # cos(pi/2) and friends come out ~1e-17; make them exact zeros
    return np.where(np.abs(x) < 1e-15, 0.0, x)


def sphere_grid(objective_tag: str, n_theta: int = 181, n_phi: int = 360) -> SphereGrid:
    """Signed objective values on ``a = sin t cos p, b = sin t sin p, c = cos t``.

    ``theta`` spans ``[0, pi]`` including both poles; ``phi`` spans ``[0, 2 pi)``.
    """
    if n_theta < 2 or n_phi < 2:
        raise ValueError("need n_theta, n_phi >= 2")
    obj = objective(objective_tag)
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    grid = SphereGrid(obj.tag, theta, phi, np.empty((n_theta, n_phi)))
    a, b, c = grid.coordinates()
    values = np.asarray(obj.value(a, b, c), dtype=float) + 0.0  # drop negative zeros
    return SphereGrid(obj.tag, theta, phi, values)
