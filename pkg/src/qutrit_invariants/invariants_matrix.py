"""Fundamental invariants of arbitrary 3-qutrit states from matrix power-traces.

A tensor ``z`` sits in the degree-one piece of the Z/3-graded algebra
``e6 = sl3^3 + H + H*``.  Its adjoint operator ``K = ad_z`` is a 78x78 matrix
with the cyclic block pattern::

        [ 0    0    K02 ]      rows/cols split 24 | 27 | 27
    K = [ K10  0    0   ]
        [ 0    K21  0   ]

so ``K^3`` is block diagonal and only ``tr(K^p)`` with ``3 | p`` can be nonzero.
``tr(K^6)`` and ``tr(K^12)`` give the degree 6 and 12 invariants; degree 9
comes from the determinant of the 9x9 Strassen matrix instead, since
``tr(K^9)`` vanishes identically.

The block entries are signed multiples of single amplitudes and are read from
``data/adjoint_blocks.csv`` (columns ``block,row,col,num,den,i,j,k``).
"""

from __future__ import annotations

import csv
import functools
import hashlib
import io
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .invariant_set import InvariantSet, hyperdet_from_fundamentals
from .states import QutritState

__all__ = [
    "BLOCK_SHAPES",
    "AdjointMatrix",
    "BlockAsset",
    "load_blocks",
    "verify_block_asset",
    "build_adjoint",
    "power_trace",
    "strassen_matrix",
    "strassen_det",
    "fundamental_invariants",
    "fundamental_invariants_batch",
    "hyperdet",
]

StateLike = Union[QutritState, np.ndarray, Iterable[complex]]

BLOCK_SHAPES = {"K02": (24, 27), "K10": (27, 24), "K21": (27, 27), "S9": (9, 9)}
DIM = 78
_OFFSETS = (0, 24, 51)  # sl3^3 | H | H*

# Sign relating det(S9) to I9.  The customary choice is -1; +1 makes the
# matrix path agree in sign with i9_ss on every semi-simple state.
I9_SIGN = 1.0

# Per-row nonzero counts of the printed blocks, and a digest of every row's
# sorted coefficient multiset.  A transcription error in the asset changes one
# of these.
EXPECTED_ROW_NNZ = {
    "K02": (27,) * 6 + (9,) * 18,
    "K10": (9, 10, 9, 10, 11, 10, 9, 10, 9, 10, 11, 10, 11, 12, 11, 10, 11, 10,
            9, 10, 9, 10, 11, 10, 9, 10, 9),
    "K21": (8,) * 27,
    "S9": (6,) * 9,
}
EXPECTED_SIGNATURE_SHA256 = "53b3bfa7e0800aa5dc3816b6020b9a3e5e89f8d3fd6bfdbd4b24badab1c71f15"

DEFAULT_ASSET = "adjoint_blocks.csv"


@dataclass(frozen=True)
class BlockAsset:
    """Sparse description of the K blocks and S9 as linear maps of the 27 amplitudes.

    ``maps[name]`` is a real ``(rows*cols, 27)`` matrix ``T`` with
    ``block = (T @ z).reshape(rows, cols)``.
    """

    entries: dict[str, list[tuple[int, int, Fraction, int]]]
    maps: dict[str, np.ndarray]

    def signature(self) -> tuple[dict[str, tuple[int, ...]], str]:
        return block_signature(self.entries)


def _parse_asset(text: str) -> dict[str, list[tuple[int, int, Fraction, int]]]:
    entries: dict[str, list] = {name: [] for name in BLOCK_SHAPES}
    reader = csv.DictReader(io.StringIO(text))
    for row in reader:
        name = row["block"]
        if name not in BLOCK_SHAPES:
            raise ValueError(f"unknown block {name!r} in asset")
        r, c = int(row["row"]), int(row["col"])
        nr, nc = BLOCK_SHAPES[name]
        if not (0 <= r < nr and 0 <= c < nc):
            raise ValueError(f"entry ({r},{c}) outside block {name} of shape {nr}x{nc}")
        coef = Fraction(int(row["num"]), int(row["den"]))
        i, j, k = int(row["i"]), int(row["j"]), int(row["k"])
        entries[name].append((r, c, coef, 9 * i + 3 * j + k))
    return entries


def _linear_maps(entries) -> dict[str, np.ndarray]:
    maps = {}
    for name, (nr, nc) in BLOCK_SHAPES.items():
        T = np.zeros((nr * nc, 27))
        for r, c, coef, idx in entries[name]:
            T[r * nc + c, idx] += float(coef)
        maps[name] = T
    return maps


def block_signature(entries) -> tuple[dict[str, tuple[int, ...]], str]:
    nnz = {}
    h = hashlib.sha256()
    for name, (nr, _) in BLOCK_SHAPES.items():
        rows: list[list[Fraction]] = [[] for _ in range(nr)]
        for r, _c, coef, _idx in entries[name]:
            rows[r].append(coef)
        nnz[name] = tuple(len(x) for x in rows)
        for r, coefs in enumerate(rows):
            h.update(f"{name}:{r}:{','.join(str(q) for q in sorted(coefs))};".encode())
    return nnz, h.hexdigest()


def _read_asset_text(path: str | Path | None) -> str:
    if path is None:
        return resources.files(__package__).joinpath("data", DEFAULT_ASSET).read_text()
    return Path(path).read_text()


def load_blocks(path: str | Path | None = None) -> BlockAsset:
    """Load a block asset (the packaged one by default)."""
    if path is None:
        return _default_blocks()
    entries = _parse_asset(_read_asset_text(path))
    return BlockAsset(entries, _linear_maps(entries))


@functools.cache
def _default_blocks() -> BlockAsset:
    entries = _parse_asset(_read_asset_text(None))
    return BlockAsset(entries, _linear_maps(entries))


def verify_block_asset(path: str | Path | None = None) -> tuple[bool, str]:
    """Compare an asset's row counts and coefficient multisets to the frozen signature."""
    try:
        asset = load_blocks(path)
    except (ValueError, KeyError, OSError) as exc:
        return False, f"unreadable asset: {exc}"
    nnz, digest = asset.signature()
    for name, expected in EXPECTED_ROW_NNZ.items():
        if nnz[name] != expected:
            bad = [r for r, (x, y) in enumerate(zip(nnz[name], expected)) if x != y]
            return False, f"{name}: nonzero count differs in rows {bad}"
    if digest != EXPECTED_SIGNATURE_SHA256:
        return False, f"coefficient multiset digest mismatch ({digest[:12]}...)"
    return True, "ok"


# -- evaluation --------------------------------------------------------------

_TINY = np.finfo(float).tiny


def _flush_subnormal(z: np.ndarray) -> np.ndarray:
    # LAPACK's LU returns nan/inf on matrices holding subnormal entries
    re, im = z.real.copy(), z.imag.copy()
    re[np.abs(re) < _TINY] = 0.0
    im[np.abs(im) < _TINY] = 0.0
    return re + 1j * im


def _vector(state: StateLike) -> np.ndarray:
    z = state.vector if isinstance(state, QutritState) else np.asarray(state, dtype=complex).reshape(-1)
    if z.size != 27:
        raise ValueError(f"expected 27 amplitudes, got {z.size}")
    return _flush_subnormal(z)


def _block(name: str, z: np.ndarray, asset: BlockAsset) -> np.ndarray:
    return (asset.maps[name] @ z).reshape(BLOCK_SHAPES[name])


@dataclass(frozen=True)
class AdjointMatrix:
    """The three nonzero blocks of ``ad_z``; ``dense()`` gives the 78x78 matrix."""

    K02: np.ndarray
    K10: np.ndarray
    K21: np.ndarray

    def dense(self) -> np.ndarray:
        K = np.zeros((DIM, DIM), dtype=complex)
        o0, o1, o2 = _OFFSETS
        K[o0:o1, o2:] = self.K02
        K[o1:o2, o0:o1] = self.K10
        K[o2:, o1:o2] = self.K21
        return K

    def cube_blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Diagonal blocks of K^3 (24x24, 27x27, 27x27)."""
        return (
            self.K02 @ self.K21 @ self.K10,
            self.K10 @ self.K02 @ self.K21,
            self.K21 @ self.K10 @ self.K02,
        )


def build_adjoint(state: StateLike, asset: BlockAsset | None = None) -> AdjointMatrix:
    asset = asset or _default_blocks()
    z = _vector(state)
    return AdjointMatrix(*(_block(n, z, asset) for n in ("K02", "K10", "K21")))


def power_trace(K: AdjointMatrix | np.ndarray, p: int) -> complex:
    """``tr(K^p)`` for ``1 <= p <= 16``.

    For ``3 | p`` this uses the block-diagonal cube; otherwise it multiplies
    the dense matrix out (the result is zero up to rounding).
    """
    if not 1 <= p <= 16:
        raise ValueError(f"power must be in 1..16, got {p}")
    if isinstance(K, AdjointMatrix):
        if p % 3 == 0:
            return complex(sum(np.trace(np.linalg.matrix_power(B, p // 3)) for B in K.cube_blocks()))
        K = K.dense()
    return complex(np.trace(np.linalg.matrix_power(np.asarray(K), p)))


def strassen_matrix(state: StateLike, asset: BlockAsset | None = None) -> np.ndarray:
    return _block("S9", _vector(state), asset or _default_blocks())


def strassen_det(state: StateLike, asset: BlockAsset | None = None) -> complex:
    """``g9 = det(S9)`` via LAPACK LU with partial pivoting."""
    return complex(np.linalg.det(strassen_matrix(state, asset)))


def _convert(g6, g9, g12):
    I6 = g6 / -108.0
    I9 = I9_SIGN * g9
    I12 = (g12 / 108.0 - 41.0 * I6**2) / 930.0
    return I6, I9, I12


def fundamental_invariants(state: StateLike, asset: BlockAsset | None = None) -> InvariantSet:
    """Evaluate I6, I9, I12 and Delta333 on any state.

    ``g6 = tr(K^6)`` and ``g12 = tr(K^12)`` are taken from the 24x24 block
    ``B = K02 K21 K10`` of ``K^3`` (each diagonal block of ``K^3`` has the
    same power traces, hence the factor 3); ``g9 = det(S9)``.
    """
    asset = asset or _default_blocks()
    z = _vector(state)
    K = build_adjoint(z, asset)
    B = K.K02 @ K.K21 @ K.K10
    B2 = B @ B
    g6 = 3.0 * np.trace(B2)
    g12 = 3.0 * np.sum(B2 * B2.T)
    g9 = np.linalg.det(_block("S9", z, asset))
    I6, I9, I12 = _convert(g6, g9, g12)
    return InvariantSet(
        complex(I6), complex(I9), complex(I12),
        complex(hyperdet_from_fundamentals(I6, I9, I12)),
        g6=complex(g6), g9=complex(g9), g12=complex(g12),
    )


def fundamental_invariants_batch(
    vectors: np.ndarray, asset: BlockAsset | None = None
) -> dict[str, np.ndarray]:
    """Vectorized evaluation on an ``(n, 27)`` (or ``(n, 3, 3, 3)``) array of states.

    Returns a dict of complex arrays keyed like :class:`InvariantSet` fields.
    """
    asset = asset or _default_blocks()
    Z = _flush_subnormal(np.asarray(vectors, dtype=complex).reshape(-1, 27))
    n = Z.shape[0]

    def blk(name):
        return (Z @ asset.maps[name].T).reshape((n,) + BLOCK_SHAPES[name])

    B = blk("K02") @ blk("K21") @ blk("K10")
    B2 = B @ B
    g6 = 3.0 * np.trace(B2, axis1=1, axis2=2)
    g12 = 3.0 * np.einsum("nij,nji->n", B2, B2)
    g9 = np.linalg.det(blk("S9"))
    I6, I9, I12 = _convert(g6, g9, g12)
    return {
        "I6": I6, "I9": I9, "I12": I12,
        "Delta333": hyperdet_from_fundamentals(I6, I9, I12),
        "g6": g6, "g9": g9, "g12": g12,
    }


def hyperdet(state: StateLike, asset: BlockAsset | None = None) -> complex:
    return fundamental_invariants(state, asset).Delta333


def abs_hyperdet_fast(z: np.ndarray, asset: BlockAsset | None = None) -> float:
    """|Delta333| for a 27-vector without building an InvariantSet (inner loops)."""
    asset = asset or _default_blocks()
    maps = asset.maps
    K02 = (maps["K02"] @ z).reshape(24, 27)
    K10 = (maps["K10"] @ z).reshape(27, 24)
    K21 = (maps["K21"] @ z).reshape(27, 27)
    B = K02 @ (K21 @ K10)
    B2 = B @ B
    g6 = 3.0 * np.trace(B2)
    g12 = 3.0 * np.sum(B2 * B2.T)
    g9 = np.linalg.det((maps["S9"] @ z).reshape(9, 9))
    I6, I9, I12 = _convert(g6, g9, g12)
    return float(abs(hyperdet_from_fundamentals(I6, I9, I12)))
