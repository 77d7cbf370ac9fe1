"""Three-qutrit states: construction, local actions, sampling and (de)serialization.

Amplitudes are stored as a ``(3, 3, 3)`` complex array ``a[i, j, k]``; the flat
ordering used everywhere (JSON, CSV, 27-vectors) is ``9*i + 3*j + k``.
"""

from __future__ import annotations

import csv
import enum
import functools
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

__all__ = [
    "QutritState",
    "SemiSimpleCoeffs",
    "Family",
    "NAMED_TAGS",
    "semisimple_to_tensor",
    "named_state",
    "parse_tag",
    "apply_slocc",
    "permute_parties",
    "sample_semisimple",
    "classify_semisimple_family",
    "maxdelta_coeffs",
]

SQRT3 = math.sqrt(3.0)
FAMILY_ZERO_TOL = 1e-10


def flat_index(i: int, j: int, k: int) -> int:
    return 9 * i + 3 * j + k


@dataclass(frozen=True, eq=False)
class QutritState:
    """A vector in C^3 (x) C^3 (x) C^3.

    ``approximate`` marks states whose amplitudes were transcribed to limited
    precision (their norm is only close to one).
    """

    amplitudes: np.ndarray
    approximate: bool = False
    label: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        arr = np.array(self.amplitudes, dtype=complex)
        if arr.size != 27:
            raise ValueError(f"a 3-qutrit state needs 27 amplitudes, got {arr.size}")
        arr = arr.reshape(3, 3, 3)
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @classmethod
    def from_vector(cls, vec: Sequence[complex] | np.ndarray, **kwargs) -> "QutritState":
        return cls(np.asarray(vec, dtype=complex).reshape(3, 3, 3), **kwargs)

    @classmethod
    def from_kets(cls, kets: Mapping[str, complex], scale: complex = 1.0, **kwargs) -> "QutritState":
        """Build a state from ``{"012": coeff, ...}`` ket labels."""
        arr = np.zeros((3, 3, 3), dtype=complex)
        for key, coeff in kets.items():
            i, j, k = (int(ch) for ch in key)
            arr[i, j, k] += coeff
        return cls(scale * arr, **kwargs)

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(27)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def is_normalized(self, atol: float = 1e-12) -> bool:
        return abs(self.norm - 1.0) <= atol

    def normalized(self) -> "QutritState":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return QutritState(self.amplitudes / n, approximate=self.approximate, label=self.label)

    def allclose(self, other: "QutritState", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0.0, atol=atol))

    def __neg__(self) -> "QutritState":
        return QutritState(-self.amplitudes, approximate=self.approximate)

    def __repr__(self) -> str:
        nz = [
            f"{c:.6g}|{i}{j}{k}>"
            for (i, j, k), c in np.ndenumerate(self.amplitudes)
            if c != 0
        ]
        name = f"{self.label}: " if self.label else ""
        return f"QutritState({name}{' + '.join(nz) or '0'})"

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {"amplitudes": [[float(z.real), float(z.imag)] for z in self.vector]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping) -> "QutritState":
        amps = data["amplitudes"]
        if len(amps) != 27:
            raise ValueError(f"expected 27 amplitudes, got {len(amps)}")
        vec = []
        for entry in amps:
            if isinstance(entry, (int, float)):
                vec.append(complex(entry))
            else:
                re, im = entry
                vec.append(complex(float(re), float(im)))
        return cls.from_vector(vec)

    @classmethod
    def from_json(cls, text: str) -> "QutritState":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["i", "j", "k", "re", "im"])
        for (i, j, k), z in np.ndenumerate(self.amplitudes):
            writer.writerow([i, j, k, repr(float(z.real)), repr(float(z.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "QutritState":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        if rows and not _is_number(rows[0][0]):
            rows = rows[1:]
        if len(rows) != 27:
            raise ValueError(f"expected 27 data rows, got {len(rows)}")
        arr = np.zeros((3, 3, 3), dtype=complex)
        seen = set()
        for row in rows:
            if len(row) != 5:
                raise ValueError(f"expected 5 columns (i,j,k,re,im), got {row!r}")
            i, j, k = (int(x) for x in row[:3])
            if not all(0 <= x <= 2 for x in (i, j, k)):
                raise ValueError(f"index out of range in row {row!r}")
            seen.add((i, j, k))
            arr[i, j, k] = complex(float(row[3]), float(row[4]))
        if len(seen) != 27:
            raise ValueError("CSV state repeats some (i,j,k) index")
        return cls(arr)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


class SemiSimpleCoeffs(NamedTuple):
    """Real coefficients of ``a*v1 + b*v2 + c*v3``."""

    a: float
    b: float
    c: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.a**2 + self.b**2 + self.c**2)

    def is_normalized(self, atol: float = 1e-12) -> bool:
        return abs(self.a**2 + self.b**2 + self.c**2 - 1.0) <= atol

    def normalized(self) -> "SemiSimpleCoeffs":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero triple")
        return SemiSimpleCoeffs(self.a / n, self.b / n, self.c / n)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c], dtype=float)


# supports of v1, v2, v3: |iii>, |i,i+1,i+2>, |i,i+2,i+1> (indices mod 3)
_V_SUPPORT = (
    [(i, i, i) for i in range(3)],
    [(i, (i + 1) % 3, (i + 2) % 3) for i in range(3)],
    [(i, (i + 2) % 3, (i + 1) % 3) for i in range(3)],
)


def semisimple_basis() -> np.ndarray:
    """The three basis tensors v1, v2, v3 stacked as a ``(3, 3, 3, 3)`` array."""
    basis = np.zeros((3, 3, 3, 3))
    for n, support in enumerate(_V_SUPPORT):
        for idx in support:
            basis[(n,) + idx] = 1.0 / SQRT3
    return basis


_BASIS = semisimple_basis()


def semisimple_to_tensor(coeffs: Iterable[float]) -> QutritState:
    """Return ``a*v1 + b*v2 + c*v3``; the input need not be normalized."""
    a, b, c = (float(x) for x in coeffs)
    return QutritState(np.tensordot(np.array([a, b, c]), _BASIS, axes=1))


# -- named states ---------------------------------------------------------

# (modulus, phase) per basis ket in 9i+3j+k order, printed to 3 decimals
_PSI1_POLAR = [
    (0.193, 1.7), (0.323, -2.01), (0.16, -2.16),
    (0.229, -2.22), (0.232, -3.12), (0.186, -2.5),
    (0.239, -2.34), (0.141, -0.411), (0.159, -0.512),
    (0.099, 1.54), (0.144, -2.43), (0.148, 2.13),
    (0.263, -1.62), (0.322, 0.475), (0.216, -1.95),
    (0.068, -1.39), (0.030, -2.89), (0.171, 1.91),
    (0.253, -2.82), (0.022, -0.225), (0.06, -1.2),
    (0.003, 2.64), (0.133, -1.52), (0.202, 2.2),
    (0.194, 1.08), (0.207, 1.13), (0.274, -2.29),
]
_PSI2_POLAR = [
    (0.245, 0.074), (0.024, 2.49), (0.248, 1.66),
    (0.069, 1.55), (0.256, 0.114), (0.118, -2.88),
    (0.313, -1.24), (0.076, 2.77), (0.149, 0.208),
    (0.208, 2.56), (0.227, -2.88), (0.157, 2.27),
    (0.072, 3.08), (0.2, -1.07), (0.199, -1.87),
    (0.13, -1.95), (0.133, 1.5), (0.218, -1.68),
    (0.244, -1.84), (0.191, -3.05), (0.049, 2.61),
    (0.144, 1.22), (0.226, 2.14), (0.278, -2.46),
    (0.227, 0.773), (0.186, -2.11), (0.218, -1.52),
]


def _from_polar(data: list[tuple[float, float]], label: str) -> QutritState:
    vec = [r * complex(math.cos(ph), math.sin(ph)) for r, ph in data]
    return QutritState.from_vector(vec, approximate=True, label=label)


def maxdelta_coeffs(index: int) -> SemiSimpleCoeffs:
    """The ``index``-th (1..12) real maximizer of |Delta333| on the semi-simple sphere.

    Ordering: r in (1+sqrt3, 1-sqrt3), then s sign in (+, -), then the slot
    (0, 1, 2) holding the distinguished coordinate r*s.
    """
    if not 1 <= index <= 12:
        raise ValueError(f"MaxDelta index must be in 1..12, got {index}")
    r_idx, rem = divmod(index - 1, 6)
    sign_idx, slot = divmod(rem, 3)
    r = 1.0 + SQRT3 if r_idx == 0 else 1.0 - SQRT3
    s = (1.0 if sign_idx == 0 else -1.0) / math.sqrt(r * r + 2.0)
    coords = [s, s, s]
    coords[slot] = r * s
    return SemiSimpleCoeffs(*coords)


def _f2prime(a1: float, a2: float) -> QutritState:
    if abs(a1 * a1 + a2 * a2 - 1.0) > 1e-10:
        raise ValueError(f"F2prime needs a1^2 + a2^2 = 1, got {a1 * a1 + a2 * a2!r}")
    q = math.sqrt(2.0 / 21.0)
    w1 = {"212": -1, "200": 1, "120": 2, "111": -2, "022": 0.5, "001": -0.5}
    w2 = {"222": -1, "201": -1, "121": 2, "110": 2, "012": -0.5, "000": -0.5}
    kets: dict[str, float] = {}
    for key, v in w1.items():
        kets[key] = kets.get(key, 0.0) + a1 * v
    for key, v in w2.items():
        kets[key] = kets.get(key, 0.0) + a2 * v
    return QutritState.from_kets(kets, scale=q, label=f"F2prime({a1:g},{a2:g})")


def _f3prime(sign: int) -> QutritState:
    if sign not in (1, -1):
        raise ValueError(f"F3prime sign must be +1 or -1, got {sign!r}")
    # |(-2,-2,-2,2,-1/8)| = 5*sqrt(41)/8, so the unit-norm prefactor is its inverse
    scale = sign * 8.0 / (5.0 * math.sqrt(41.0))
    kets = {"001": -2, "010": -2, "100": -2, "111": 2, "222": -0.125}
    return QutritState.from_kets(kets, scale=scale, label=f"F3prime({sign:+d})")


@functools.cache
def _fixed_states() -> dict[str, QutritState]:
    s6 = 1.0 / math.sqrt(6.0)
    perms6 = ["012", "021", "102", "120", "201", "210"]
    return {
        "ghz333": QutritState.from_kets({"000": 1, "111": 1, "222": 1}, 1 / SQRT3, label="GHZ333"),
        "w": QutritState.from_kets({"100": 1, "010": 1, "001": 1}, 1 / SQRT3, label="W"),
        "w333": QutritState.from_kets(
            {k: 1 for k in ["100", "200", "010", "020", "001", "002"]}, s6, label="W333"
        ),
        "aharonov": QutritState.from_kets(
            {"012": 1, "201": 1, "120": 1, "021": -1, "102": -1, "210": -1}, s6, label="Aharonov"
        ),
        "d3_111": QutritState.from_kets({k: 1 for k in perms6}, s6, label="D3_111"),
        "psi3": QutritState.from_kets(
            {"000": 3 - 2 * SQRT3, "011": 1, "101": 1, "110": 1},
            1 / (2 * math.sqrt(6 - 3 * SQRT3)),
            label="Psi3",
        ),
        "d3_2": QutritState.from_kets(
            {"200": 1, "020": 1, "002": 1, "110": 2, "101": 2, "011": 2},
            1 / math.sqrt(15),
            label="D3_2",
        ),
        "d3_3": QutritState.from_kets(
            {**{k: 1 for k in perms6}, "111": 2}, 1 / math.sqrt(10), label="D3_3"
        ),
        "psi1": _from_polar(_PSI1_POLAR, "Psi1"),
        "psi2": _from_polar(_PSI2_POLAR, "Psi2"),
        "m333i": QutritState(
            semisimple_to_tensor((1 / math.sqrt(2), -1 / math.sqrt(2), 0.0)).amplitudes,
            label="M333I",
        ),
    }


NAMED_TAGS = (
    "ghz333", "w", "w333", "aharonov", "d3_111", "psi3", "d3_2", "d3_3",
    "psi1", "psi2", "m333i", "f2prime", "f3prime", "maxdelta",
)

_ALIASES = {
    "ghz": "ghz333",
    "a": "aharonov",
    "singlet": "aharonov",
    "d111": "d3_111",
    "m333": "m333i",
    "m333,i": "m333i",
}


def parse_tag(text: str) -> tuple[str, tuple]:
    """Split ``"maxdelta:3"`` / ``"f2prime:0.5,0.866"`` into tag and parameters."""
    name, _, params = text.strip().partition(":")
    name = name.strip().lower().replace("-", "_")
    name = _ALIASES.get(name, name)
    if name not in NAMED_TAGS:
        raise KeyError(f"unknown state tag {text!r}; valid tags: {', '.join(NAMED_TAGS)}")
    args: tuple = ()
    if params:
        args = tuple(float(p) for p in params.split(","))
    if name == "maxdelta":
        args = (int(args[0]) if args else 1,)
    elif name == "f3prime":
        args = (int(args[0]) if args else 1,)
    elif name == "f2prime":
        if len(args) == 1:
            args = (args[0], math.sqrt(max(0.0, 1 - args[0] ** 2)))
        elif not args:
            args = (0.5, math.sqrt(0.75))
    return name, args


def named_state(tag: str, *params) -> QutritState:
    """Resolve a named state.

    ``tag`` may carry parameters inline (``"maxdelta:3"``) or as extra
    positional arguments (``named_state("f2prime", a1, a2)``).

    Raises:
        KeyError: unknown tag.
        ValueError: invalid parameters (F2prime off the unit circle, MaxDelta
            index outside 1..12, F3prime sign not +-1).
    """
    name, inline = parse_tag(tag)
    args = params or inline
    if name == "maxdelta":
        idx = int(args[0]) if args else 1
        st = semisimple_to_tensor(maxdelta_coeffs(idx))
        return QutritState(st.amplitudes, label=f"MaxDelta({idx})")
    if name == "f2prime":
        a1, a2 = (float(x) for x in args) if args else (0.5, math.sqrt(0.75))
        return _f2prime(a1, a2)
    if name == "f3prime":
        return _f3prime(int(args[0]) if args else 1)
    return _fixed_states()[name]


# -- local actions ---------------------------------------------------------

def apply_slocc(
    state: QutritState,
    A: np.ndarray,
    B: np.ndarray,
    C: np.ndarray,
    *,
    strict: bool = False,
    atol: float = 1e-9,
) -> QutritState:
    """Apply ``A (x) B (x) C`` to the state.

    With ``strict=True`` each factor must have unit determinant.
    """
    mats = [np.asarray(M, dtype=complex) for M in (A, B, C)]
    for name, M in zip("ABC", mats):
        if M.shape != (3, 3):
            raise ValueError(f"{name} must be 3x3, got shape {M.shape}")
        if strict and abs(np.linalg.det(M) - 1.0) > atol:
            raise ValueError(f"{name} is not in SL3: det = {np.linalg.det(M):.6g}")
    out = np.einsum("ia,jb,kc,abc->ijk", *mats, state.amplitudes)
    return QutritState(out, approximate=state.approximate)


def permute_parties(state: QutritState, perm: Sequence[int]) -> QutritState:
    """Relabel the parties: slot ``s`` of the result is slot ``perm[s]`` of the input.

    ``perm`` is a permutation of (0, 1, 2).
    """
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != [0, 1, 2]:
        raise ValueError(f"not a permutation of (0, 1, 2): {perm!r}")
    return QutritState(np.transpose(state.amplitudes, perm), approximate=state.approximate)


# -- sampling ---------------------------------------------------------------

def sample_semisimple(rng_seed: int | np.random.Generator | None = None) -> SemiSimpleCoeffs:
    """Uniform draw on [-1, 1]^3, renormalized to the unit sphere."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    while True:
        x = rng.uniform(-1.0, 1.0, size=3)
        n = math.sqrt(float(x @ x))
        if n > 0.0:
            return SemiSimpleCoeffs(*(x / n).tolist())


# -- Nurmiev families -------------------------------------------------------

class Family(str, enum.Enum):
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"
    F4 = "F4"
    DEGENERATE = "Degenerate"


def classify_semisimple_family(
    coeffs: Iterable[float], tol: float = FAMILY_ZERO_TOL
) -> Family:
    """Classify ``(a, b, c)`` by the family conditions, taken literally (no permutations)."""
    a, b, c = (float(x) for x in coeffs)

    def zero(x: float) -> bool:
        return abs(x) <= tol

    if not zero(a * b * c) and not zero((a**3 + b**3 + c**3) ** 3 - (3 * a * b * c) ** 3):
        return Family.F1
    if zero(c) and not zero(b * (a**3 + b**3)):
        return Family.F2
    if not zero(a) and zero(b) and zero(c):
        return Family.F3
    if zero(a) and not zero(b) and zero(b + c):
        return Family.F4
    return Family.DEGENERATE
