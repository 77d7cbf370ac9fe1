"""Invariants on the semi-simple slice ``a*v1 + b*v2 + c*v3`` in closed form.

Every evaluator broadcasts over numpy arrays of ``a, b, c``.  Analytic
partial derivatives (``grad_*``) return an array of shape ``(3,) + shape``.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .invariant_set import InvariantSet, hyperdet_from_fundamentals

__all__ = [
    "ZETA6", "ZETA9", "ZETA9_ADJOINT", "ZETA12",
    "M_I6", "M_I9", "M_I12", "M_DELTA", "M_S_INDEX",
    "i6_ss", "i9_ss", "i12_ss", "delta_ss",
    "grad_i6_ss", "grad_i9_ss", "grad_i12_ss", "grad_delta_ss",
    "invariants_ss", "invariants_f2prime", "i6_f3prime", "s_index",
    "combination_ss", "combination_ss_exact",
]

SQRT3 = math.sqrt(3.0)

ZETA6 = 2**5 / (3**3 * 7**3)
# Tabulated normalisation of I9 on the F2' family.  The adjoint-matrix path
# evaluates the same states to ZETA9_ADJOINT = 2^5 sqrt(42) / 21^5 instead,
# i.e. larger by 3^2 5^7 / 7^5 (~41.8).
ZETA9 = 2**5 * math.sqrt(42.0) / (3**7 * 5**7)
ZETA9_ADJOINT = 2**5 * math.sqrt(42.0) / 21**5
ZETA12 = 2**7 / 21**6

M_I6 = 1 / 18
M_I9 = math.sqrt(6.0) / 3888
M_I12 = 1 / 7776
M_DELTA = SQRT3 / (2**19 * 3**14)
M_S_INDEX = 3.0

F3PRIME_ABS_I6 = 2**18 / (5**6 * 41**3)


class _Poly:
    """Sparse polynomial in (a, b, c): ``sum coef * a^i b^j c^k``."""

    def __init__(self, terms: Sequence[tuple[float, tuple[int, int, int]]]):
        self.terms = [(float(c), tuple(e)) for c, e in terms]

    def __call__(self, a, b, c):
        x = (a, b, c)
        out = 0.0
        for coef, e in self.terms:
            out = out + coef * x[0] ** e[0] * x[1] ** e[1] * x[2] ** e[2]
        return out

    def grad(self, a, b, c):
        x = (a, b, c)
        parts = []
        for var in range(3):
            acc = 0.0 * a
            for coef, e in self.terms:
                if e[var] == 0:
                    continue
                f = coef * e[var]
                for v in range(3):
                    p = e[v] - 1 if v == var else e[v]
                    if p:
                        f = f * x[v] ** p
                acc = acc + f
            parts.append(acc)
        return np.array(parts)


class _FactoredPoly:
    """``scale * prod(p_m ** e_m)`` with a product-rule gradient that tolerates zero factors."""

    def __init__(self, scale: float, factors: Sequence[tuple[_Poly, int]]):
        self.scale = scale
        self.factors = list(factors)

    def __call__(self, a, b, c):
        out = self.scale
        for p, e in self.factors:
            out = out * p(a, b, c) ** e
        return out

    def grad(self, a, b, c):
        vals = [p(a, b, c) for p, _ in self.factors]
        total = 0.0
        for m, (p, e) in enumerate(self.factors):
            rest = self.scale * e * vals[m] ** (e - 1)
            for n, (_, en) in enumerate(self.factors):
                if n != m:
                    rest = rest * vals[n] ** en
            total = total + p.grad(a, b, c) * rest
        return np.asarray(total)


def _lin(ca, cb, cc):
    return _Poly([(ca, (1, 0, 0)), (cb, (0, 1, 0)), (cc, (0, 0, 1))])


def _quad(aa, ab, ac, bb, bc, cc):
    return _Poly([
        (aa, (2, 0, 0)), (ab, (1, 1, 0)), (ac, (1, 0, 1)),
        (bb, (0, 2, 0)), (bc, (0, 1, 1)), (cc, (0, 0, 2)),
    ])


def _sym_terms(coef: float, exps: tuple[int, int, int]) -> list[tuple[float, tuple[int, int, int]]]:
    """All distinct permutations of an exponent pattern, each with ``coef``."""
    return [(coef, p) for p in sorted(set(itertools.permutations(exps)))]


_I6 = _Poly(
    [(1 / 27, e) for e in [(6, 0, 0), (0, 6, 0), (0, 0, 6)]]
    + [(-10 / 27, e) for e in [(3, 3, 0), (3, 0, 3), (0, 3, 3)]]
)

_I9 = _FactoredPoly(
    -SQRT3 / 243,
    [
        (_lin(1, -1, 0), 1), (_lin(1, 0, -1), 1), (_lin(0, 1, -1), 1),
        (_quad(1, 1, 0, 1, 0, 0), 1),   # a^2 + ab + b^2
        (_quad(1, 0, 1, 0, 0, 1), 1),   # a^2 + ac + c^2
        (_quad(0, 0, 0, 1, 1, 1), 1),   # b^2 + bc + c^2
    ],
)

_I12 = _Poly(
    _sym_terms(1 / 729, (9, 3, 0))
    + _sym_terms(-4 / 729, (6, 6, 0))
    + _sym_terms(2 / 729, (6, 3, 3))
)

_DELTA = _FactoredPoly(
    -4 / 3**18,
    [
        (_lin(1, 0, 0), 3), (_lin(0, 1, 0), 3), (_lin(0, 0, 1), 3),
        (_lin(1, 1, 1), 3),
        (_quad(1, 2, -1, 1, -1, 1), 3),
        (_quad(1, -1, 2, 1, -1, 1), 3),
        (_quad(1, -1, -1, 1, 2, 1), 3),
        (_quad(1, -1, -1, 1, -1, 1), 3),
    ],
)


def i6_ss(a, b, c):
    return _I6(a, b, c)


def i9_ss(a, b, c):
    return _I9(a, b, c)


def i12_ss(a, b, c):
    return _I12(a, b, c)


def delta_ss(a, b, c):
    """Restricted hyperdeterminant, evaluated as its factored product."""
    return _DELTA(a, b, c)


def grad_i6_ss(a, b, c):
    return _I6.grad(a, b, c)


def grad_i9_ss(a, b, c):
    return _I9.grad(a, b, c)


def grad_i12_ss(a, b, c):
    return _I12.grad(a, b, c)


def grad_delta_ss(a, b, c):
    return _DELTA.grad(a, b, c)


def invariants_ss(a: float, b: float, c: float) -> InvariantSet:
    """Closed-form InvariantSet; Delta333 is the factored form, not the combination."""
    return InvariantSet(
        complex(i6_ss(a, b, c)),
        complex(i9_ss(a, b, c)),
        complex(i12_ss(a, b, c)),
        complex(delta_ss(a, b, c)),
    )


def invariants_f2prime(a1: float, a2: float, *, zeta9: float = ZETA9) -> InvariantSet:
    """Invariants on the real family ``a1*w1 + a2*w2`` (unit circle only).

    ``zeta9`` defaults to the tabulated constant; pass ``ZETA9_ADJOINT`` for
    the normalisation the matrix path produces.
    """
    if abs(a1 * a1 + a2 * a2 - 1.0) > 1e-10:
        raise ValueError(f"need a1^2 + a2^2 = 1, got {a1 * a1 + a2 * a2!r}")
    I6 = ZETA6 * (3 * a1**6 + 15 * a1**2 * a2**4 + 2 * a2**6)
    I9 = zeta9 * (-(a1**9) + 6 * a1**5 * a2**4 + 8 * a1**3 * a2**6 + 3 * a1 * a2**8)
    I12 = ZETA12 * (
        -3 * a1**12 - 3 * a1**8 * a2**4 - 40 * a1**6 * a2**6
        - 57 * a1**4 * a2**8 - 24 * a1**2 * a2**10 - a2**12
    )
    return InvariantSet(complex(I6), complex(I9), complex(I12), 0j)


def f2prime_reduced(a1):
    """The F2' polynomials with ``a2^2`` eliminated: (I6, I9, I12) as functions of ``a1``.

    I9 uses the tabulated ZETA9.
    """
    return (
        ZETA6 * (16 * a1**6 - 24 * a1**4 + 9 * a1**2 + 2),
        ZETA9 * (-4 * a1**3 + 3 * a1),
        ZETA12 * (-32 * a1**6 + 48 * a1**4 - 18 * a1**2 - 1),
    )


def i6_f3prime(sign: int) -> float:
    """I6 on the F3' states ``+-w``; the other invariants vanish there."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    return -F3PRIME_ABS_I6 * float(sign) ** 6


def s_index(inv) -> float:
    """``|I6|/m_I6 + |I9|/m_I9 + |I12|/m_I12`` (3 at the Aharonov state).

    Accepts an InvariantSet or any object / mapping with I6, I9, I12.
    """
    if isinstance(inv, dict):
        I6, I9, I12 = inv["I6"], inv["I9"], inv["I12"]
    else:
        I6, I9, I12 = inv.I6, inv.I9, inv.I12
    return np.abs(I6) / M_I6 + np.abs(I9) / M_I9 + np.abs(I12) / M_I12


def combination_ss(a, b, c):
    """Delta333 rebuilt from the closed-form I6, I9, I12 (for cross-checks)."""
    return hyperdet_from_fundamentals(i6_ss(a, b, c), i9_ss(a, b, c), i12_ss(a, b, c))


def _combination_exact_scalar(a: float, b: float, c: float) -> float:
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    x = (a, b, c)
    i6 = (sum(t**6 for t in x) - 10 * (a**3 * b**3 + a**3 * c**3 + b**3 * c**3)) / 27
    sym930 = sum(x[i] ** 9 * x[j] ** 3 for i in range(3) for j in range(3) if i != j)
    i12 = (
        sym930
        - 4 * (a**6 * b**6 + a**6 * c**6 + b**6 * c**6)
        + 2 * (a**6 * b**3 * c**3 + a**3 * b**6 * c**3 + a**3 * b**3 * c**6)
    ) / 729
    # I9 = -sqrt(3)/243 * p; only even powers of I9 enter, so everything stays rational
    p = (
        (a - b) * (a - c) * (b - c)
        * (a * a + a * b + b * b) * (a * a + a * c + c * c) * (b * b + b * c + c * c)
    )
    i9_sq = 3 * p * p / 243**2
    delta = (
        i6**3 * i9_sq - i6**2 * i12**2 + 36 * i6 * i9_sq * i12
        + 108 * i9_sq**2 - 32 * i12**3
    )
    return float(delta)


def combination_ss_exact(a, b, c):
    """The combination formula evaluated in exact rational arithmetic.

    The float version loses all accuracy where Delta333 is far below the
    size of the individual terms; the exact one is correctly rounded.
    """
    out = np.vectorize(_combination_exact_scalar, otypes=[float])(a, b, c)
    return out[()] if out.ndim == 0 else out
