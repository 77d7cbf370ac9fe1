"""Maximizing |invariant| over real semi-simple states, plus full-state ascent.

On the unit sphere of coefficients ``(a, b, c)`` one coordinate is eliminated
through ``a^2 + b^2 + c^2 = 1`` (a *chart*).  The ascent always works in the
chart whose eliminated coordinate is largest in magnitude, which keeps the
implicit derivative ``-x/w`` bounded.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from . import closed_form as cf
from .invariants_matrix import abs_hyperdet_fast, fundamental_invariants_batch
from .states import QutritState, SemiSimpleCoeffs, maxdelta_coeffs, sample_semisimple

__all__ = [
    "Objective",
    "OptConfig",
    "OptResult",
    "RestartRecord",
    "AscentResult",
    "ChartError",
    "OBJECTIVE_TAGS",
    "objective",
    "implicit_gradient",
    "sphere_gradient",
    "is_critical",
    "is_critical_state",
    "maximize_abs",
    "known_maximizers",
    "perturb_and_ascend",
    "orbit",
    "orbit_distance",
]

CHART_EPS = 1e-8


class ChartError(ValueError):
    """The eliminated coordinate is (nearly) zero; use another chart."""


@dataclass(frozen=True)
class Objective:
    tag: str
    value: Callable
    grad: Callable
    max_value: float
    degree: int

    def __call__(self, p) -> float:
        a, b, c = p
        return float(self.value(a, b, c))


def _s_index_value(a, b, c):
    return (
        np.abs(cf.i6_ss(a, b, c)) / cf.M_I6
        + np.abs(cf.i9_ss(a, b, c)) / cf.M_I9
        + np.abs(cf.i12_ss(a, b, c)) / cf.M_I12
    )


def _s_index_grad(a, b, c):
    return (
        np.sign(cf.i6_ss(a, b, c)) * cf.grad_i6_ss(a, b, c) / cf.M_I6
        + np.sign(cf.i9_ss(a, b, c)) * cf.grad_i9_ss(a, b, c) / cf.M_I9
        + np.sign(cf.i12_ss(a, b, c)) * cf.grad_i12_ss(a, b, c) / cf.M_I12
    )


_OBJECTIVES = {
    "I6": Objective("I6", cf.i6_ss, cf.grad_i6_ss, cf.M_I6, 6),
    "I9": Objective("I9", cf.i9_ss, cf.grad_i9_ss, cf.M_I9, 9),
    "I12": Objective("I12", cf.i12_ss, cf.grad_i12_ss, cf.M_I12, 12),
    "Delta333": Objective("Delta333", cf.delta_ss, cf.grad_delta_ss, cf.M_DELTA, 36),
    "S_I": Objective("S_I", _s_index_value, _s_index_grad, cf.M_S_INDEX, 0),
}
OBJECTIVE_TAGS = tuple(_OBJECTIVES)

_TAG_ALIASES = {
    "i6": "I6", "i9": "I9", "i12": "I12",
    "delta": "Delta333", "delta333": "Delta333", "hyperdet": "Delta333",
    "s_i": "S_I", "s_index": "S_I", "si": "S_I",
}


def objective(tag: str | Objective) -> Objective:
    if isinstance(tag, Objective):
        return tag
    key = _TAG_ALIASES.get(tag.lower(), tag)
    try:
        return _OBJECTIVES[key]
    except KeyError:
        raise KeyError(f"unknown objective {tag!r}; choose from {', '.join(OBJECTIVE_TAGS)}") from None


@dataclass(frozen=True)
class OptConfig:
    restarts: int = 64
    max_iters: int = 2000
    step: float = 0.05
    tol_grad: float = 1e-12
    rng_seed: int = 0

    def __post_init__(self):
        if self.restarts <= 0 or self.max_iters <= 0 or self.step <= 0 or self.tol_grad <= 0:
            raise ValueError(f"OptConfig fields must be positive: {self}")


# -- gradients on the sphere -------------------------------------------------

def implicit_gradient(obj: Objective | str, p: Sequence[float], chart: int = 2) -> np.ndarray:
    """Gradient of ``f`` in the chart that eliminates coordinate ``chart``.

    With ``w = p[chart]`` expressed through the two free coordinates ``u``,
    ``d/du f = df/du + df/dw * (-u / w)``.  Returns the 2-vector over the free
    coordinates in increasing index order.

    Raises:
        ChartError: ``|p[chart]| <= 1e-8``.
    """
    obj = objective(obj)
    x = np.asarray(p, dtype=float)
    w = x[chart]
    if abs(w) <= CHART_EPS:
        raise ChartError(f"coordinate {chart} is {w:.3g}; chart is singular here")
    g = np.asarray(obj.grad(*x), dtype=float)
    free = [i for i in range(3) if i != chart]
    return np.array([g[u] - g[chart] * x[u] / w for u in free])


def best_chart(p: Sequence[float]) -> int:
    return int(np.argmax(np.abs(np.asarray(p, dtype=float))))


def sphere_gradient(obj: Objective | str, p: Sequence[float]) -> np.ndarray:
    """Implicit gradient in the best-conditioned chart."""
    return implicit_gradient(obj, p, best_chart(p))


def is_critical(obj: Objective | str, p: Sequence[float], tol: float = 1e-6) -> bool:
    """True iff the sphere gradient is below ``tol`` times the objective's maximum value."""
    obj = objective(obj)
    g = sphere_gradient(obj, p)
    return bool(np.linalg.norm(g) < tol * obj.max_value)


# -- symmetry group of order 12: coordinate permutations x global sign -------

_PERMS = list(itertools.permutations(range(3)))


def orbit(p: Sequence[float]) -> list[np.ndarray]:
    x = np.asarray(p, dtype=float)
    return [s * x[list(perm)] for perm in _PERMS for s in (1.0, -1.0)]


def orbit_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """Smallest distance between ``q`` and any signed permutation of ``p``."""
    q = np.asarray(q, dtype=float)
    return min(float(np.linalg.norm(g - q)) for g in orbit(p))


def _canonical(p: Sequence[float]) -> np.ndarray:
    return max(orbit(p), key=lambda v: tuple(np.round(v, 9)))


def known_maximizers(obj: Objective | str) -> list[SemiSimpleCoeffs]:
    """Catalogued global maximizers of ``|f|`` on the real semi-simple sphere.

    Raises:
        ValueError: for objectives without a catalogue (``S_I``).
    """
    obj = objective(obj)
    if obj.tag == "Delta333":
        return [maxdelta_coeffs(i) for i in range(1, 13)]
    if obj.tag in ("I6", "I9", "I12"):
        h = 1.0 / math.sqrt(2.0)
        pts = []
        for perm in _PERMS:
            x = np.array([h, -h, 0.0])[list(perm)]
            if not any(np.allclose(x, y) for y in pts):
                pts.append(x)
        return [SemiSimpleCoeffs(*map(float, x)) for x in pts]
    raise ValueError(f"no maximizer catalogue for objective {obj.tag!r}")


# -- multi-start projected ascent ----------------------------------------------

@dataclass
class RestartRecord:
    start: SemiSimpleCoeffs
    point: SemiSimpleCoeffs
    value: float
    iterations: int
    converged: bool
    trace: list[float] = field(default_factory=list)


@dataclass
class OptResult:
    objective: str
    best_point: SemiSimpleCoeffs
    best_value: float
    all_local_optima: list[tuple[SemiSimpleCoeffs, float]]
    matched_known: Optional[int]
    iterations_used: int
    restarts: list[RestartRecord]
    config: OptConfig

    def hit_fraction(self, max_value: float, rel: float = 1e-4) -> float:
        """Share of restarts ending within ``rel`` of ``max_value``."""
        hits = sum(abs(r.value - max_value) <= rel * max_value for r in self.restarts)
        return hits / len(self.restarts)

    def to_dict(self, verbose: bool = False) -> dict:
        out = {
            "objective": self.objective,
            "seed": self.config.rng_seed,
            "restarts": self.config.restarts,
            "best_point": list(self.best_point),
            "best_value": self.best_value,
            "matched_known": self.matched_known,
            "iterations_used": self.iterations_used,
            "all_local_optima": [
                {"point": list(p), "value": v} for p, v in self.all_local_optima
            ],
        }
        if verbose:
            out["restart_trace"] = [
                {
                    "start": list(r.start),
                    "point": list(r.point),
                    "value": r.value,
                    "iterations": r.iterations,
                    "converged": r.converged,
                    "trace": r.trace,
                }
                for r in self.restarts
            ]
        return out


def _chart_point(free: np.ndarray, chart: int, sign: float) -> np.ndarray:
    w = sign * math.sqrt(max(0.0, 1.0 - float(free @ free)))
    x = np.insert(free, chart, w)
    return x / np.linalg.norm(x)


def _ascend(obj: Objective, x0: np.ndarray, cfg: OptConfig, keep_trace: bool) -> RestartRecord:
    x = x0 / np.linalg.norm(x0)
    fx = obj(x)
    trace = [abs(fx)] if keep_trace else []
    t_prev = cfg.step
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        chart = best_chart(x)
        g = implicit_gradient(obj, x, chart)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= cfg.tol_grad * obj.max_value:
            converged = True
            break
        # ascent on f^2: gradient 2 f g, only its direction matters
        d = math.copysign(1.0, fx) * g / gnorm
        free = np.delete(x, chart)
        sign = math.copysign(1.0, x[chart])
        t = min(cfg.step, 4.0 * t_prev)
        while True:
            y = _chart_point(free + t * d, chart, sign)
            fy = obj(y)
            if fy * fy > fx * fx:
                break
            t *= 0.5
            if t < 1e-16:
                break
        if t < 1e-16:
            converged = True
            break
        x, fx, t_prev = y, fy, t
        if keep_trace:
            trace.append(abs(fx))
    return RestartRecord(
        start=SemiSimpleCoeffs(*map(float, x0)),
        point=SemiSimpleCoeffs(*map(float, x)),
        value=abs(fx),
        iterations=it,
        converged=converged,
        trace=trace,
    )


def restart_seeds(cfg: OptConfig) -> list[np.random.Generator]:
    """One independent generator per restart, derived from ``(seed, restart index)``."""
    return [np.random.default_rng([cfg.rng_seed, r]) for r in range(cfg.restarts)]


def maximize_abs(
    obj: Objective | str,
    cfg: OptConfig | None = None,
    *,
    keep_trace: bool = False,
    dedup_tol: float = 1e-6,
) -> OptResult:
    """Multi-start projected gradient ascent of ``|f|`` on the coefficient sphere.

    Each restart starts from a uniformly sampled, renormalized triple and
    ascends ``f^2`` with a halving line search, renormalizing after every
    step.  Distinct optima are reported once per signed-permutation orbit.
    """
    obj = objective(obj)
    cfg = cfg or OptConfig()
    records = [
        _ascend(obj, sample_semisimple(rng).as_array(), cfg, keep_trace)
        for rng in restart_seeds(cfg)
    ]

    optima: list[tuple[np.ndarray, SemiSimpleCoeffs, float]] = []
    for rec in sorted(records, key=lambda r: -r.value):
        canon = _canonical(rec.point)
        if any(np.linalg.norm(canon - c) <= dedup_tol for c, _, _ in optima):
            continue
        optima.append((canon, rec.point, rec.value))

    best = max(records, key=lambda r: r.value)
    best_point = best.point
    matched = None
    try:
        catalogue = known_maximizers(obj)
    except ValueError:
        catalogue = []
    for idx, k in enumerate(catalogue):
        if orbit_distance(best_point, k) <= 1e-4:
            matched = idx
            break

    return OptResult(
        objective=obj.tag,
        best_point=best_point,
        best_value=abs(obj(best_point)),
        all_local_optima=[(p, v) for _, p, v in optima],
        matched_known=matched,
        iterations_used=sum(r.iterations for r in records),
        restarts=records,
        config=cfg,
    )


# -- full-state ascent ----------------------------------------------------------

class AscentResult(NamedTuple):
    state: QutritState
    value: float
    accepted: int
    proposals: int


def perturb_and_ascend(
    start: QutritState,
    cfg: OptConfig | None = None,
    *,
    max_accepted: int = 100_000,
    max_proposals: int | None = None,
    target: float | None = None,
    min_step: float = 1e-10,
    grow: float = 1.1,
    shrink: float = 0.97,
) -> AscentResult:
    """Random coordinate search on |Delta333| over all 54 real amplitude parameters.

    Coordinates are visited cyclically; each proposal adds ``amp * N(0, 1)``
    to one real or imaginary part and renormalizes.  A proposal is kept only
    if |Delta333| increases.  ``amp`` starts at ``cfg.step``, grows by
    ``grow`` on acceptance (capped at ``cfg.step``) and shrinks by ``shrink``
    on rejection; the run stops once it falls below ``min_step``, after
    ``max_accepted`` accepted moves, after ``max_proposals`` proposals, or
    when ``target`` is reached.
    """
    cfg = cfg or OptConfig()
    if max_proposals is None:
        max_proposals = 20 * max_accepted
    rng = np.random.default_rng(cfg.rng_seed)
    z = start.vector
    x = np.concatenate([z.real, z.imag])
    n = np.linalg.norm(x)
    if n == 0.0:
        raise ValueError("cannot ascend from the zero state")
    x = x / n
    f = abs_hyperdet_fast(x[:27] + 1j * x[27:])
    amp = cfg.step
    accepted = proposals = 0
    while accepted < max_accepted and proposals < max_proposals and amp >= min_step:
        if target is not None and f >= target:
            break
        i = proposals % 54
        proposals += 1
        y = x.copy()
        y[i] += amp * rng.standard_normal()
        y /= np.linalg.norm(y)
        g = abs_hyperdet_fast(y[:27] + 1j * y[27:])
        if g > f:
            x, f = y, g
            accepted += 1
            amp = min(amp * grow, cfg.step)
        else:
            amp *= shrink
    state = QutritState.from_vector(x[:27] + 1j * x[27:])
    return AscentResult(state, float(f), accepted, proposals)


# -- criticality on full states ------------------------------------------------

_FULL_TAGS = {"I6": 6, "I9": 9, "I12": 12, "Delta333": 36}


def holomorphic_gradient(state: QutritState, tag: str, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient ``df/dz_k`` of an invariant (a polynomial in z)."""
    tag = objective(tag).tag
    if tag not in _FULL_TAGS:
        raise ValueError(f"full-state gradient not defined for {tag!r}")
    z = state.vector
    eye = np.eye(27)
    plus = fundamental_invariants_batch(z[None, :] + h * eye)[tag]
    minus = fundamental_invariants_batch(z[None, :] - h * eye)[tag]
    return (plus - minus) / (2 * h)


def is_critical_state(
    state: QutritState, tag: str, tol: float = 1e-6, h: float = 1e-6
) -> bool:
    """Finite-difference criticality test on the full (complex) unit sphere.

    ``f`` is critical at a unit vector ``x`` when its holomorphic gradient is
    proportional to ``conj(x)``, i.e. ``f`` is stationary along every
    direction complex-orthogonal to ``x``.  The residual is compared with
    ``tol`` times the objective's maximum value.
    """
    obj = objective(tag)
    x = state.normalized().vector
    grad = holomorphic_gradient(QutritState.from_vector(x), obj.tag, h)
    resid = grad - (grad @ x) * np.conj(x)
    return bool(np.linalg.norm(resid) < tol * obj.max_value)
