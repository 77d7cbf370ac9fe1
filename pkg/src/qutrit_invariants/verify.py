"""Reference values and the one-shot verification suite behind ``qutrit-invariants verify``."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import closed_form as cf
from .invariants_matrix import (
    build_adjoint,
    fundamental_invariants,
    fundamental_invariants_batch,
    power_trace,
    verify_block_asset,
)
from .optimize import (
    OptConfig,
    best_chart,
    implicit_gradient,
    known_maximizers,
    maximize_abs,
    objective,
    orbit_distance,
    perturb_and_ascend,
)
from .stats import histogram, last_bin_fraction, sample_and_evaluate
from .states import maxdelta_coeffs, named_state, semisimple_basis

__all__ = [
    "Check",
    "NAMED_MAGNITUDES",
    "LAST_BIN_PERCENT",
    "F2PRIME_MAGNITUDES",
    "random_unit_triples",
    "random_unimodular",
    "run_checks",
    "format_report",
]

SQRT6 = math.sqrt(6.0)

# |I6|, |I9|, |I12|, |Delta333| on the named states
NAMED_MAGNITUDES = {
    "ghz333": (1 / 27, 0.0, 0.0, 0.0),
    "aharonov": (1 / 18, SQRT6 / 3888, 1 / 7776, 0.0),
    "d3_111": (1 / 27, 0.0, 1 / 23328, 0.0),
    "psi3": (0.0, 0.0, 0.0, 0.0),
    "d3_2": (0.0, 0.0, 0.0, 0.0),
    "d3_3": (1 / 125, 0.0, 1 / 500000, 0.0),
    "w": (0.0, 0.0, 0.0, 0.0),
    "w333": (0.0, 0.0, 0.0, 0.0),
}
_MAXIMA = (cf.M_I6, cf.M_I9, cf.M_I12, cf.M_DELTA)

# reported last-bin percentages (100 bins on [0, max], 500k samples)
LAST_BIN_PERCENT = {"Delta333": 0.3294, "I6": 0.5802, "I9": 0.4122, "I12": 0.2696, "S_I": 0.3106}
LAST_BIN_TOL_PP = 0.08

F2PRIME_MAGNITUDES = (0.0103660511823777, 1.21376835394049e-6, 4.47729237981977e-6)
F3PRIME_ABS_I6 = 2.43426763976147e-4


@dataclass
class Check:
    name: str
    passed: bool
    measured: str
    expected: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: measured {self.measured}; expected {self.expected} ({self.seconds:.2f}s)"


def _rel(x, y) -> float:
    x, y = np.asarray(x), np.asarray(y)
    return float(np.max(np.abs(x - y) / np.maximum(np.abs(y), 1e-300)))


def random_unit_triples(n: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=(n, 3))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def random_unimodular(rng: np.random.Generator) -> np.ndarray:
    """Random complex 3x3 matrix rescaled to determinant one."""
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    return A / np.linalg.det(A) ** (1 / 3)


# -- individual checks ----------------------------------------------------------

def check_asset(asset_path=None) -> Check:
    ok, msg = verify_block_asset(asset_path)
    return Check("block asset checksum", ok, msg, "sha256 and per-row nonzero counts match")


def check_named_table() -> Check:
    worst_rel, worst_zero, ok = 0.0, 0.0, True
    for tag, expected in NAMED_MAGNITUDES.items():
        got = fundamental_invariants(named_state(tag)).magnitudes()
        for val, exp, m in zip(got.values(), expected, _MAXIMA):
            if exp == 0.0:
                worst_zero = max(worst_zero, val / m)
                ok &= val <= 1e-9 * m
            else:
                r = abs(val - exp) / exp
                worst_rel = max(worst_rel, r)
                ok &= r <= 1e-9
    return Check(
        "named-state table (matrix path)",
        ok,
        f"max rel err {worst_rel:.2e}, max zero/m {worst_zero:.2e}",
        "rel <= 1e-9 (zeros: <= 1e-9 m_f)",
    )


def check_maxdelta() -> Check:
    B = semisimple_basis()
    errs = []
    for i in range(1, 13):
        p = maxdelta_coeffs(i)
        closed = abs(cf.delta_ss(*p))
        matrix = abs(fundamental_invariants(np.tensordot(p.as_array(), B, 1)).Delta333)
        errs += [abs(closed - cf.M_DELTA) / cf.M_DELTA, abs(matrix - cf.M_DELTA) / cf.M_DELTA]
    worst = max(errs)
    return Check("MaxDelta states reach the maximum", worst <= 1e-6, f"max rel err {worst:.2e}", "rel <= 1e-6")


def check_optimizer(cfg: OptConfig | None = None) -> Check:
    cfg = cfg or OptConfig(restarts=64, rng_seed=0)
    parts, ok = [], True
    for tag in ("Delta333", "I6", "I9", "I12"):
        obj = objective(tag)
        res = maximize_abs(obj, cfg)
        rel = abs(res.best_value - obj.max_value) / obj.max_value
        dist = min(orbit_distance(res.best_point, k) for k in known_maximizers(obj))
        ok &= rel <= 1e-4 and dist <= 1e-4
        parts.append(f"{tag}: rel {rel:.1e}, dist {dist:.1e}")
    return Check("optimizer recovers maxima", ok, "; ".join(parts), "rel <= 1e-4 and dist <= 1e-4")


def check_path_equivalence(n: int = 1000, seed: int = 0) -> Check:
    P = random_unit_triples(n, seed)
    vals = fundamental_invariants_batch(P @ semisimple_basis().reshape(3, 27))
    a, b, c = P.T
    closed = {
        "I6": cf.i6_ss(a, b, c),
        "I9": cf.i9_ss(a, b, c),
        "I12": cf.i12_ss(a, b, c),
        "Delta333": cf.delta_ss(a, b, c),
    }
    errs = {k: _rel(vals[k], closed[k]) for k in closed}
    ok = max(errs.values()) <= 1e-9
    return Check(
        "matrix path == closed forms",
        ok,
        ", ".join(f"{k} {v:.1e}" for k, v in errs.items()),
        "rel <= 1e-9",
    )


def check_combination(n: int = 1000, seed: int = 0) -> Check:
    a, b, c = random_unit_triples(n, seed).T
    err = _rel(cf.combination_ss_exact(a, b, c), cf.delta_ss(a, b, c))
    return Check("combination formula == factored Delta", err <= 1e-9, f"rel {err:.1e}", "rel <= 1e-9")


def check_properties(seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    notes, ok = [], True

    z = rng.standard_normal(27) + 1j * rng.standard_normal(27)
    z /= np.linalg.norm(z)
    lam = 0.8 * np.exp(0.3j)
    base = fundamental_invariants(z)
    scaled = fundamental_invariants(lam * z)
    hom = max(
        _rel(scaled.I6, lam**6 * base.I6),
        _rel(scaled.I9, lam**9 * base.I9),
        _rel(scaled.I12, lam**12 * base.I12),
        _rel(scaled.Delta333, lam**36 * base.Delta333),
    )
    ok &= hom <= 1e-8
    notes.append(f"homogeneity {hom:.1e}")

    slocc = 0.0
    t = z.reshape(3, 3, 3)
    for _ in range(100):
        A, B, C = (random_unimodular(rng) for _ in range(3))
        moved = np.einsum("ia,jb,kc,abc->ijk", A, B, C, t).ravel()
        inv = fundamental_invariants(moved)
        slocc = max(
            slocc,
            _rel(inv.I6, base.I6), _rel(inv.I9, base.I9),
            _rel(inv.I12, base.I12), _rel(inv.Delta333, base.Delta333),
        )
    ok &= slocc <= 1e-6
    notes.append(f"SLOCC {slocc:.1e}")

    K = build_adjoint(z)
    tr = max(abs(power_trace(K, p)) for p in (1, 2, 4, 5, 7, 8, 10, 11))
    ok &= tr <= 1e-10
    notes.append(f"|tr K^p| (3 !| p) {tr:.1e}")

    a, b, c = random_unit_triples(200, seed + 1).T
    anti = float(np.max(np.abs(cf.i9_ss(b, a, c) + cf.i9_ss(a, b, c))))
    ok &= anti <= 1e-14
    notes.append(f"I9 antisymmetry {anti:.1e}")
    perm = 0.0
    for f in (cf.i6_ss, cf.i12_ss, cf.delta_ss):
        ref = f(a, b, c)
        for q in ((b, a, c), (c, b, a), (a, c, b), (b, c, a), (c, a, b)):
            perm = max(perm, float(np.max(np.abs(f(*q) - ref))))
    ok &= perm <= 1e-12
    notes.append(f"permutation invariance {perm:.1e}")
    return Check(
        "property suite",
        ok,
        ", ".join(notes),
        "hom 1e-8, SLOCC 1e-6, traces 1e-10, antisym 1e-14, perm 1e-12",
    )


def check_psi1_ascent() -> Check:
    res = perturb_and_ascend(named_state("psi1"), OptConfig(rng_seed=0), max_accepted=100_000)
    ok = res.value >= 6.90e-13 and res.accepted <= 100_000
    return Check(
        "ascent from Psi1",
        ok,
        f"|Delta| {res.value:.10e} after {res.accepted} accepted / {res.proposals} proposals",
        ">= 6.90e-13 within 1e5 accepted steps",
    )


def check_sampling(n: int = 500_000, seed: int = 0, threads: int | None = None) -> list[Check]:
    table = sample_and_evaluate(n, seed=seed, threads=threads)
    uppers = {"Delta333": cf.M_DELTA, "I6": cf.M_I6, "I9": cf.M_I9, "I12": cf.M_I12, "S_I": cf.M_S_INDEX}
    out = []
    for tag, target in LAST_BIN_PERCENT.items():
        pct = 100.0 * last_bin_fraction(histogram(table.values(tag), 100, uppers[tag]))
        out.append(
            Check(
                f"last-bin fraction {tag}",
                abs(pct - target) <= LAST_BIN_TOL_PP,
                f"{pct:.4f}%",
                f"{target}% +- {LAST_BIN_TOL_PP} pp",
            )
        )
    return out


def check_f2_f3() -> Check:
    s3 = math.sqrt(3.0) / 2
    worst, zero_ok = 0.0, True
    for a1, a2 in ((0.5, s3), (0.5, -s3), (-0.5, s3), (-0.5, -s3)):
        inv = cf.invariants_f2prime(a1, a2)
        got = (abs(inv.I6), abs(inv.I9), abs(inv.I12))
        worst = max(worst, *(abs(g - e) / e for g, e in zip(got, F2PRIME_MAGNITUDES)))
        zero_ok &= inv.Delta333 == 0
    f3 = max(abs(abs(cf.i6_f3prime(s)) - F3PRIME_ABS_I6) / F3PRIME_ABS_I6 for s in (1, -1))
    worst = max(worst, f3)
    return Check(
        "F2'/F3' critical values",
        worst <= 1e-10 and zero_ok,
        f"max rel err {worst:.1e}, Delta zero on F2': {zero_ok}",
        "rel <= 1e-10, Delta == 0",
    )


def chart_fd_gradient(obj, p, chart: int, h: float = 1e-6) -> np.ndarray:
    """Central differences of ``f`` along the free coordinates of a chart."""
    obj = objective(obj)
    x = np.asarray(p, dtype=float)
    w_sign = math.copysign(1.0, x[chart])
    free = np.delete(x, chart)
    out = []
    for u in range(2):
        vals = []
        for s in (h, -h):
            f2 = free.copy()
            f2[u] += s
            w = w_sign * math.sqrt(1.0 - float(f2 @ f2))
            vals.append(obj(np.insert(f2, chart, w)))
        out.append((vals[0] - vals[1]) / (2 * h))
    return np.array(out)


def check_gradients(n: int = 100, seed: int = 0) -> Check:
    worst, parts = 0.0, []
    for tag in ("I6", "I9", "I12", "Delta333", "S_I"):
        obj = objective(tag)
        err = 0.0
        for p in random_unit_triples(n, seed):
            chart = best_chart(p)
            g = implicit_gradient(obj, p, chart)
            fd = chart_fd_gradient(obj, p, chart)
            err = max(err, float(np.linalg.norm(g - fd) / np.linalg.norm(g)))
        parts.append(f"{tag} {err:.1e}")
        worst = max(worst, err)
    return Check("implicit gradient vs finite differences", worst <= 1e-5, ", ".join(parts), "rel <= 1e-5")


def _timed(fn: Callable, *args, **kwargs):
    t0 = time.perf_counter()
    res = fn(*args, **kwargs)
    dt = time.perf_counter() - t0
    for c in res if isinstance(res, list) else [res]:
        c.seconds = dt
    return res


def run_checks(quick: bool = False, threads: int | None = None, asset_path=None, seed: int = 0) -> list[Check]:
    """Run every check in order; ``quick`` skips the 500k-sample statistics."""
    checks = [
        _timed(check_asset, asset_path),
        _timed(check_named_table),
        _timed(check_maxdelta),
        _timed(check_optimizer, OptConfig(rng_seed=seed)),
        _timed(check_path_equivalence, seed=seed),
        _timed(check_combination, seed=seed),
        _timed(check_properties, seed=seed),
        _timed(check_psi1_ascent),
        _timed(check_f2_f3),
        _timed(check_gradients, seed=seed),
    ]
    if not quick:
        checks += _timed(check_sampling, seed=seed, threads=threads)
    return checks


def format_report(checks: list[Check]) -> str:
    lines = [c.line() for c in checks]
    n_ok = sum(c.passed for c in checks)
    lines.append(f"{n_ok}/{len(checks)} checks passed")
    return "\n".join(lines)
