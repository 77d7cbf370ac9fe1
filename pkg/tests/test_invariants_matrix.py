import math
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qutrit_invariants import closed_form as cf
from qutrit_invariants.invariant_set import InvariantSet, hyperdet_from_fundamentals
from qutrit_invariants.invariants_matrix import (
    DIM,
    abs_hyperdet_fast,
    build_adjoint,
    fundamental_invariants,
    fundamental_invariants_batch,
    hyperdet,
    load_blocks,
    power_trace,
    strassen_det,
    strassen_matrix,
    verify_block_asset,
)
from qutrit_invariants.states import (
    QutritState,
    apply_slocc,
    named_state,
    permute_parties,
    semisimple_to_tensor,
)
from qutrit_invariants.verify import random_unimodular


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(1234)


def random_state(rng):
    z = rng.standard_normal(27) + 1j * rng.standard_normal(27)
    return z / np.linalg.norm(z)


def test_packaged_asset_checksum():
    ok, msg = verify_block_asset()
    assert ok, msg


def test_corrupted_asset_detected(tmp_path):
    text = resources.files("qutrit_invariants").joinpath("data", "adjoint_blocks.csv").read_text()
    lines = text.splitlines()
    fields = lines[1].split(",")
    fields[3] = str(int(fields[3]) + 1)  # bump one numerator
    lines[1] = ",".join(fields)
    bad = tmp_path / "blocks.csv"
    bad.write_text("\n".join(lines) + "\n")
    ok, msg = verify_block_asset(bad)
    assert not ok
    assert "digest" in msg or "count" in msg


def test_dropped_entry_detected(tmp_path):
    text = resources.files("qutrit_invariants").joinpath("data", "adjoint_blocks.csv").read_text()
    lines = text.splitlines()
    bad = tmp_path / "blocks.csv"
    bad.write_text("\n".join(lines[:1] + lines[2:]) + "\n")
    ok, msg = verify_block_asset(bad)
    assert not ok and "nonzero count" in msg


def test_unreadable_asset(tmp_path):
    ok, msg = verify_block_asset(tmp_path / "missing.csv")
    assert not ok


def test_adjoint_shape_and_grading(rng):
    K = build_adjoint(random_state(rng)).dense()
    assert K.shape == (DIM, DIM)
    # only the three off-diagonal cyclic blocks are populated
    for r0, r1 in [(0, 24), (24, 51), (51, 78)]:
        assert not np.any(K[r0:r1, r0:r1])


def test_cube_blocks_match_dense_cube(rng):
    K = build_adjoint(random_state(rng))
    D = K.dense()
    K3 = D @ D @ D
    blocks = K.cube_blocks()
    np.testing.assert_allclose(K3[:24, :24], blocks[0], atol=1e-12)
    np.testing.assert_allclose(K3[24:51, 24:51], blocks[1], atol=1e-12)
    np.testing.assert_allclose(K3[51:, 51:], blocks[2], atol=1e-12)


@pytest.mark.parametrize("p", [1, 2, 3, 4, 5, 7, 8, 9])
def test_vanishing_power_traces(rng, p):
    K = build_adjoint(random_state(rng))
    assert abs(power_trace(K, p)) <= 1e-10


def test_power_trace_matches_dense(rng):
    K = build_adjoint(random_state(rng))
    D = K.dense()
    for p in (6, 12):
        dense = np.trace(np.linalg.matrix_power(D, p))
        np.testing.assert_allclose(power_trace(K, p), dense, rtol=1e-10)
        np.testing.assert_allclose(power_trace(D, p), dense, rtol=1e-10)


def test_power_trace_range():
    K = build_adjoint(named_state("ghz333"))
    with pytest.raises(ValueError):
        power_trace(K, 0)


def test_strassen_matrix_shape_and_det():
    z = named_state("aharonov")
    S = strassen_matrix(z)
    assert S.shape == (9, 9)
    assert strassen_det(z) == pytest.approx(np.linalg.det(S))


def test_raw_traces_on_ghz():
    inv = fundamental_invariants(named_state("ghz333"))
    np.testing.assert_allclose(inv.g6, -108 / 27, rtol=1e-12)


@pytest.mark.parametrize(
    "tag, expected",
    [
        ("ghz333", (1 / 27, 0, 0, 0)),
        ("aharonov", (1 / 18, math.sqrt(6) / 3888, 1 / 7776, 0)),
        ("d3_111", (1 / 27, 0, 1 / 23328, 0)),
        ("d3_3", (1 / 125, 0, 1 / 500000, 0)),
    ],
)
def test_named_magnitudes(tag, expected):
    mags = fundamental_invariants(named_state(tag)).magnitudes()
    np.testing.assert_allclose(list(mags.values()), expected, rtol=1e-9, atol=1e-17)


@pytest.mark.parametrize("tag", ["w", "w333", "psi3", "d3_2"])
def test_nilpotent_states_vanish(tag):
    inv = fundamental_invariants(named_state(tag))
    np.testing.assert_allclose(inv.as_array(), 0, atol=1e-15)


@pytest.mark.parametrize("tag, value", [("psi1", 6.243e-16), ("psi2", 7.889e-17)])
def test_transcribed_states_near_table(tag, value):
    assert abs(hyperdet(named_state(tag))) == pytest.approx(value, rel=5e-3)


def test_zero_state():
    inv = fundamental_invariants(np.zeros(27))
    assert np.all(inv.as_array() == 0)


def test_f3prime_state_matches_closed_value():
    for sign in (1, -1):
        inv = fundamental_invariants(named_state("f3prime", sign))
        np.testing.assert_allclose(inv.I6.real, cf.i6_f3prime(sign), rtol=1e-10)
        np.testing.assert_allclose([inv.I9, inv.I12, inv.Delta333], 0, atol=1e-15)


def test_f2prime_state_uses_adjoint_normalisation():
    a1, a2 = 0.6, 0.8
    inv = fundamental_invariants(named_state("f2prime", a1, a2))
    ref = cf.invariants_f2prime(a1, a2, zeta9=cf.ZETA9_ADJOINT)
    np.testing.assert_allclose(inv.I6, ref.I6, rtol=1e-10)
    np.testing.assert_allclose(abs(inv.I9), abs(ref.I9), rtol=1e-10)
    np.testing.assert_allclose(inv.I12, ref.I12, rtol=1e-10)
    assert abs(inv.Delta333) <= 1e-24


def test_slocc_invariance(rng):
    z = random_state(rng)
    base = fundamental_invariants(z)
    s = QutritState.from_vector(z)
    for _ in range(10):
        moved = apply_slocc(s, *(random_unimodular(rng) for _ in range(3)), strict=True)
        np.testing.assert_allclose(fundamental_invariants(moved).as_array(), base.as_array(), rtol=1e-7)


def test_party_permutation(rng):
    s = QutritState.from_vector(random_state(rng))
    base = fundamental_invariants(s)
    swapped = fundamental_invariants(permute_parties(s, (1, 0, 2)))
    # odd permutations flip the sign of I9 only
    np.testing.assert_allclose(swapped.I6, base.I6, rtol=1e-10)
    np.testing.assert_allclose(swapped.I9, -base.I9, rtol=1e-10)
    np.testing.assert_allclose(swapped.I12, base.I12, rtol=1e-10)


def test_batch_matches_single(rng):
    Z = np.array([random_state(rng) for _ in range(5)])
    batch = fundamental_invariants_batch(Z)
    for n, z in enumerate(Z):
        inv = fundamental_invariants(z)
        for key in ("I6", "I9", "I12", "Delta333"):
            np.testing.assert_allclose(batch[key][n], getattr(inv, key), rtol=1e-10)


def test_fast_abs_hyperdet(rng):
    z = random_state(rng)
    assert abs_hyperdet_fast(z) == pytest.approx(abs(hyperdet(z)), rel=1e-10)


def test_custom_asset_loads_same_blocks():
    path = resources.files("qutrit_invariants").joinpath("data", "adjoint_blocks.csv")
    asset = load_blocks(path)
    inv = fundamental_invariants(named_state("aharonov"), asset)
    assert abs(inv.I6) == pytest.approx(1 / 18, rel=1e-12)


coef = st.floats(-1, 1, allow_nan=False, allow_infinity=False)


@given(coef, coef, coef)
@settings(max_examples=40, deadline=None)
def test_semisimple_path_agreement(a, b, c):
    inv = fundamental_invariants(semisimple_to_tensor((a, b, c)))
    scale = max(abs(a), abs(b), abs(c))
    np.testing.assert_allclose(inv.I6.real, cf.i6_ss(a, b, c), rtol=1e-9, atol=1e-13 * scale**6)
    np.testing.assert_allclose(inv.I9.real, cf.i9_ss(a, b, c), rtol=1e-9, atol=1e-14 * scale**9)
    np.testing.assert_allclose(inv.I12.real, cf.i12_ss(a, b, c), rtol=1e-9, atol=1e-15 * scale**12)


def test_invariant_set_serialization():
    inv = fundamental_invariants(named_state("aharonov"))
    back = InvariantSet.from_dict(inv.to_dict())
    assert back == inv
    header, row = inv.to_csv().splitlines()
    assert header.startswith("I6_re,I6_im")
    assert len(row.split(",")) == 14


def test_hyperdet_from_fundamentals_is_polynomial():
    assert hyperdet_from_fundamentals(1.0, 0.0, 0.0) == 0.0
    assert hyperdet_from_fundamentals(0.0, 1.0, 0.0) == 108.0
    assert hyperdet_from_fundamentals(0.0, 0.0, 1.0) == -32.0
