import csv
import io
import json
import math
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest

from qutrit_invariants import closed_form as cf
from qutrit_invariants.cli import main
from qutrit_invariants.states import QutritState, named_state


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_semisimple_prints_i6(capsys):
    code, out, _ = run(capsys, "eval", "--semisimple", "0.70710678,-0.70710678,0")
    assert code == 0
    data = json.loads(out)
    assert f"{data['I6'][0]:.12f}" == f"{1 / 18:.12f}"
    assert data["path"] == "closed"


@pytest.mark.parametrize("triple", ["0.2,0.5,-0.6", "0.9,0.1,0.3", "-0.4,-0.3,0.8"])
def test_eval_paths_agree(capsys, triple):
    # the '=' form keeps a leading minus from reading as a flag
    _, closed, _ = run(capsys, "eval", f"--semisimple={triple}", "--path", "closed")
    _, matrix, _ = run(capsys, "eval", f"--semisimple={triple}", "--path", "matrix")
    c, m = json.loads(closed), json.loads(matrix)
    for key in ("I6", "I9", "I12", "Delta333"):
        np.testing.assert_allclose(m[key][0], c[key][0], rtol=1e-9)


def test_eval_zero_state_file(capsys, tmp_path):
    path = tmp_path / "zero.json"
    path.write_text(QutritState(np.zeros(27)).to_json())
    code, out, _ = run(capsys, "eval", str(path))
    data = json.loads(out)
    assert code == 0
    assert all(data[k] == [0.0, 0.0] for k in ("I6", "I9", "I12", "Delta333"))


def test_eval_csv_state_file(capsys, tmp_path):
    path = tmp_path / "a.csv"
    path.write_text(named_state("aharonov").to_csv())
    code, out, _ = run(capsys, "eval", str(path), "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0][0] == "I6_re"
    assert abs(float(rows[1][0])) == pytest.approx(1 / 18, rel=1e-12)


def test_eval_parse_error_exit_2(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"amplitudes": [[1, 0]]}')
    code, out, err = run(capsys, "eval", str(path))
    assert code == 2 and out == "" and "27" in err


def test_eval_closed_path_needs_semisimple(capsys, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(named_state("w").to_json())
    code, _, err = run(capsys, "eval", str(path), "--path", "closed")
    assert code == 2 and "--semisimple" in err


def test_eval_missing_input(capsys):
    assert run(capsys, "eval")[0] == 2


def test_invalid_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--bogus"])
    assert exc.value.code == 2


def test_no_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_named_aharonov(capsys):
    code, out, _ = run(capsys, "named", "aharonov")
    mags = json.loads(out)["magnitudes"]
    assert code == 0
    np.testing.assert_allclose(
        [mags["I6"], mags["I9"], mags["I12"]], [1 / 18, math.sqrt(6) / 3888, 1 / 7776], rtol=1e-9
    )
    assert mags["Delta333"] <= 1e-9 * cf.M_DELTA
    assert len(json.loads(out)["state"]["amplitudes"]) == 27


def test_named_w333_all_zero(capsys):
    _, out, _ = run(capsys, "named", "w333")
    assert all(v == 0 for v in json.loads(out)["magnitudes"].values())


def test_named_psi2(capsys):
    _, out, _ = run(capsys, "named", "psi2")
    assert json.loads(out)["magnitudes"]["Delta333"] == pytest.approx(7.889e-17, rel=5e-3)


def test_named_unknown_tag(capsys):
    code, out, err = run(capsys, "named", "nope")
    assert code == 2 and out == ""
    assert "aharonov" in err and "maxdelta" in err


def test_maximize(capsys):
    code, out, _ = run(capsys, "maximize", "--objective", "i9", "--restarts", "8")
    data = json.loads(out)
    assert code == 0 and data["seed"] == 0
    assert data["best_value"] == pytest.approx(cf.M_I9, rel=1e-6)


def test_maximize_verbose_trace(capsys):
    _, out, err = run(capsys, "maximize", "--objective", "i6", "--restarts", "2", "--verbose")
    assert len(json.loads(out)["restart_trace"]) == 2
    assert "best" in err


def test_sample_summary(capsys):
    code, out, _ = run(capsys, "sample", "--samples", "2000", "--seed", "4")
    data = json.loads(out)
    assert code == 0 and data["seed"] == 4
    assert set(data["objectives"]) == {"I6", "I9", "I12", "Delta333", "S_I"}


def test_sample_deterministic(capsys):
    a = run(capsys, "sample", "--samples", "300", "--kind", "table", "--format", "csv")[1]
    b = run(capsys, "sample", "--samples", "300", "--kind", "table", "--format", "csv", "--threads", "3")[1]
    assert a == b


def test_sample_histogram_csv(capsys):
    code, out, _ = run(
        capsys, "sample", "--samples", "500", "--objective", "delta", "--kind", "histogram",
        "--bins", "10", "--format", "csv",
    )
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["bin_lo", "bin_hi", "count"]
    assert sum(int(r[2]) for r in rows[1:]) == 500


def test_sample_auto_bins(capsys):
    code, out, _ = run(capsys, "sample", "--samples", "500", "--objective", "i6", "--kind", "histogram", "--bins", "auto")
    assert code == 0 and json.loads(out)["total"] == 500


def test_sample_histogram_needs_objective(capsys):
    assert run(capsys, "sample", "--samples", "10", "--kind", "histogram")[0] == 2


def test_sample_bad_bins():
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--bins", "1"])
    assert exc.value.code == 2


def test_grid_csv(capsys, tmp_path):
    out_path = tmp_path / "grid.csv"
    code, out, _ = run(capsys, "grid", "--objective", "i12", "--n-theta", "3", "--n-phi", "4", "--format", "csv", "--out", str(out_path))
    assert code == 0 and out == ""
    rows = list(csv.reader(io.StringIO(out_path.read_text())))
    assert rows[0] == ["theta", "phi", "a", "b", "c", "value"] and len(rows) == 13


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--quick", "--format", "json")
    data = json.loads(out)
    names = [c["name"] for c in data["checks"]]
    assert not any(n.startswith("last-bin") for n in names)
    by_name = {c["name"]: c["passed"] for c in data["checks"]}
    for exact in ("block asset checksum", "named-state table (matrix path)", "MaxDelta states reach the maximum",
                  "F2'/F3' critical values", "combination formula == factored Delta"):
        assert by_name[exact]
    assert code == (0 if data["passed"] else 1)


def test_verify_corrupted_asset_exits_1(capsys, tmp_path):
    text = resources.files("qutrit_invariants").joinpath("data", "adjoint_blocks.csv").read_text()
    lines = text.splitlines()
    bad = tmp_path / "blocks.csv"
    bad.write_text("\n".join(lines[:-1]) + "\n")
    code, out, _ = run(capsys, "verify", "--quick", "--blocks-asset", str(bad))
    assert code == 1
    assert "[FAIL] block asset checksum" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qutrit_invariants", "named", "ghz333", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("tag,absI6")
