"""Command-line behavior: exit codes, CSV artifacts, config handling.

Everything here drives ``cli.main`` in-process so stdout/stderr and exit
codes can be asserted exactly; one test goes through a real subprocess
to cover the module entry point.
"""

import contextlib
import io
import subprocess
import sys

import pytest

from clusterprep import cli, pham
from clusterprep.models import build_plaquette_3d, plaquette_ring_term
from clusterprep.pauli import OperatorSum, PauliString


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.main(list(argv))
    return code, out.getvalue(), err.getvalue()


def data_lines(text: str) -> list:
    # strip the header comment and the column row
    lines = text.splitlines()
    assert lines[0].startswith("# clusterprep")
    return lines[2:]


def test_version_flag():
    code, out, _ = run_cli("--version")
    assert code == 0
    assert "clusterprep" in out


def test_missing_command_is_usage_error():
    code, _, _ = run_cli()
    assert code == 2


# ------------------------------------------------------------------ verify

def test_verify_chain_reports_exact_zeros():
    code, out, _ = run_cli("verify", "--model", "1d", "--N", "4", "--lambda", "0.3")
    assert code == 0
    assert "check[0] residual = 0.0" in out
    assert "all 4 checks exactly conserved" in out


def test_verify_other_models():
    assert run_cli("verify", "--model", "2d", "--L1", "2", "--L2", "2", "--lambda", "0.5")[0] == 0
    assert run_cli("verify", "--model", "3d", "--lambda", "2.5")[0] == 0
    # the plaquette accepts four per-spin couplings
    assert run_cli("verify", "--model", "3d", "--lambda", "0.5,1,1.5,2")[0] == 0


def test_verify_rejects_coupling_list_for_chain():
    code, _, err = run_cli("verify", "--model", "1d", "--lambda", "0.1,0.2")
    assert code == 2
    assert "single --lambda" in err


def test_verify_rejects_short_chain():
    code, _, err = run_cli("verify", "--model", "1d", "--N", "2")
    assert code == 2
    assert "N >= 3" in err


def test_verify_custom_operator(tmp_path):
    _, ham = build_plaquette_3d(1.0, 1.5)
    good = tmp_path / "plaquette.pham"
    good.write_text(pham.serialize(ham))
    code, out, _ = run_cli("verify", "--model", "3d", "--hamiltonian", str(good))
    assert code == 0 and "exactly conserved" in out

    broken = ham + OperatorSum(4, [(0.25, PauliString.from_ops(4, {0: "Z"}))])
    bad = tmp_path / "broken.pham"
    bad.write_text(pham.serialize(broken))
    code, out, err = run_cli("verify", "--model", "3d", "--hamiltonian", str(bad))
    assert code == 1
    assert "conservation violated" in err
    assert "residual = 0.5" in out  # [Z0, XXXX] has 1-norm 2*0.25


def test_verify_operator_width_mismatch(tmp_path):
    f = tmp_path / "narrow.pham"
    f.write_text("qubits 3\n1 * Z0 Z1")
    code, _, err = run_cli("verify", "--model", "3d", "--hamiltonian", str(f))
    assert code == 2
    assert "acts on 3 qubits" in err


def test_verify_malformed_operator_file(tmp_path):
    f = tmp_path / "broken.pham"
    f.write_text("qubits 2\n1 Z0")
    code, _, err = run_cli("verify", "--model", "3d", "--hamiltonian", str(f))
    assert code == 2
    assert "line 2" in err


def test_verify_missing_operator_file():
    code, _, err = run_cli("verify", "--model", "3d", "--hamiltonian", "/nonexistent.pham")
    assert code == 2


# ---------------------------------------------------------------- spectrum

def test_spectrum_grid_row_count():
    code, out, _ = run_cli("spectrum", "--lambda-grid", "0:2.5:6")
    assert code == 0
    rows = data_lines(out)
    assert len(rows) == 6 * 16
    assert out.splitlines()[1] == "lambda_or_time,level,energy,sector,gap_global,gap_sector"


def test_spectrum_requires_exactly_one_source():
    code, _, err = run_cli("spectrum")
    assert code == 2 and "exactly one" in err
    code, _, err = run_cli("spectrum", "--lambda-grid", "1.0", "--path", "rampdown")
    assert code == 2 and "exactly one" in err


def test_spectrum_path_requirements():
    code, _, err = run_cli("spectrum", "--path", "rampdown")
    assert code == 2 and "--lambda0" in err
    code, _, err = run_cli("spectrum", "--path", "sequential")
    assert code == 2 and "--lambda-init" in err
    code, out, _ = run_cli(
        "spectrum", "--path", "sequential", "--lambda-init", "2.0", "--samples", "11"
    )
    assert code == 0
    assert len(data_lines(out)) == 11 * 16


def test_spectrum_output_file_is_atomic(tmp_path):
    target = tmp_path / "levels.csv"
    code, out, _ = run_cli("spectrum", "--lambda-grid", "1.0", "--output", str(target))
    assert code == 0 and out == ""
    text = target.read_text()
    assert text.startswith("# clusterprep")
    assert "output=" not in text.splitlines()[0]
    assert list(tmp_path.glob("*.tmp.*")) == []


def test_spectrum_static_replacement_matches_builtin(tmp_path):
    ring = tmp_path / "ring.pham"
    ring.write_text(pham.serialize(plaquette_ring_term(1.0)))
    _, base, _ = run_cli("spectrum", "--lambda-grid", "0:1.5:4")
    _, swapped, _ = run_cli(
        "spectrum", "--lambda-grid", "0:1.5:4", "--hamiltonian", str(ring)
    )
    # identical rows; only the header comment records the different flags
    assert base.splitlines()[1:] == swapped.splitlines()[1:]


# ------------------------------------------------------------------ evolve

EVOLVE_ARGS = ("--T", "0.5", "--lambda0", "1.0", "--tau", "0.5", "--tol", "1e-6", "--samples", "3")


def test_evolve_stdout_report():
    code, out, _ = run_cli("evolve", *EVOLVE_ARGS)
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "t,lambda,fidelity,w_plus,w_minus"
    assert len([l for l in lines[2:] if not l.startswith("#")]) == 3
    # on stdout the trailing report rides along as comments
    assert any(l.startswith("# fidelity = ") for l in lines)
    assert any(l.startswith("# e_zeta = ") for l in lines)


def test_evolve_output_file(tmp_path):
    target = tmp_path / "run.csv"
    code, out, _ = run_cli("evolve", *EVOLVE_ARGS, "--output", str(target))
    assert code == 0
    assert out.startswith("fidelity = ")  # report keeps stdout, unprefixed
    rows = data_lines(target.read_text())
    assert len(rows) == 3
    first = rows[0].split(",")
    assert float(first[0]) == 0.0 and float(first[1]) == 1.0


def test_evolve_requires_its_parameters():
    code, _, err = run_cli("evolve", "--T", "0.5")
    assert code == 2
    assert "missing required option" in err


def test_evolve_static_replacement_matches_builtin(tmp_path):
    ring = tmp_path / "ring.pham"
    ring.write_text(pham.serialize(plaquette_ring_term(1.0)))
    _, base, _ = run_cli("evolve", *EVOLVE_ARGS)
    _, swapped, _ = run_cli("evolve", *EVOLVE_ARGS, "--hamiltonian", str(ring))
    assert base.splitlines()[1:] == swapped.splitlines()[1:]


# ------------------------------------------------------------------- sweep

SWEEP_ARGS = ("--T", "0.5,0.1", "--lambda0", "1.0", "--tau", "1.0,0.5", "--tol", "1e-6")


def test_sweep_rows_are_sorted():
    code, out, _ = run_cli("sweep", *SWEEP_ARGS)
    assert code == 0
    rows = [line.split(",")[:3] for line in data_lines(out)]
    assert rows == [
        ["0.5", "1.0", "0.1"],
        ["0.5", "1.0", "0.5"],
        ["1.0", "1.0", "0.1"],
        ["1.0", "1.0", "0.5"],
    ]


def test_sweep_byte_identical_across_workers_and_runs(tmp_path):
    a, b, c = (tmp_path / name for name in ("a.csv", "b.csv", "c.csv"))
    assert run_cli("sweep", *SWEEP_ARGS, "--workers", "1", "--output", str(a))[0] == 0
    assert run_cli("sweep", *SWEEP_ARGS, "--workers", "2", "--output", str(b))[0] == 0
    assert run_cli("sweep", *SWEEP_ARGS, "--workers", "1", "--output", str(c))[0] == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    assert "workers=" not in a.read_text().splitlines()[0]


def test_sweep_cap():
    code, _, err = run_cli("sweep", *SWEEP_ARGS, "--cap", "3")
    assert code == 2
    assert "above the cap" in err


def test_grid_syntax_errors():
    assert run_cli("sweep", "--T", "", "--lambda0", "1", "--tau", "1")[0] == 2
    assert run_cli("sweep", "--T", "0.1:1.0", "--lambda0", "1", "--tau", "1")[0] == 2
    assert run_cli("sweep", "--T", "0.1", "--lambda0", "1", "--tau", "-1")[0] == 2
    assert run_cli("sweep", "--T", "0.1,,0.5", "--lambda0", "1", "--tau", "1")[0] == 2


# ------------------------------------------------------------------ config

def write_config(tmp_path, body: str):
    cfg = tmp_path / "run.ini"
    cfg.write_text(body)
    return str(cfg)


def test_config_supplies_required_options(tmp_path):
    cfg = write_config(
        tmp_path,
        "[sweep]\nT = 0.1\nlambda0 = 1.0\ntau = 0.5\ntol = 1e-6  # inline comment\n",
    )
    code, out, _ = run_cli("sweep", "--config", cfg)
    assert code == 0
    assert len(data_lines(out)) == 1


def test_config_flag_precedence(tmp_path):
    cfg = write_config(tmp_path, "[sweep]\nT = 0.1\nlambda0 = 1.0\ntau = 0.5\ntol = 1e-6\n")
    code, out, _ = run_cli("sweep", "--config", cfg, "--T", "0.2")
    assert code == 0
    assert data_lines(out)[0].split(",")[2] == "0.2"  # flag beat the file


def test_config_unknown_key(tmp_path):
    cfg = write_config(tmp_path, "[sweep]\nT = 0.1\nlambda0 = 1\ntau = 1\nbogus = 3\n")
    code, _, err = run_cli("sweep", "--config", cfg)
    assert code == 2
    assert "unknown key 'bogus'" in err


def test_config_missing_file():
    code, _, err = run_cli("sweep", "--config", "/does/not/exist.ini")
    assert code == 2
    assert "config file not found" in err


def test_config_bad_value(tmp_path):
    cfg = write_config(tmp_path, "[sweep]\nT = fast\nlambda0 = 1\ntau = 1\n")
    code, _, err = run_cli("sweep", "--config", cfg)
    assert code == 2
    assert "config key 't'" in err


def test_config_bad_boolean(tmp_path):
    cfg = write_config(
        tmp_path, "[phase-diagram]\nlambda0-grid = 1.0\ntau = 1.0\nno-evolution = maybe\n"
    )
    code, _, err = run_cli("phase-diagram", "--config", cfg)
    assert code == 2
    assert "must be a boolean" in err


# ---------------------------------------------------------- phase diagram

def test_phase_diagram_thresholds_and_empty_cells():
    code, out, err = run_cli(
        "phase-diagram", "--lambda0-grid", "2.5", "--tau", "5", "--no-evolution"
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "tau,lambda0,T_star,T_star_no_evolution"
    cells = lines[2].split(",")
    assert cells[0] == "5.0" and cells[1] == "2.5"
    assert float(cells[2]) == pytest.approx(1.0800931450767677, abs=1e-6)
    assert cells[3] == ""  # unevolved threshold below the bracket
    assert "no threshold in bracket for no-evolution" in err


def test_phase_diagram_bracket_flag():
    code, _, _ = run_cli("phase-diagram", "--lambda0-grid", "1", "--tau", "1", "--T-bracket", "2:1")
    assert code == 2


def test_module_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "clusterprep.cli", "--version"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert "clusterprep" in proc.stdout
