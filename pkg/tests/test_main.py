import json
import os

import pytest

import config
from main import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, _vqe_config, build_parser, main
from subspace_code import SubspaceCode


def _json_output(capsys):
    return json.loads(capsys.readouterr().out)


def test_encode_rejects_dense_filling(capsys):
    assert main(["encode", "--modes", "3", "--electrons", "2"]) == EXIT_USAGE
    assert "M > 2N" in capsys.readouterr().err


def test_encode_writes_artifact(tmp_path, capsys):
    out = tmp_path / "code.json"
    assert main(["encode", "--modes", "4", "--electrons", "1", "--out", str(out), "--json"]) == EXIT_OK
    payload = _json_output(capsys)
    assert payload["qubits"] == 3 and payload["bound"] == 4
    assert SubspaceCode.load(str(out)).qubits == 3


def test_encode_at_impossible_q_fails(tmp_path):
    out = tmp_path / "code.json"
    args = ["encode", "--modes", "4", "--electrons", "2", "--qubits", "2", "--max-attempts", "20", "--out", str(out)]
    assert main(args) == EXIT_FAILURE
    assert not os.path.exists(out)


def test_bounds(capsys):
    assert main(["bounds", "--modes", "22", "--electrons", "2", "--json"]) == EXIT_OK
    payload = _json_output(capsys)
    assert payload["gv_qubits"] == 13
    assert payload["impossibility_qubits"] == 8


def test_fci_bundled_name(capsys):
    assert main(["fci", "--hamiltonian", "h2_sto3g", "--json"]) == EXIT_OK
    assert _json_output(capsys)["exact_energy"] == pytest.approx(-1.1372699, abs=1e-5)


def test_missing_hamiltonian_is_usage_error(tmp_path):
    assert main(["fci", "--hamiltonian", str(tmp_path / "missing.ham")]) == EXIT_USAGE


def test_groups_report(capsys, dimer_path):
    assert main(["groups", "--hamiltonian", dimer_path, "--json"]) == EXIT_OK
    payload = _json_output(capsys)
    assert payload["group_count"] <= payload["bound"] == 8


def test_decode_check(tmp_path, code_431):
    path = tmp_path / "code.json"
    code_431.save(str(path))
    assert main(["decode-check", "--code", str(path)]) == EXIT_OK


def test_selftest_commands():
    assert main(["selftest", "--modes", "4", "--electrons", "2", "--trials", "3", "--quiet"]) == EXIT_OK
    assert main(["selftest", "--modes", "4", "--electrons", "2", "--trials", "3", "--inject-sign-flip",
                 "--quiet"]) == EXIT_FAILURE


def test_vqe_on_identity_code(tmp_path, capsys, dimer_path):
    out = tmp_path / "result.json"
    trace = tmp_path / "trace.csv"
    args = ["vqe", "--hamiltonian", dimer_path, "--policy", "identity", "--layers", "0", "--restarts", "1",
            "--init-scale", "0", "--out", str(out), "--trace-csv", str(trace), "--json"]
    assert main(args) == EXIT_OK
    payload = _json_output(capsys)
    assert payload["qubits"] == 4
    assert payload["best_energy"] >= payload["exact_energy"] - 1e-9
    assert out.exists() and trace.exists()


def test_vqe_scan(capsys, dimer_path):
    args = ["vqe", "--hamiltonian", dimer_path, dimer_path, "--policy", "jw", "--layers", "0", "--restarts", "1",
            "--init-scale", "0", "--json"]
    assert main(args) == EXIT_OK
    points = _json_output(capsys)["points"]
    assert len(points) == 2 and points[0]["vqe_energy"] == points[1]["vqe_energy"]


def test_vqe_restart_modes():
    parser = build_parser()
    ci = _vqe_config(parser.parse_args(["vqe", "--hamiltonian", "x"]))
    bench = _vqe_config(parser.parse_args(["vqe", "--hamiltonian", "x", "--benchmark"]))
    pinned = _vqe_config(parser.parse_args(["vqe", "--hamiltonian", "x", "--benchmark", "--restarts", "2"]))
    assert ci.restarts == config.VQE_DEFAULT_RESTARTS == 5
    assert bench.restarts == config.VQE_BENCHMARK_RESTARTS == 30
    assert pinned.restarts == 2


def test_unknown_command_exits_with_usage():
    with pytest.raises(SystemExit) as excinfo:
        main(["frobnicate"])
    assert excinfo.value.code == 2
