import numpy as np
import pytest

from twofluid_dg import cli, dgsolver, sbp, state
from twofluid_dg.cli import load_snapshot, main, write_snapshot


def read_manifest(path):
    out = {}
    for line in path.read_text().splitlines():
        key, _, val = line.partition("=")
        out[key] = val
    return out


def test_run_tiny_case(tmp_path, capsys):
    rc = main(["run", "--case", "accuracy_forced", "--order", "1",
               "--cells", "8", "--t-final", "0.05", "--snapshots", "2",
               "--out", str(tmp_path / "o")])
    assert rc == 0
    out = tmp_path / "o"
    man = read_manifest(out / "manifest.txt")
    assert man["case"] == "accuracy_forced"
    assert man["cells"] == "8"
    assert (out / "final.txt").exists()
    assert (out / "timeseries.txt").exists()
    snaps = sorted(out.glob("snapshot_*.txt"))
    assert len(snaps) == 2


def test_timeseries_layout(tmp_path):
    main(["run", "--case", "accuracy_forced", "--order", "1", "--cells", "8",
          "--t-final", "0.05", "--out", str(tmp_path / "o")])
    lines = (tmp_path / "o" / "timeseries.txt").read_text().splitlines()
    meta = [l for l in lines if l.startswith("#")]
    assert any("case=accuracy_forced" in l for l in meta)
    header = next(l for l in lines if not l.startswith("#"))
    cols = header.split()
    assert cols[:4] == ["t", "dt", "total_fluid_entropy", "total_em_entropy"]
    assert "psi" in cols
    data = np.loadtxt([l for l in lines if not l.startswith("#")][1:])
    assert data.shape[1] == len(cols)
    # times start at 0 and increase
    assert data[0, 0] == 0.0
    assert np.all(np.diff(data[:, 0]) > 0)


def test_snapshot_roundtrip(tmp_path, params):
    mesh = dgsolver.uniform_mesh_1d(0.0, 1.0, 4)
    ops = sbp.build_operators(2)
    rng = np.random.default_rng(3)
    from conftest import random_primitives
    W = random_primitives(rng, 4 * 3).reshape(4, 3, 18)
    field = state.prim_to_cons(W, params)
    path = tmp_path / "snap.txt"
    write_snapshot(path, field, mesh, ops, params, {"t": "0.25", "case": "x"})
    meta, header, data = load_snapshot(path)
    assert meta["t"] == "0.25"
    assert header[0] == "x"
    assert data.shape == (12, 1 + 18 + 6)
    # full-precision round trip of the conserved block
    assert np.array_equal(data[:, 1:19], field.reshape(-1, 18))


def test_sweep_writes_convergence_table(tmp_path, capsys):
    rc = main(["sweep", "--case", "accuracy_forced", "--order", "1",
               "--cells", "8,16", "--out", str(tmp_path / "s")])
    assert rc == 0
    text = (tmp_path / "s" / "convergence.txt").read_text()
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert lines[0].split() == ["order", "N", "l1_error", "rate"]
    rows = [l.split() for l in lines[1:]]
    assert [r[1] for r in rows] == ["8", "16"]
    assert float(rows[1][3]) > 1.0  # observed rate on refinement


def test_usage_errors_exit_1(capsys):
    assert main(["run", "--case", "nope"]) == 1
    assert main(["run"]) == 1
    assert main(["sweep", "--case", "brio_wu"]) == 1  # no exact solution
    assert main(["run", "--case", "brio_wu", "--order", "7"]) == 1


def test_invalid_cfl_exit_1(tmp_path):
    rc = main(["run", "--case", "accuracy_forced", "--order", "1",
               "--cells", "8", "--cfl", "2.0", "--out", str(tmp_path / "o")])
    assert rc == 1


def test_runtime_failure_exit_2(tmp_path):
    # far above the stable CFL the shock tube loses admissibility and the
    # driver reports a runtime failure
    rc = main(["run", "--case", "brio_wu", "--order", "1", "--cells", "50",
               "--cfl", "0.95", "--t-final", "0.1",
               "--out", str(tmp_path / "o")])
    assert rc == 2


def test_verify_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "suites passed" in out
    assert "FAIL" not in out


def test_config_file_fills_defaults(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("[accuracy_forced]\ncells = 8\norder = 1\nt_final = 0.05\n")
    rc = main(["run", "--case", "accuracy_forced", "--config", str(cfg),
               "--out", str(tmp_path / "o")])
    assert rc == 0
    man = read_manifest(tmp_path / "o" / "manifest.txt")
    assert man["cells"] == "8"
    assert man["order"] == "1"


def test_config_does_not_override_cli(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("[accuracy_forced]\ncells = 64\norder = 1\nt_final = 0.05\n")
    rc = main(["run", "--case", "accuracy_forced", "--cells", "8",
               "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert rc == 0
    man = read_manifest(tmp_path / "o" / "manifest.txt")
    assert man["cells"] == "8"


def test_missing_config_is_usage_error(tmp_path):
    rc = main(["run", "--case", "accuracy_forced",
               "--config", str(tmp_path / "absent.cfg")])
    assert rc == 1
