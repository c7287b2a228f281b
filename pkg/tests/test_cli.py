import csv
import io
import math

import numpy as np
import pytest

from dcglearn.cli import EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, main
from dcglearn.config import InvalidConfigError, load_config, parse_values, read_config_text
from dcglearn.encoding import case_one_weights
from dcglearn.simulation import CSV_COLUMNS


def test_config_file_and_override(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(
        "# noisy run\nsetting = data2\nn_train = 20-60:20\nseeds = 0-2\npair_noise = 0,5\n"
        "c_grid = 0.1, 1\nlog_base = e\nmodel = base\n"
    )
    cfg = load_config(path, {"seeds": "4"})
    assert cfg.truth.setting == "data2"
    assert cfg.truth.log_base == math.e
    assert cfg.n_train == (20, 40, 60)
    assert cfg.seeds == (4,)
    assert cfg.pair_noise == (0, 5)
    assert cfg.c_grid == (0.1, 1.0)


def test_config_rejects_unknown_key():
    with pytest.raises(InvalidConfigError):
        parse_values(read_config_text("colour = blue\n"))


def test_config_rejects_bad_value():
    with pytest.raises(InvalidConfigError):
        load_config(None, {"n_test": "many"})
    with pytest.raises(InvalidConfigError):
        load_config(None, {"pair_mode": "sideways"})


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_writes_fixed_csv_schema(tmp_path, capsys):
    out = tmp_path / "rows.csv"
    code, _, err = run_cli(
        ["simulate", "--n-train", "20", "--seeds", "0,1", "--n-test", "100", "-o", str(out)], capsys
    )
    assert code == EXIT_OK
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 3
    assert "median precision" in err


def test_simulate_to_stdout_is_reproducible(capsys):
    args = ["simulate", "--n-train", "20", "--seeds", "5", "--n-test", "100", "--pair-noise", "2"]
    _, first, _ = run_cli(args, capsys)
    _, second, _ = run_cli(args, capsys)
    assert first == second
    record = next(csv.DictReader(io.StringIO(first)))
    assert record["noise_pairs"] == "2"


def test_simulate_invalid_config_exit_code(tmp_path, capsys):
    assert run_cli(["simulate", "--model", "bogus"], capsys)[0] == EXIT_CONFIG
    assert run_cli(["simulate", "--config", str(tmp_path / "missing.cfg")], capsys)[0] == EXIT_CONFIG


def test_solver_failure_exit_code(monkeypatch, capsys):
    from dcglearn import simulation
    from dcglearn.errors import ConvergenceError

    def boom(*args, **kwargs):
        raise ConvergenceError("stuck", objective=1.0)

    monkeypatch.setattr(simulation, "fit", boom)
    code, _, err = run_cli(["simulate", "--n-train", "5", "--seeds", "0", "--n-test", "10"], capsys)
    assert code == EXIT_SOLVER
    assert "seed=0" in err


def test_coherence_command_prints_witness(capsys):
    code, out, _ = run_cli(
        ["coherence", "--grades", "2,3,1", "--gains-a", "0.5,2,3", "--exponent", "3",
         "--discounts", "1.5,0.5", "--k", "2"],
        capsys,
    )
    assert code == EXIT_OK
    assert "coherent: False" in out
    assert "(1,3,2) vs (3,2,1)" in out
    assert "3.25 vs 2.25" in out and "12.0625 vs 13.6875" in out


def test_coherence_search_and_binary(capsys):
    code, out, _ = run_cli(
        ["coherence", "--grades", "2,3,1", "--gains-a", "0.5,2,3", "--search", "3",
         "--discounts", "1.5,0.5", "--k", "2"],
        capsys,
    )
    assert code == EXIT_OK and "smallest incoherent exponent" in out
    code, out, _ = run_cli(["coherence", "--binary", "10", "--n", "5", "--k", "3"], capsys)
    assert code == EXIT_OK and "no violation" in out


def test_coherence_usage_error(capsys):
    assert run_cli(["coherence", "--grades", "1,2"], capsys)[0] == EXIT_CONFIG


def test_factorize_flat_and_matrix(tmp_path, capsys):
    w = case_one_weights(np.arange(1.0, 6.0), 1 / np.log2(np.arange(2, 12)))
    flat = tmp_path / "w.csv"
    flat.write_text(",".join(f"{v:.17g}" for v in w.weights) + "\n")
    code, out, _ = run_cli(["factorize", "--input", str(flat), "--block-size", "5"], capsys)
    assert code == EXIT_OK
    lines = dict(line.split(",", 1) for line in out.strip().splitlines())
    assert float(lines["residual_ratio"]) < 1e-10
    assert len(lines["discounts_est"].split(",")) == 10

    matrix = tmp_path / "m.csv"
    np.savetxt(matrix, w.blocks().T, delimiter=",")
    code, out2, _ = run_cli(["factorize", "--input", str(matrix)], capsys)
    assert code == EXIT_OK and out2.splitlines()[0] == out.splitlines()[0]


def test_factorize_needs_block_size(tmp_path, capsys):
    flat = tmp_path / "w.csv"
    flat.write_text("1,2,3,4\n")
    assert run_cli(["factorize", "--input", str(flat)], capsys)[0] == EXIT_CONFIG


def test_plot_writes_svg(tmp_path, capsys):
    rows = tmp_path / "rows.csv"
    run_cli(["simulate", "--n-train", "10,20", "--seeds", "0,1", "--n-test", "50", "-o", str(rows)], capsys)
    svg = tmp_path / "fig.svg"
    assert run_cli(["plot", "--input", str(rows), "--output", str(svg)], capsys)[0] == EXIT_OK
    assert svg.read_text().lstrip().startswith("<?xml")
