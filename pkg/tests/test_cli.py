import json
import re

import pytest

from bb84sim.cli import (
    AGGREGATE_CSV_HEADER,
    TRIAL_CSV_HEADER,
    _f_grid,
    format_aggregate_csv,
    format_trials_csv,
    main,
    parse_aggregate_csv,
    parse_trials_csv,
)

SWEEP_FLAGS = [
    "sweep", "--f-step", "0.5", "--trials", "3", "--qubits", "400",
]


def run_cli(args, monkeypatch, tmp_path, capsys):
    monkeypatch.chdir(tmp_path)
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


# ---------------------------------------------------------------------------
# f grid


def test_f_grid_default_has_21_points():
    grid = _f_grid(0.0, 1.0, 0.05)
    assert len(grid) == 21
    assert grid[0] == 0.0
    assert grid[-1] == 1.0
    assert grid[6] == 0.3  # no floating-point crumbs after rounding


def test_f_grid_coarse_and_degenerate():
    assert _f_grid(0.0, 1.0, 0.5) == (0.0, 0.5, 1.0)
    assert _f_grid(0.25, 0.25, 0.1) == (0.25,)


# ---------------------------------------------------------------------------
# exit codes


def test_usage_errors_exit_1(monkeypatch, tmp_path, capsys):
    for argv in (
        [],
        ["not-a-command"],
        ["sweep", "--trials", "1"],
        ["sweep", "--f-step", "-0.1"],
        ["sweep", "--sample-fraction", "1.5"],
        ["trial", "--eve-fraction", "2.0"],
        ["ci", "--k", "5", "--n", "2"],
        ["ci", "--k", "1", "--n", "0"],
        ["ci", "--k", "1", "--n", "10", "--confidence", "1.0"],
        ["threshold", "--qber", "0.7"],
        ["threshold"],
    ):
        code, _, err = run_cli(argv, monkeypatch, tmp_path, capsys)
        assert code == 1, argv
        assert err.strip(), argv


def test_runtime_errors_exit_2(monkeypatch, tmp_path, capsys):
    # one transmitted qubit can never spare a comparison sample
    code, _, err = run_cli(["trial", "--qubits", "1"], monkeypatch, tmp_path, capsys)
    assert code == 2
    assert "increase n_qubits" in err


def test_success_exits_0(monkeypatch, tmp_path, capsys):
    code, _, _ = run_cli(["threshold", "--qber", "0.05"], monkeypatch, tmp_path, capsys)
    assert code == 0


# ---------------------------------------------------------------------------
# threshold and ci reports


def test_threshold_report_secure(monkeypatch, tmp_path, capsys):
    code, out, _ = run_cli(["threshold", "--qber", "0.05"], monkeypatch, tmp_path, capsys)
    assert code == 0
    assert "0.110028" in out
    assert "0.427206" in out
    assert "secure" in out


def test_threshold_report_insecure(monkeypatch, tmp_path, capsys):
    code, out, _ = run_cli(["threshold", "--qber", "0.25"], monkeypatch, tmp_path, capsys)
    assert code == 0
    assert "-0.622556" in out
    assert "insecure" in out


def test_threshold_near_root_rate_is_tiny(monkeypatch, tmp_path, capsys):
    _, out, _ = run_cli(["threshold", "--qber", "0.11"], monkeypatch, tmp_path, capsys)
    rate = float(re.search(r"key rate\s*:\s*(-?\d+\.\d+)", out).group(1))
    assert abs(rate) < 0.001


def test_ci_report_at_zero_errors(monkeypatch, tmp_path, capsys):
    code, out, _ = run_cli(["ci", "--k", "0", "--n", "100"], monkeypatch, tmp_path, capsys)
    assert code == 0
    assert "wald             [0.000000, 0.000000]" in out
    assert "0.036993" in out   # score interval upper bound
    assert "0.036217" in out   # exact interval upper bound
    assert "0.135810" in out   # concentration-bound half-width


def test_ci_report_brackets_the_midpoint(monkeypatch, tmp_path, capsys):
    _, out, _ = run_cli(["ci", "--k", "50", "--n", "100"], monkeypatch, tmp_path, capsys)
    bounds = re.findall(r"\[(\d\.\d{6}), (\d\.\d{6})\]", out)
    assert len(bounds) == 4
    for lo, hi in bounds:
        assert float(lo) <= 0.5 <= float(hi)


def test_ci_report_large_sample(monkeypatch, tmp_path, capsys):
    _, out, _ = run_cli(["ci", "--k", "6238", "--n", "25000"], monkeypatch, tmp_path, capsys)
    assert "point estimate = 0.249520" in out
    widths = [float(w) for w in re.findall(r"width (\d\.\d{6})", out)]
    assert len(widths) == 4
    assert widths[3] == max(widths)  # the distribution-free bound is widest


# ---------------------------------------------------------------------------
# trial report


def test_trial_clean_run(monkeypatch, tmp_path, capsys):
    code, out, _ = run_cli(
        ["trial", "--eve-fraction", "0", "--qubits", "50000"],
        monkeypatch, tmp_path, capsys,
    )
    assert code == 0
    assert "qber           : 0.000000" in out
    assert "decision       : PROCEED" in out
    assert "key rate       : 1.000000 (secure)" in out


def test_trial_under_full_attack(monkeypatch, tmp_path, capsys):
    code, out, _ = run_cli(
        ["trial", "--eve-fraction", "1.0"], monkeypatch, tmp_path, capsys
    )
    assert code == 0
    assert "decision       : ABORT" in out
    assert "insecure" in out


def test_trial_point_policy_flag(monkeypatch, tmp_path, capsys):
    _, out, _ = run_cli(
        ["trial", "--eve-fraction", "0", "--qubits", "2000", "--policy", "point"],
        monkeypatch, tmp_path, capsys,
    )
    assert "policy         : point" in out
    assert "qber used      : 0.000000" in out


def test_trial_is_deterministic(monkeypatch, tmp_path, capsys):
    argv = ["trial", "--eve-fraction", "0.5", "--qubits", "200", "--seed", "11"]
    _, first, _ = run_cli(argv, monkeypatch, tmp_path, capsys)
    _, second, _ = run_cli(argv, monkeypatch, tmp_path, capsys)
    assert first == second


def test_seed_env_var_overrides_default(monkeypatch, tmp_path, capsys):
    argv = ["trial", "--qubits", "1000"]
    monkeypatch.setenv("BB84SIM_SEED", "7")
    _, from_env, _ = run_cli(argv, monkeypatch, tmp_path, capsys)
    monkeypatch.delenv("BB84SIM_SEED")
    _, explicit, _ = run_cli(argv + ["--seed", "7"], monkeypatch, tmp_path, capsys)
    _, default, _ = run_cli(argv, monkeypatch, tmp_path, capsys)
    assert from_env == explicit
    assert from_env != default


def test_seed_flag_beats_env_var(monkeypatch, tmp_path, capsys):
    argv = ["trial", "--qubits", "1000", "--seed", "7"]
    monkeypatch.setenv("BB84SIM_SEED", "9999")
    _, with_env, _ = run_cli(argv, monkeypatch, tmp_path, capsys)
    monkeypatch.delenv("BB84SIM_SEED")
    _, without, _ = run_cli(argv, monkeypatch, tmp_path, capsys)
    assert with_env == without


def test_invalid_seed_env_var_is_a_usage_error(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("BB84SIM_SEED", "not-a-number")
    code, _, err = run_cli(["trial"], monkeypatch, tmp_path, capsys)
    assert code == 1
    assert "BB84SIM_SEED" in err


# ---------------------------------------------------------------------------
# sweep files


def test_sweep_writes_csv_with_exact_headers(monkeypatch, tmp_path, capsys):
    code, out, _ = run_cli(SWEEP_FLAGS, monkeypatch, tmp_path, capsys)
    assert code == 0
    trials_text = (tmp_path / "sweep_trials.csv").read_text()
    aggregate_text = (tmp_path / "sweep_aggregate.csv").read_text()
    assert trials_text.splitlines()[0] == TRIAL_CSV_HEADER
    assert aggregate_text.splitlines()[0] == AGGREGATE_CSV_HEADER
    assert len(trials_text.splitlines()) == 1 + 3 * 3
    assert len(aggregate_text.splitlines()) == 1 + 3


def test_sweep_stdout_table_matches_aggregate_file(monkeypatch, tmp_path, capsys):
    _, out, err = run_cli(SWEEP_FLAGS, monkeypatch, tmp_path, capsys)
    lines = out.strip().splitlines()
    assert lines[0].split() == AGGREGATE_CSV_HEADER.split(",")
    rows = parse_aggregate_csv((tmp_path / "sweep_aggregate.csv").read_text())
    assert len(lines) == 1 + len(rows)
    for line, row in zip(lines[1:], rows):
        cells = line.split()
        assert float(cells[0]) == row.f
        assert int(cells[1]) == row.trials
        assert float(cells[2]) == row.mean_qber
        assert float(cells[6]) == row.theory
    assert "wrote sweep_trials.csv" in err


def test_sweep_csv_round_trips_byte_identical(monkeypatch, tmp_path, capsys):
    run_cli(SWEEP_FLAGS + ["--out", "rt"], monkeypatch, tmp_path, capsys)
    trials_text = (tmp_path / "rt_trials.csv").read_text()
    aggregate_text = (tmp_path / "rt_aggregate.csv").read_text()
    assert format_trials_csv(parse_trials_csv(trials_text)) == trials_text
    assert format_aggregate_csv(parse_aggregate_csv(aggregate_text)) == aggregate_text


def test_sweep_repeat_runs_are_byte_identical(monkeypatch, tmp_path, capsys):
    run_cli(SWEEP_FLAGS + ["--out", "a"], monkeypatch, tmp_path, capsys)
    run_cli(SWEEP_FLAGS + ["--out", "b"], monkeypatch, tmp_path, capsys)
    assert (tmp_path / "a_trials.csv").read_bytes() == (tmp_path / "b_trials.csv").read_bytes()
    assert (tmp_path / "a_aggregate.csv").read_bytes() == (tmp_path / "b_aggregate.csv").read_bytes()


def test_sweep_workers_flag_is_invisible_in_output(monkeypatch, tmp_path, capsys):
    run_cli(SWEEP_FLAGS + ["--out", "w1", "--workers", "1"], monkeypatch, tmp_path, capsys)
    run_cli(SWEEP_FLAGS + ["--out", "w4", "--workers", "4"], monkeypatch, tmp_path, capsys)
    assert (tmp_path / "w1_trials.csv").read_bytes() == (tmp_path / "w4_trials.csv").read_bytes()
    assert (tmp_path / "w1_aggregate.csv").read_bytes() == (tmp_path / "w4_aggregate.csv").read_bytes()


def test_sweep_json_matches_csv_numerically(monkeypatch, tmp_path, capsys):
    run_cli(SWEEP_FLAGS + ["--out", "x"], monkeypatch, tmp_path, capsys)
    run_cli(SWEEP_FLAGS + ["--out", "x", "--format", "json"], monkeypatch, tmp_path, capsys)

    csv_rows = parse_trials_csv((tmp_path / "x_trials.csv").read_text())
    json_doc = json.loads((tmp_path / "x_trials.json").read_text())
    assert json_doc["schema"] == "trials"
    assert json_doc["columns"] == TRIAL_CSV_HEADER.split(",")
    assert len(json_doc["rows"]) == len(csv_rows)
    for jrow, crow in zip(json_doc["rows"], csv_rows):
        assert abs(jrow["f"] - crow.f) < 1e-12
        assert jrow["trial"] == crow.trial
        assert jrow["seed"] == crow.seed
        assert jrow["n_qubits"] == crow.n_qubits
        assert jrow["sifted_count"] == crow.sifted_count
        assert jrow["compared_n"] == crow.compared_n
        assert jrow["errors_k"] == crow.errors_k
        assert abs(jrow["qber"] - crow.qber) < 1e-12

    csv_agg = parse_aggregate_csv((tmp_path / "x_aggregate.csv").read_text())
    json_agg = json.loads((tmp_path / "x_aggregate.json").read_text())
    assert json_agg["schema"] == "aggregate"
    for jrow, crow in zip(json_agg["rows"], csv_agg):
        for field in ("f", "mean_qber", "std_dev", "ci_low", "ci_high", "theory"):
            assert abs(jrow[field] - getattr(crow, field)) < 1e-12
        assert jrow["trials"] == crow.trials


def test_sweep_f_step_produces_expected_rows(monkeypatch, tmp_path, capsys):
    _, out, _ = run_cli(SWEEP_FLAGS, monkeypatch, tmp_path, capsys)
    rows = parse_aggregate_csv((tmp_path / "sweep_aggregate.csv").read_text())
    assert [r.f for r in rows] == [0.0, 0.5, 1.0]


def test_sweep_trials_csv_seeds_are_reproducible(monkeypatch, tmp_path, capsys):
    from bb84sim.harness import derive_trial_seed

    run_cli(SWEEP_FLAGS, monkeypatch, tmp_path, capsys)
    rows = parse_trials_csv((tmp_path / "sweep_trials.csv").read_text())
    f_index = {0.0: 0, 0.5: 1, 1.0: 2}
    for row in rows:
        assert row.seed == derive_trial_seed(42, f_index[row.f], row.trial)
