import numpy as np
import pytest

from fjnet.cli import main
from fjnet.core import FJModel, SusceptibilityProfile
from fjnet.dynamics import steady_state
from fjnet.fileio import (
    format_network,
    parse_network_text,
    parse_trajectory_text,
    write_text,
)
from fjnet.fixtures import cycle_network, random_connected_network


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def cycle_file(tmp_path):
    path = tmp_path / "cycle.network"
    write_text(path, format_network(cycle_network(4, 0.5)))
    return str(path)


@pytest.fixture
def example1_file(tmp_path, capsys):
    path = tmp_path / "ex1.schedule"
    assert main(["generate", "example1", "--out", str(path)]) == 0
    capsys.readouterr()
    return str(path)


class TestAnalyze:
    def test_cycle_report(self, capsys, cycle_file):
        code, out, _ = run(capsys, "analyze", cycle_file)
        assert code == 0
        assert "schur_stable: true" in out
        assert "rho: 0.8408964152537145" in out
        assert "rho_star: 0.8408964152537145" in out
        assert "prejudiced_agents: 1" in out
        assert "epsilon_0: 1" in out
        assert "delta_0: 0.5" in out
        assert "consensus_precondition: satisfied" in out

    def test_pure_averaging_network(self, capsys, tmp_path):
        model = random_connected_network(3, seed=4)
        degroot = FJModel(model.influence, SusceptibilityProfile([1.0] * 3), model.prejudice)
        path = tmp_path / "degroot.network"
        write_text(path, format_network(degroot))
        code, out, _ = run(capsys, "analyze", str(path))
        assert code == 0
        assert "not Schur stable" in out
        assert "rho_star" not in out
        assert "prejudiced_agents: none" in out
        assert "not applicable" in out

    def test_totally_prejudiced_network(self, capsys, tmp_path):
        model = random_connected_network(3, seed=5)
        pinned = FJModel(model.influence, SusceptibilityProfile([0.0] * 3), model.prejudice)
        path = tmp_path / "pinned.network"
        write_text(path, format_network(pinned))
        code, out, _ = run(capsys, "analyze", str(path))
        assert code == 0
        assert "rho: 0\n" in out
        assert "schur_stable: true" in out

    def test_parse_error_exit_code(self, capsys, tmp_path):
        path = tmp_path / "broken.network"
        path.write_text("n 2\nW\n1 0\n0.6 0.6\nlambda\n1 1\nu\n0 0\n")
        code, _, err = run(capsys, "analyze", str(path))
        assert code == 2
        assert "broken.network" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "analyze", str(tmp_path / "nope.network"))
        assert code == 2

    def test_jobs_batch(self, capsys, tmp_path, cycle_file):
        other = tmp_path / "other.network"
        write_text(other, format_network(random_connected_network(5, seed=6)))
        code, out, _ = run(capsys, "analyze", cycle_file, str(other), "--jobs", "2")
        assert code == 0
        assert out.count("network: ") == 2
        assert out.index(cycle_file) < out.index(str(other))

    def test_user_params_reported(self, capsys, cycle_file):
        code, out, _ = run(capsys, "analyze", cycle_file, "--delta", "0.5", "--eps", "1.0")
        assert code == 0
        assert "class_s: 3" in out


class TestSimulate:
    def test_converged_trajectory_file(self, capsys, tmp_path, cycle_file):
        out_path = tmp_path / "run.trajectory"
        code, _, _ = run(capsys, "simulate", cycle_file, "--x0", "u", "--out", str(out_path))
        assert code == 0
        data = parse_trajectory_text(out_path.read_text())
        assert data.converged
        model = cycle_network(4, 0.5)
        x_inf, _ = steady_state(model)
        np.testing.assert_allclose(data.limit, x_inf, atol=1e-8)

    def test_zero_steps_writes_only_x0(self, capsys, cycle_file):
        code, out, _ = run(capsys, "simulate", cycle_file, "--x0", "const:2.5", "--steps", "0")
        assert code == 0
        data = parse_trajectory_text(out)
        assert data.states.shape == (1, 4)
        np.testing.assert_array_equal(data.states[0], 2.5)

    def test_x0_values_and_file(self, capsys, tmp_path, cycle_file):
        code, out, _ = run(
            capsys, "simulate", cycle_file, "--x0", "values:1,0,0,0", "--steps", "3", "--tol", "0"
        )
        assert code == 0
        assert parse_trajectory_text(out).states[0].tolist() == [1, 0, 0, 0]
        seed_file = tmp_path / "x0.txt"
        seed_file.write_text("4 3 2 1\n")
        code, out, _ = run(
            capsys, "simulate", cycle_file, "--x0", f"file:{seed_file}", "--steps", "0"
        )
        assert code == 0
        assert parse_trajectory_text(out).states[0].tolist() == [4, 3, 2, 1]

    def test_bad_x0_source(self, capsys, cycle_file):
        code, _, err = run(capsys, "simulate", cycle_file, "--x0", "garbage:1")
        assert code == 2
        assert "x0" in err


class TestTvSimulate:
    def test_example1_oscillation(self, capsys, example1_file):
        code, out, _ = run(
            capsys, "tv-simulate", example1_file, "--x0", "values:0,1,0", "--steps", "100"
        )
        assert code == 0
        data = parse_trajectory_text(out)
        assert not data.converged
        assert data.detected_period == 2
        np.testing.assert_array_equal(data.states[100], [0, 1, 0])

    def test_constant_schedule_matches_simulate(self, capsys, tmp_path, cycle_file):
        model = cycle_network(4, 0.5)
        schedule_path = tmp_path / "constant.schedule"
        text = "n 4\nu\n0 0 0 0\nprefix 0\nperiod 1\nfile cycle.network\n"
        schedule_path.write_text(text)
        code, tv_out, _ = run(
            capsys,
            "tv-simulate", str(schedule_path),
            "--x0", "values:1,1,1,1", "--steps", "200", "--tol", "1e-10",
        )
        assert code == 0
        code, st_out, _ = run(
            capsys,
            "simulate", cycle_file,
            "--x0", "values:1,1,1,1", "--steps", "200", "--tol", "1e-10",
        )
        assert code == 0
        assert tv_out == st_out

    def test_finite_schedule_overrun(self, capsys, tmp_path):
        schedule_path = tmp_path / "finite.schedule"
        schedule_path.write_text(
            "n 2\nu\n0 0\nprefix 1\nlambda\n0.5 0.5\nW\n0.5 0.5\n0.5 0.5\nperiod 0\n"
        )
        code, _, err = run(capsys, "tv-simulate", str(schedule_path), "--steps", "5")
        assert code == 2
        assert "finite schedule" in err


class TestCertify:
    def test_example1_unknown_and_require_stable(self, capsys, example1_file):
        code, out, _ = run(
            capsys, "certify", example1_file, "--mode", "cfj",
            "--delta", "1.0", "--eps", "1.0", "--s", "3",
        )
        assert code == 0
        assert "verdict: unknown" in out
        code, _, _ = run(
            capsys, "certify", example1_file, "--mode", "cfj",
            "--delta", "1.0", "--eps", "1.0", "--s", "3", "--require-stable",
        )
        assert code == 3

    def test_example1_window_mode_unknown(self, capsys, example1_file):
        code, out, _ = run(
            capsys, "certify", example1_file, "--mode", "window", "--eps", "0.5", "--window", "2"
        )
        assert code == 0
        assert "verdict: unknown" in out
        assert "premise" in out

    def test_constant_stable_schedule(self, capsys, tmp_path, cycle_file):
        schedule_path = tmp_path / "constant.schedule"
        schedule_path.write_text("n 4\nu\n0 0 0 0\nprefix 0\nperiod 1\nfile cycle.network\n")
        code, out, _ = run(
            capsys, "certify", str(schedule_path), "--mode", "cfj",
            "--delta", "0.5", "--eps", "1.0", "--s", "3", "--require-stable",
        )
        assert code == 0
        assert "verdict: stable" in out
        assert "j_sets: {1} -> {1,2} -> {1,2,3} -> {1,2,3,4}" in out

    def test_non_periodic_is_input_error(self, capsys, tmp_path):
        schedule_path = tmp_path / "finite.schedule"
        schedule_path.write_text(
            "n 2\nu\n0 0\nprefix 1\nlambda\n0.5 0.5\nW\n0.5 0.5\n0.5 0.5\nperiod 0\n"
        )
        code, _, err = run(
            capsys, "certify", str(schedule_path), "--mode", "cfj",
            "--delta", "0.5", "--eps", "0.5", "--s", "0",
        )
        assert code == 2
        assert "periodic" in err

    def test_missing_mode_params(self, capsys, example1_file):
        code, _, err = run(capsys, "certify", example1_file, "--mode", "cfj")
        assert code == 2
        assert "--delta" in err


class TestGenerate:
    def test_cycle_round_trip(self, capsys):
        code, out, _ = run(capsys, "generate", "cycle", "--n", "5", "--delta", "0.25")
        assert code == 0
        network = parse_network_text(out)
        assert network.model.n == 5
        assert network.model.profile.values[0] == 0.75

    def test_random_is_seeded(self, capsys):
        code_a, out_a, _ = run(capsys, "generate", "random", "--n", "6", "--seed", "3")
        code_b, out_b, _ = run(capsys, "generate", "random", "--n", "6", "--seed", "3")
        code_c, out_c, _ = run(capsys, "generate", "random", "--n", "6", "--seed", "4")
        assert code_a == code_b == code_c == 0
        assert out_a == out_b != out_c

    def test_example2(self, capsys, tmp_path):
        path = tmp_path / "ex2.schedule"
        code, _, _ = run(capsys, "generate", "example2", "--out", str(path))
        assert code == 0
        assert "period 2" in path.read_text()
