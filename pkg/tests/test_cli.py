import json
import math
import subprocess
import sys

import pytest


def run_cli(*args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "corrtherm.cli", *args],
        capture_output=True,
        text=True,
        **kwargs,
    )


class TestEntropyCommand:
    def test_uniform_shannon(self):
        r = run_cli(
            "entropy",
            "--input",
            '{"probs": [0.25, 0.25, 0.25, 0.25]}',
            "--alpha-grid",
            "1",
        )
        assert r.returncode == 0
        header, row = r.stdout.strip().splitlines()
        assert header == "alpha,entropy"
        assert float(row.split(",")[1]) == pytest.approx(math.log(4), abs=1e-10)

    def test_three_level_ordering_below_one_third(self):
        def h(probs):
            r = run_cli(
                "entropy",
                "--input",
                json.dumps({"probs": probs}),
                "--backend",
                "rational",
                "--alpha-grid",
                "0.25",
                "--format",
                "json",
            )
            assert r.returncode == 0
            return float(json.loads(r.stdout)[0]["entropy"])

        # the initial state has the larger order-1/3 entropy even though
        # its Shannon entropy is smaller
        assert h(["91/100", "1/20", "1/25"]) > h(["17/20", "7/50", "1/100"])

    def test_gibbs_free_energy_constant(self):
        r = run_cli(
            "entropy",
            "--input",
            '{"probs": ["2/3", "1/3"]}',
            "--ctx",
            '{"energies": [0, 0.6931471805599453]}',
            "--backend",
            "rational",
            "--alpha-grid",
            "0,0.5,1,2,inf",
            "--format",
            "json",
        )
        assert r.returncode == 0
        rows = json.loads(r.stdout)
        log_z = math.log(1.5)
        for row in rows:
            assert float(row["free_energy"]) == pytest.approx(-log_z, abs=1e-9)

    def test_parse_error_exit_one(self):
        r = run_cli("entropy", "--input", "{not json")
        assert r.returncode == 1


class TestCheckCommand:
    def test_thermo_feasible(self):
        r = run_cli(
            "check",
            "thermo",
            "--input",
            json.dumps(
                {
                    "p": ["3/4", "1/4"],
                    "q": ["2/3", "1/3"],
                    "ctx": {"energies": [0, 0.6931471805599453]},
                }
            ),
            "--backend",
            "rational",
        )
        assert r.returncode == 0
        assert json.loads(r.stdout)["feasible"] is True

    def test_thermo_infeasible(self):
        r = run_cli(
            "check",
            "thermo",
            "--input",
            json.dumps(
                {
                    "p": ["2/3", "1/3"],
                    "q": ["3/4", "1/4"],
                    "ctx": {"energies": [0, 0.6931471805599453]},
                }
            ),
            "--backend",
            "rational",
        )
        assert r.returncode == 2

    def test_trumping_and_correlated_disagree(self):
        payload = json.dumps(
            {"p": ["91/100", "1/20", "1/25"], "q": ["17/20", "7/50", "1/100"]}
        )
        r_trump = run_cli("check", "trumping", "--input", payload, "--backend", "rational")
        assert r_trump.returncode == 2
        r_corr = run_cli("check", "correlated", "--input", payload, "--backend", "rational")
        assert r_corr.returncode == 0
        cert = json.loads(r_corr.stdout)
        assert cert["feasible"] is True
        assert float(cert["min_balance"]) > 0


class TestMinworkCommand:
    def test_builtin_uncorrelated(self):
        r = run_cli("minwork", "nocatalyst")
        assert r.returncode == 0
        val = float(json.loads(r.stdout)["min_work"])
        assert val == pytest.approx(math.log(1.5), abs=1e-5)

    def test_equal_states_cost_nothing(self):
        r = run_cli(
            "minwork",
            "nocatalyst",
            "--input",
            json.dumps(
                {
                    "p": ["2/3", "1/3"],
                    "q": ["2/3", "1/3"],
                    "ctx": {"energies": [0, 0.6931471805599453]},
                }
            ),
        )
        assert r.returncode == 0
        assert float(json.loads(r.stdout)["min_work"]) == 0.0


class TestFigureCommand:
    def test_fig3_outputs(self, tmp_path):
        r = run_cli("figure", "fig3", "--out", str(tmp_path))
        assert r.returncode == 0
        csv = (tmp_path / "fig3.csv").read_text()
        assert csv.splitlines()[0] == "alpha,balance,limit"
        assert (tmp_path / "fig3.png").stat().st_size > 0
        # every sampled balance is nonnegative
        for line in csv.splitlines()[1:]:
            assert float(line.split(",")[1]) >= 0.0

    def test_fig5_outputs(self, tmp_path):
        r = run_cli("figure", "fig5", "--out", str(tmp_path))
        assert r.returncode == 0
        lines = (tmp_path / "fig5.csv").read_text().splitlines()
        assert lines[0] == "curve,x,y"
        names = {line.split(",")[0] for line in lines[1:]}
        assert names == {"initial", "target"}
        assert (tmp_path / "fig5.png").stat().st_size > 0

    def test_byte_stable(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli("figure", "fig3", "--out", str(a))
        run_cli("figure", "fig3", "--out", str(b))
        assert (a / "fig3.csv").read_bytes() == (b / "fig3.csv").read_bytes()

    def test_unknown_name_exit_one(self, tmp_path):
        r = run_cli("figure", "fig9", "--out", str(tmp_path))
        assert r.returncode == 1
