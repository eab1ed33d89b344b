import json
import os
import subprocess
import sys

import pytest

from recoverability.harness import (
    TrialConfig,
    run_casebook,
    verify_dimbound,
    verify_fr,
    verify_theorem,
    verify_triangle,
    verify_winter,
)


@pytest.fixture(scope="module")
def winter_report():
    return verify_winter(TrialConfig(dims=(2, 2, 2), trials=25, seed=7))


class TestReportShape:
    def test_schema_version(self, winter_report):
        doc = json.loads(winter_report.to_json())
        assert doc["schema"] == 1

    def test_margins_carry_distribution(self, winter_report):
        for summary in winter_report.margins.values():
            assert {"min", "median", "count", "finite_count", "tolerance", "passed"} <= set(
                summary
            )
            assert summary["count"] >= 1

    def test_serializes_to_valid_json(self, winter_report):
        doc = json.loads(winter_report.to_json())
        assert doc["experiment"] == "winter"
        assert doc["passed"] is True

    def test_csv_rows(self, winter_report):
        rows = winter_report.csv_rows()
        assert rows[0] == ("experiment", "trial", "margin", "value")
        assert len(rows) > 25


class TestDeterminism:
    def test_same_seed_byte_identical(self):
        cfg = TrialConfig(dims=(2, 2, 2), trials=10, seed=3)
        a = verify_winter(cfg).canonical_json()
        b = verify_winter(cfg).canonical_json()
        assert a == b

    def test_different_seed_differs(self):
        a = verify_winter(TrialConfig(dims=(2, 2, 2), trials=10, seed=3)).canonical_json()
        b = verify_winter(TrialConfig(dims=(2, 2, 2), trials=10, seed=4)).canonical_json()
        assert a != b

    def test_thread_count_does_not_change_report(self):
        cfg = TrialConfig(dims=(2, 2, 2), trials=8, seed=5)
        sequential = verify_winter(cfg).canonical_json()
        os.environ["RECOVERABILITY_THREADS"] = "4"
        try:
            threaded = verify_winter(cfg).canonical_json()
        finally:
            del os.environ["RECOVERABILITY_THREADS"]
        assert sequential == threaded

    def test_casebook_deterministic(self):
        a = run_casebook("remark3", {"p": 0.875, "eps": 0.125}).canonical_json()
        b = run_casebook("remark3", {"p": 0.875, "eps": 0.125}).canonical_json()
        assert a == b


class TestFailureSemantics:
    def test_impossible_tolerance_dumps_instances(self):
        # a negative tolerance makes every margin fail: the suite must flag
        # failure and keep full instance dumps for replay
        cfg = TrialConfig(dims=(2, 2, 2), trials=4, seed=9,
                          tolerances={"linalg": -10.0})
        report = verify_winter(cfg)
        assert not report.passed
        assert report.failures
        dump = report.failures[0]["instance"]
        assert "state" in dump and "matrix" in dump["state"]

    def test_passing_trials_drop_instance_dumps(self, winter_report):
        for row in winter_report.trial_rows:
            assert "instance" not in row


class TestSuites:
    def test_theorem_small(self):
        report = verify_theorem(TrialConfig(dims=(2, 2, 2), trials=6, seed=2))
        assert report.passed
        assert report.quantities["solver_failures"] == 0
        assert report.quantities["max_lambda_gap"] <= 1e-6
        assert report.margins["recovery_lower_bound"]["min"] >= -1e-6
        assert report.margins["recovery_lower_bound_strong"]["min"] >= -1e-6

    def test_theorem_families_cycle(self):
        report = verify_theorem(TrialConfig(dims=(2, 2, 2), trials=6, seed=2))
        families = {row["family"] for row in report.trial_rows}
        assert families == {"stinespring", "petz", "mixture"}

    def test_triangle_small(self):
        report = verify_triangle(TrialConfig(dims=(2, 3, 4), trials=9, seed=2))
        assert report.passed
        assert report.margins["corner_mass_strict_gap_alpha_0.5"]["min"] > 0
        assert report.margins["binary_exchange_gap"]["min"] > 0

    def test_fr_small(self):
        report = verify_fr(TrialConfig(dims=(2, 2, 2), trials=4, seed=2))
        assert report.passed
        assert report.quantities["weight_defect"] <= 1e-10

    def test_dimbound_small(self):
        report = verify_dimbound(TrialConfig(dims=(2, 2, 2), trials=6, seed=2))
        assert report.passed
        assert (
            report.quantities["erased_copy_cmi_over_relent_n6"]
            > report.quantities["erased_copy_cmi_over_relent_n4"]
        )


class TestCasebookDispatch:
    def test_sec41(self):
        report = run_casebook("sec41", {"n": 4, "p": 0.5, "q": 0.0})
        assert report.passed
        assert report.quantities["enum_marginal_match_residual"] <= 1e-12

    def test_sec42_enumeration(self):
        report = run_casebook("sec42", {"n": 4, "p": 0.1})
        assert report.passed

    def test_sec42_closed_forms(self):
        report = run_casebook("sec42", {"alpha": 64.0})
        assert report.quantities["chain_holds"] is True

    def test_remark2(self):
        report = run_casebook("remark2", {"alpha": 0.5})
        assert report.passed
        assert report.quantities["triangle_violated"] is True

    def test_remark3_defaults(self):
        report = run_casebook("remark3", {})
        assert report.passed
        assert report.quantities["closed_dmax_ps"] == 1.0

    def test_antisym(self):
        report = run_casebook("antisym", {"d": 3})
        assert report.passed

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            run_casebook("nonsense", {})


class TestCli:
    def _run(self, *args):
        return subprocess.run(
            [sys.executable, "-m", "recoverability.cli", *args],
            capture_output=True, text=True,
        )

    def test_verify_writes_report_and_csv(self, tmp_path):
        out = tmp_path / "report.json"
        csv_path = tmp_path / "margins.csv"
        proc = self._run(
            "verify", "winter", "--dims", "2,2,2", "--trials", "5", "--seed", "1",
            "--out", str(out), "--csv", str(csv_path),
        )
        assert proc.returncode == 0, proc.stderr
        doc = json.loads(out.read_text())
        assert doc["experiment"] == "winter" and doc["passed"]
        assert csv_path.read_text().startswith("experiment,trial,margin,value")

    def test_casebook_exit_code(self, tmp_path):
        proc = self._run("casebook", "antisym", "--d", "3")
        assert proc.returncode == 0, proc.stderr

    def test_failing_suite_exits_nonzero(self):
        proc = self._run(
            "verify", "winter", "--trials", "3", "--seed", "1", "--tol", "linalg=-10",
        )
        assert proc.returncode == 1

    def test_tolerance_override_recorded(self, tmp_path):
        out = tmp_path / "r.json"
        proc = self._run(
            "verify", "winter", "--trials", "3", "--seed", "1",
            "--tol", "linalg=1e-5", "--out", str(out),
        )
        assert proc.returncode == 0
        doc = json.loads(out.read_text())
        assert doc["config"]["tolerances"]["linalg"] == 1e-5
        assert doc["margins"]["markov_relent_bound"]["tolerance"] == 1e-5

    def test_rejects_unknown_suite(self):
        proc = self._run("verify", "bogus")
        assert proc.returncode != 0
