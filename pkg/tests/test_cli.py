"""Tests for the command-line front end."""

import contextlib
import io
import json
import os
import tempfile
import unittest
from pathlib import Path

import numpy as np

from mabt.__main__ import main
from mabt.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, RunConfig, run, validate_run_config
from mabt.common.config import MPolicy
from mabt.io import render_json
from mabt.resampling import SeedSpec
from mabt.sim import CICaseConfig, run_coverage_experiment


def write_regression_csv(path: Path, n: int = 30, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    a, b, c = rng.standard_normal((3, n))
    y = 1.0 + 2.0 * a - 0.5 * b + rng.standard_normal(n)
    lines = ["y,a,b,c"] + [f"{y[i]:.10f},{a[i]:.10f},{b[i]:.10f},{c[i]:.10f}" for i in range(n)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class CliTestCase(unittest.TestCase):
    """Runs configurations with captured output."""

    def setUp(self) -> None:
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.csv = Path(tmp.name) / "data.csv"
        write_regression_csv(self.csv)

    def invoke(self, config: RunConfig) -> tuple[int, str, str]:
        out, err = io.StringIO(), io.StringIO()
        code = run(config, out, err)
        return code, out.getvalue(), err.getvalue()


class TestFit(CliTestCase):
    """fit subcommand."""

    def test_weights_on_simplex(self) -> None:
        """Every averaging method reports weights summing to one."""
        config = RunConfig("fit", input=str(self.csv), response="y", methods=("MMA", "BTMA"), B=20)
        code, out, err = self.invoke(config)
        self.assertEqual(code, EXIT_OK, err)
        payload = json.loads(out)
        self.assertEqual(payload["kind"], "fit")
        self.assertEqual(payload["n"], 30)
        self.assertEqual(payload["columns"], ["(Intercept)", "a", "b", "c"])
        for name in ("MMA", "BTMA"):
            self.assertAlmostEqual(sum(payload["methods"][name]["weights"]), 1.0, places=10)
        self.assertEqual(payload["models"][0], ["(Intercept)"])

    def test_unknown_method(self) -> None:
        """An unknown method exits 2 and names the token."""
        config = RunConfig("fit", input=str(self.csv), response="y", methods=("FOO",))
        code, out, err = self.invoke(config)
        self.assertEqual(code, EXIT_CONFIG)
        self.assertEqual(out, "")
        error = json.loads(err)
        self.assertEqual(error["error"], "ConfigError")
        self.assertIn("FOO", error["message"])

    def test_missing_file(self) -> None:
        """An unreadable input is a runtime failure."""
        config = RunConfig("fit", input=str(self.csv) + ".missing", response="y")
        code, _, err = self.invoke(config)
        self.assertEqual(code, EXIT_RUNTIME)
        self.assertIn("error", json.loads(err))

    def test_missing_response_column(self) -> None:
        """A response absent from the header is a data error."""
        code, _, err = self.invoke(RunConfig("fit", input=str(self.csv), response="z"))
        self.assertEqual(code, EXIT_RUNTIME)
        self.assertEqual(json.loads(err)["error"], "MissingColumn")

    def test_csv_format(self) -> None:
        """CSV output starts with the tidy header."""
        config = RunConfig("fit", input=str(self.csv), response="y", methods=("JMA",), format="csv")
        code, out, _ = self.invoke(config)
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out.startswith("method,metric,coef,value\n"))


class TestCi(CliTestCase):
    """ci subcommand."""

    def test_intervals_ordered(self) -> None:
        """Each interval has lower <= upper, by name or index."""
        config = RunConfig(
            "ci", input=str(self.csv), response="y", methods=("BTMA", "BMS"), coef=("a", "2"),
            m="15", B=20, U=40, level=0.9,
        )
        code, out, err = self.invoke(config)
        self.assertEqual(code, EXIT_OK, err)
        intervals = json.loads(out)["intervals"]
        self.assertEqual(len(intervals), 4)
        self.assertEqual({row["name"] for row in intervals}, {"a", "b"})
        for row in intervals:
            self.assertLessEqual(row["lower"], row["upper"])

    def test_unknown_coefficient(self) -> None:
        """A coefficient name not in the header is a config error."""
        config = RunConfig("ci", input=str(self.csv), response="y", coef=("zz",), B=5, U=5, m="15")
        code, _, err = self.invoke(config)
        self.assertEqual(code, EXIT_CONFIG)
        self.assertIn("zz", json.loads(err)["message"])


class TestSimulations(CliTestCase):
    """risk-sim and coverage-sim subcommands."""

    def test_coverage_matches_library(self) -> None:
        """The CLI report is the library report, byte for byte."""
        config = RunConfig(
            "coverage-sim", n=40, reps=2, methods=("JUST", "MMA"), m="20", B=5, U=20, seed=3
        )
        code, out, err = self.invoke(config)
        self.assertEqual(code, EXIT_OK, err)
        case = CICaseConfig(case=1, n=40, eta=0.5, reps=2, U=20, B=5, level=0.95,
                            m=MPolicy.parse("20"))
        expected = run_coverage_experiment(case, ["JUST", "MMA"], SeedSpec(3)).to_dict()
        self.assertEqual(out, render_json(expected))

    def test_risk_csv(self) -> None:
        """Risk output in CSV has the summary columns first."""
        config = RunConfig("risk-sim", n=30, reps=1, methods=("AIC",), B=5, format="csv")
        code, out, _ = self.invoke(config)
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out.startswith("method,metric,coef,value,mc_se,n_ok,n_failed"))
        self.assertEqual(len(out.strip().splitlines()), 3)

    def test_out_file(self) -> None:
        """--out writes the report to a file instead of stdout."""
        target = self.csv.parent / "risk.json"
        config = RunConfig("risk-sim", n=30, reps=1, methods=("BIC",), B=5, out=str(target))
        code, out, _ = self.invoke(config)
        self.assertEqual((code, out), (EXIT_OK, ""))
        self.assertEqual(json.loads(target.read_text(encoding="utf-8"))["kind"], "risk")


class TestThreadInvariance(CliTestCase):
    """Output does not depend on MABT_THREADS."""

    def with_threads(self, threads: str, config: RunConfig) -> str:
        previous = os.environ.get("MABT_THREADS")
        os.environ["MABT_THREADS"] = threads
        try:
            code, out, err = self.invoke(config)
        finally:
            if previous is None:
                del os.environ["MABT_THREADS"]
            else:
                os.environ["MABT_THREADS"] = previous
        self.assertEqual(code, EXIT_OK, err)
        return out

    def test_every_subcommand_byte_identical(self) -> None:
        """One and four workers write the same bytes for each subcommand."""
        data = dict(input=str(self.csv), response="y")
        configs = [
            RunConfig("fit", methods=("MMA", "BTMA", "Bag"), B=15, **data),
            RunConfig("ci", methods=("BTMA", "BMS"), coef=("a",), m="gcv:10,15", B=15, U=30,
                      **data),
            RunConfig("risk-sim", n=30, reps=3, methods=("BIC", "BTMA"), B=10, seed=2),
            RunConfig("coverage-sim", n=40, reps=3, methods=("BMS", "BTMA"), m="20", B=10,
                      U=20, seed=3),
            RunConfig("predict", methods=("MMA", "BTMA"), train_n=20, splits=4, B=10, **data),
        ]
        for config in configs:
            with self.subTest(subcommand=config.subcommand):
                self.assertEqual(self.with_threads("1", config), self.with_threads("4", config))


class TestValidation(unittest.TestCase):
    """Configuration checks."""

    def test_all_problems_reported(self) -> None:
        """Every problem appears, not only the first."""
        errors = validate_run_config(RunConfig("predict", B=0, level=1.5, m="lots"))
        joined = "\n".join(errors)
        for fragment in ("--input", "--response", "--train-n", "--B", "--level", "--m"):
            self.assertIn(fragment, joined)

    def test_ci_method_set(self) -> None:
        """ci only accepts interval methods."""
        errors = validate_run_config(
            RunConfig("ci", input="x.csv", response="y", coef=("a",), methods=("AIC",))
        )
        self.assertEqual(errors, ["unknown method 'AIC' for ci"])

    def test_unknown_subcommand(self) -> None:
        """An unknown subcommand exits 2."""
        err = io.StringIO()
        self.assertEqual(run(RunConfig("bogus"), io.StringIO(), err), EXIT_CONFIG)
        self.assertEqual(json.loads(err.getvalue())["error"], "UnknownSubcommand")

    def test_sim_needs_n(self) -> None:
        """Simulations need a sample size."""
        self.assertIn("risk-sim requires --n", validate_run_config(RunConfig("risk-sim")))

    def test_valid_defaults(self) -> None:
        """A complete configuration has no problems."""
        self.assertEqual(validate_run_config(RunConfig("coverage-sim", n=100)), [])


class TestMain(unittest.TestCase):
    """argparse entry point."""

    def test_version(self) -> None:
        """--version prints and exits 0."""
        out = io.StringIO()
        with contextlib.redirect_stdout(out), self.assertRaises(SystemExit) as ctx:
            main(["--version"])
        self.assertEqual(ctx.exception.code, 0)
        self.assertTrue(out.getvalue().startswith("mabt "))

    def test_end_to_end(self) -> None:
        """Flags reach the subcommand."""
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = main(["risk-sim", "--n", "30", "--reps", "1", "--methods", "AIC,BIC", "--B", "5"])
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out.getvalue())
        self.assertEqual(payload["methods"], ["AIC", "BIC"])
        self.assertEqual(payload["config"]["n"], 30)

    def test_unknown_subcommand_exit_code(self) -> None:
        """main returns 2 for an unknown subcommand."""
        with contextlib.redirect_stderr(io.StringIO()):
            self.assertEqual(main(["bogus"]), EXIT_CONFIG)


if __name__ == "__main__":
    unittest.main()
