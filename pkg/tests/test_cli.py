"""Tests for CLI commands."""

import csv
import io
import json
import math
import os
import tempfile
import unittest
from unittest.mock import patch

from click.testing import CliRunner

from wfext import cli as cli_module
from wfext.enums import OperatorKind, OutputFormat, Subcommand
from wfext.errors import ArgumentError
from wfext.polyalg import MultiPoly
from wfext.simplex import Face


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


class CLITestCase(unittest.TestCase):
    """Unit tests for the wfext click CLI."""

    def setUp(self):
        self.runner = CliRunner()
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def write(self, name, content):
        path = os.path.join(self.directory.name, name)
        with open(path, "w", encoding="utf-8") as file:
            file.write(content if isinstance(content, str) else json.dumps(content))
        return path

    def edge_condition(self):
        return self.write("fc.json", {"strata": [{"face": [0, 1], "poly": "p0 p1"}]})

    def test_eigen_lists_the_edge_spectrum(self):
        result = self.runner.invoke(cli_module.cli, ["eigen", "--alleles", "2", "--degree", "5"])

        self.assertEqual(result.exit_code, 0, msg=result.output)
        self.assertEqual([row["kappa"] for row in rows_of(result.output)], ["1", "3", "6", "10"])

    def test_eigen_json(self):
        result = self.runner.invoke(
            cli_module.cli, ["eigen", "--alleles", "3", "--degree", "3", "--face", "0,2", "--format", "json"]
        )

        self.assertEqual(result.exit_code, 0, msg=result.output)
        document = json.loads(result.output)
        self.assertEqual(document["face"], [0, 2])
        self.assertEqual([pair["kappa"] for pair in document["eigenpairs"]], ["1", "3"])

    def test_forward_eigenpairs(self):
        result = self.runner.invoke(
            cli_module.cli, ["eigen", "--alleles", "2", "--degree", "2", "--operator", "forward"]
        )

        self.assertEqual(result.exit_code, 0, msg=result.output)
        self.assertEqual([row["kappa"] for row in rows_of(result.output)], ["1", "3", "6"])

    def test_too_few_alleles_is_a_usage_error(self):
        result = self.runner.invoke(cli_module.cli, ["eigen", "--alleles", "0"])

        self.assertEqual(result.exit_code, cli_module.USAGE_EXIT)

    def test_missing_alleles_is_a_usage_error(self):
        result = self.runner.invoke(cli_module.cli, ["eigen"])

        self.assertEqual(result.exit_code, cli_module.USAGE_EXIT)

    def test_unknown_flag_is_a_usage_error(self):
        result = self.runner.invoke(cli_module.cli, ["eigen", "--alleles", "2", "--colour"])

        self.assertEqual(result.exit_code, cli_module.USAGE_EXIT)

    def test_computation_error_exit_status(self):
        result = self.runner.invoke(cli_module.cli, ["eigen", "--alleles", "3", "--face", "1"])

        self.assertEqual(result.exit_code, cli_module.COMPUTATION_EXIT)

    def test_stationary_emits_the_coordinate(self):
        result = self.runner.invoke(cli_module.cli, ["stationary", "--alleles", "3", "--vertex-values", "1,0,0"])

        self.assertEqual(result.exit_code, 0, msg=result.output)
        rows = {row["face"]: row for row in rows_of(result.output)}
        self.assertEqual(rows["{0,1,2}"]["solution"], "p0")
        self.assertEqual(rows["{1,2}"]["solution"], "0")
        self.assertEqual(rows["{0}"]["stem_check"], "")
        self.assertTrue(all(row["stem_check"] == "pass" for face, row in rows.items() if "," in face))

    def test_stationary_needs_one_value_per_vertex(self):
        result = self.runner.invoke(cli_module.cli, ["stationary", "--alleles", "3", "--vertex-values", "1,0"])

        self.assertEqual(result.exit_code, cli_module.USAGE_EXIT)

    def test_solve_evaluates_barycenters(self):
        result = self.runner.invoke(
            cli_module.cli, ["solve", "--alleles", "2", "--degree", "4", "--final", self.edge_condition(), "--times=-1,0"]
        )

        self.assertEqual(result.exit_code, 0, msg=result.output)
        self.assertEqual(result.output.splitlines()[0], "face,point,t,value")
        rows = rows_of(result.output)
        values = {(row["face"], float(row["t"])): float(row["value"]) for row in rows}
        self.assertAlmostEqual(values[("{0,1}", -1.0)], 0.25 * math.exp(-1))
        self.assertAlmostEqual(values[("{0,1}", 0.0)], 0.25)
        self.assertEqual(values[("{0}", -1.0)], 0.0)
        points = {row["face"]: row["point"] for row in rows}
        self.assertEqual(points, {"{0}": "1.0;0.0", "{1}": "0.0;1.0", "{0,1}": "0.5;0.5"})

    def test_solve_json_names_the_evaluation_points(self):
        result = self.runner.invoke(
            cli_module.cli,
            ["solve", "--alleles", "2", "--degree", "4", "--final", self.edge_condition(), "--times=0", "--format", "json"],
        )

        self.assertEqual(result.exit_code, 0, msg=result.output)
        (edge,) = [entry for entry in json.loads(result.output)["values"] if entry["face"] == [0, 1]]
        self.assertEqual(edge["point"], {"face": [0, 1], "coords": [0.5, 0.5]})
        self.assertAlmostEqual(edge["value"], 0.25)

    def test_extend_rejects_a_non_constant_vertex_condition(self):
        vertex = Face((0,), 2)
        cfg = cli_module.RunConfig(
            Subcommand.EXTEND, 2, 4, face=vertex, options={"poly": MultiPoly.coordinate(Face((0, 1), 2), 1)}
        )

        with self.assertRaises(ArgumentError):
            cli_module.run(cfg)

        cfg = cli_module.RunConfig(Subcommand.EXTEND, 2, 4, face=vertex, options={"poly": MultiPoly.constant(vertex, 3)})
        rows = cli_module.run(cfg).rows
        self.assertEqual({row[0] for row in rows}, {"{0}", "{0,1}", "{0,2}", "{0,1,2}"})

    def test_solve_rejects_positive_times(self):
        result = self.runner.invoke(
            cli_module.cli, ["solve", "--alleles", "2", "--final", self.edge_condition(), "--times", "0.5"]
        )

        self.assertEqual(result.exit_code, cli_module.USAGE_EXIT)

    def test_extend_along_a_path(self):
        result = self.runner.invoke(
            cli_module.cli,
            ["extend", "--alleles", "3", "--base", "0", "--path", "1,2", "--poly", "1", "--format", "json"],
        )

        self.assertEqual(result.exit_code, 0, msg=result.output)
        document = json.loads(result.output)
        self.assertEqual(document["path"], [0, 1, 2])
        self.assertEqual([piece["face"] for piece in document["pieces"]], [[0], [0, 1], [0, 1, 2]])
        self.assertEqual(document["mode_defects"], [])

    def test_extend_globally(self):
        result = self.runner.invoke(
            cli_module.cli, ["extend", "--alleles", "3", "--base", "1", "--global", "--poly", "1"]
        )

        self.assertEqual(result.exit_code, 0, msg=result.output)
        rows = rows_of(result.output)
        self.assertEqual(len(rows), 4)
        self.assertEqual(rows[-1]["face"], "{0,1,2}")
        self.assertEqual(rows[-1]["expression"], "1 * p1")

    def test_extend_path_and_global_conflict(self):
        result = self.runner.invoke(
            cli_module.cli, ["extend", "--alleles", "3", "--path", "1,2", "--global", "--poly", "1"]
        )

        self.assertEqual(result.exit_code, cli_module.USAGE_EXIT)

    def test_mc_check_reports_and_is_reproducible(self):
        final = self.write("fc.json", {"fill": "extend", "strata": [{"face": [0], "poly": "1"}]})
        args = [
            "mc-check", "--alleles", "2", "--degree", "3", "--final", final,
            "--pop-size", "40", "--horizon", "0.5", "--reps", "300", "--seed", "4", "--bias-check",
        ]

        first = self.runner.invoke(cli_module.cli, args)
        second = self.runner.invoke(cli_module.cli, args)

        self.assertEqual(first.exit_code, 0, msg=first.output)
        self.assertEqual(first.output, second.output)
        rows = rows_of(first.output)
        self.assertEqual([row["pop_size"] for row in rows], ["40", "160"])
        self.assertEqual([row["generations"] for row in rows], ["20", "80"])
        self.assertTrue(all(float(row["analytic"]) == 0.5 for row in rows))
        self.assertTrue(all(row["flagged"] in ("true", "false") for row in rows))

    def test_residual_is_small(self):
        result = self.runner.invoke(
            cli_module.cli,
            ["residual", "--alleles", "2", "--degree", "4", "--final", self.edge_condition(), "--points", "5"],
        )

        self.assertEqual(result.exit_code, 0, msg=result.output)
        (row,) = rows_of(result.output)
        self.assertEqual(row["face"], "{0,1}")
        self.assertEqual(row["points"], "5")
        self.assertLess(float(row["max_residual"]), 1e-5)

    def test_output_file(self):
        destination = os.path.join(self.directory.name, "out", "eigen.csv")
        result = self.runner.invoke(
            cli_module.cli, ["eigen", "--alleles", "2", "--degree", "3", "--output", destination]
        )

        self.assertEqual(result.exit_code, 0, msg=result.output)
        with open(destination, encoding="utf-8") as file:
            self.assertEqual(file.readline().strip(), "face,kappa,degree,eigenfunction")


class ParseConfigTestCase(unittest.TestCase):
    """Unit tests for parse_config and the config-file merge"""

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def config_file(self, text):
        path = os.path.join(self.directory.name, "wfext.yaml")
        with open(path, "w", encoding="utf-8") as file:
            file.write(text)
        return path

    def test_parse_eigen(self):
        cfg = cli_module.parse_config(["eigen", "--alleles", "3", "--degree", "8", "--face", "0,2"])

        self.assertIs(cfg.subcommand, Subcommand.EIGEN)
        self.assertEqual((cfg.n, cfg.degree), (2, 8))
        self.assertEqual(cfg.face, Face((0, 2), 2))
        self.assertIs(cfg.options["operator"], OperatorKind.BACKWARD)
        self.assertIs(cfg.output_format, OutputFormat.CSV)

    def test_config_file_fills_missing_options(self):
        path = self.config_file("alleles: 4\nformat: json\nface: [0, 1, 3]\n")

        cfg = cli_module.parse_config(["eigen", "--config", path])

        self.assertEqual(cfg.n, 3)
        self.assertIs(cfg.output_format, OutputFormat.JSON)
        self.assertEqual(cfg.face, Face((0, 1, 3)))

    @patch("wfext.cli.logger")
    def test_flag_wins_over_config_file(self, mock_logger):
        path = self.config_file("alleles: 2\ndegree: 3\n")

        cfg = cli_module.parse_config(["eigen", "--config", path, "--degree", "5"])

        self.assertEqual(cfg.degree, 5)
        self.assertEqual(cfg.n, 1)
        mock_logger.warning.assert_called_once_with(
            "Flag overrides config file value", option="degree", config_file=path
        )

    def test_unknown_config_key(self):
        path = self.config_file("alleles: 2\ncolour: blue\n")

        with self.assertRaises(cli_module.ConfigError):
            cli_module.parse_config(["eigen", "--config", path])

    def test_environment_seed_and_threads(self):
        with patch.dict(os.environ, {"WFEXT_SEED": "7", "WFEXT_THREADS": "3"}):
            cfg = cli_module.parse_config(["stationary", "--alleles", "2", "--vertex-values", "1,0"])

        self.assertEqual((cfg.seed, cfg.threads), (7, 3))
        self.assertEqual(cfg.options["vertex_values"], (1, 0))

    def test_stationary_values_are_exact(self):
        cfg = cli_module.parse_config(["stationary", "--alleles", "2", "--vertex-values", "0.2,0.8"])

        self.assertEqual(cfg.options["vertex_values"][0].denominator, 5)

    def test_missing_subcommand(self):
        with self.assertRaises(cli_module.ConfigError):
            cli_module.parse_config([])
        with self.assertRaises(cli_module.ConfigError):
            cli_module.parse_config(["plot"])

    def test_bad_path(self):
        with self.assertRaises(cli_module.ConfigError):
            cli_module.parse_config(["extend", "--alleles", "3", "--base", "0", "--path", "1,1", "--poly", "1"])
