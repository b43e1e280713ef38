"""End-to-end tests for the spintomo command-line tool.

Runs the binary named by the SPINTOMO_CLI environment variable against the
bundled example configurations and checks outputs, determinism and exit codes.
"""

import json
import math
import os
import shutil
import subprocess
import sys
import tempfile
import unittest

CLI = os.environ.get("SPINTOMO_CLI", "spintomo")
REPO = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
CONFIGS = os.path.join(REPO, "configs")


def run(*args, cwd=None):
    return subprocess.run([CLI, *args], capture_output=True, text=True, cwd=cwd)


def read_csv(path):
    rows = []
    header = None
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(dict(zip(header, line.split(","))))
    return rows


def strip_timing(path):
    with open(path) as handle:
        doc = json.load(handle)
    doc.pop("timing_seconds", None)
    return json.dumps(doc, sort_keys=True)


class CliTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp(prefix="spintomo_cli_")

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def out(self, name):
        return os.path.join(self.tmp, name)

    def write_config(self, doc):
        path = os.path.join(self.tmp, "config.json")
        with open(path, "w") as handle:
            json.dump(doc, handle)
        return path

    def test_simulate_exact_matches_closed_form(self):
        cfg = os.path.join(CONFIGS, "dicke_j1.json")
        result = run("simulate", "--config", cfg, "--out", self.out("sim"))
        self.assertEqual(result.returncode, 0, result.stderr)
        rows = read_csv(self.out("sim/probability.csv"))
        self.assertGreater(len(rows), 0)
        for row in rows:
            theta = float(row["theta"])
            expected = math.cos(0.5 * theta) ** 4  # p_j of the top Dicke state, j = 1
            self.assertAlmostEqual(float(row["p"]), expected, places=13)
            self.assertEqual(row["shots"], "0")

    def test_simulate_is_deterministic(self):
        cfg = os.path.join(CONFIGS, "coherent_j32_ramsey.json")
        for name in ("a", "b"):
            result = run("simulate", "--config", cfg, "--out", self.out(name))
            self.assertEqual(result.returncode, 0, result.stderr)
        for filename in sorted(os.listdir(self.out("a"))):
            with open(self.out(f"a/{filename}"), "rb") as fa, \
                 open(self.out(f"b/{filename}"), "rb") as fb:
                self.assertEqual(fa.read(), fb.read(), filename)
        result = run("simulate", "--config", cfg, "--out", self.out("c"), "--seed", "8")
        self.assertEqual(result.returncode, 0, result.stderr)
        with open(self.out("a/measurement.csv"), "rb") as fa, \
             open(self.out("c/measurement.csv"), "rb") as fc:
            self.assertNotEqual(fa.read(), fc.read())

    def test_pipeline_closure_on_bundled_configs(self):
        for name in ("dicke_j1.json", "coherent_j32_ramsey.json", "mixture_j2.json",
                     "superposition_ion.json"):
            cfg = os.path.join(CONFIGS, name)
            sim = self.out(f"closure_{name}")
            result = run("simulate", "--config", cfg, "--out", sim, "--shots", "0")
            self.assertEqual(result.returncode, 0, result.stderr)
            result = run("reconstruct", "--config", cfg, "--out", sim,
                         "--input", os.path.join(sim, "probability.csv"))
            self.assertEqual(result.returncode, 0, result.stderr)
            with open(os.path.join(sim, "report.json")) as handle:
                report = json.load(handle)
            self.assertLessEqual(report["metrics"]["max_abs_diff"], 1e-9, name)
            self.assertGreaterEqual(report["metrics"]["fidelity"], 1.0 - 1e-9, name)

    def test_two_mode_blockwise(self):
        cfg = os.path.join(CONFIGS, "two_mode_mz.json")
        sim = self.out("twomode")
        result = run("simulate", "--config", cfg, "--out", sim)
        self.assertEqual(result.returncode, 0, result.stderr)
        result = run("reconstruct", "--config", cfg, "--out", self.out("twomode_rec"),
                     "--input", sim)
        self.assertEqual(result.returncode, 0, result.stderr)
        with open(self.out("twomode_rec/report.json")) as handle:
            report = json.load(handle)
        self.assertEqual(len(report["blocks"]), 3)
        for block in report["blocks"]:
            self.assertTrue(block["reconstructed"])
            self.assertLessEqual(block["metrics"]["max_abs_diff"], 1e-9)

        sampled = self.out("twomode_sampled")
        result = run("simulate", "--config", cfg, "--out", sampled, "--shots", "20000")
        self.assertEqual(result.returncode, 0, result.stderr)
        with open(os.path.join(sampled, "blocks.json")) as handle:
            blocks = json.load(handle)["blocks"]
        for block in blocks:
            self.assertLess(abs(block["weight_estimate"] - block["weight"]), 0.02)

    def test_qpd_routes_and_footer(self):
        cfg = os.path.join(CONFIGS, "dicke_j1.json")
        sim = self.out("qpd")
        run("simulate", "--config", cfg, "--out", sim)
        result = run("qpd", "--config", cfg, "--out", sim,
                     "--input", os.path.join(sim, "probability.csv"), "--route", "both")
        self.assertEqual(result.returncode, 0, result.stderr)
        self.assertIn("s=0 normalization check", result.stdout)
        deviation = float(result.stdout.split("deviation")[1].split(")")[0])
        self.assertLess(deviation, 1e-10)

        with open(os.path.join(sim, "qpd_s0.csv")) as handle:
            text = handle.read()
        self.assertIn("# max_route_discrepancy=", text)
        footer = float(text.rsplit("=", 1)[1])
        self.assertLess(footer, 1e-9)

        for row in read_csv(os.path.join(sim, "qpd_s-1.csv")):
            expected = math.cos(0.5 * float(row["theta"])) ** 4
            self.assertAlmostEqual(float(row["value"]), expected, places=10)

    def test_degenerate_readout_is_rejected(self):
        cfg = self.write_config({
            "two_j": 2,
            "state": {"kind": "dicke", "two_mu": 2},
            "readout_two_mu": 0,
            "shots": 0,
            "output_dir": self.out("deg"),
        })
        result = run("simulate", "--config", cfg)
        self.assertEqual(result.returncode, 3, result.stderr)
        self.assertIn("vanishing Clebsch-Gordan denominator", result.stderr)
        self.assertIn("l = 1", result.stderr)

    def test_ramsey_first_pulse_is_rejected(self):
        cfg = self.write_config({
            "frontend": "ramsey",
            "two_j": 2,
            "state": {"kind": "dicke", "two_mu": 2},
            "shots": 0,
            "output_dir": self.out("fp"),
            "ramsey": {"omega0": 1.0, "omega": 2.0, "omega2": -1.0, "first_pulse_on": True},
        })
        result = run("simulate", "--config", cfg)
        self.assertEqual(result.returncode, 3, result.stderr)
        self.assertIn("first Ramsey pulse", result.stderr)

    def test_malformed_csv_names_the_line(self):
        path = os.path.join(self.tmp, "broken.csv")
        with open(path, "w") as handle:
            handle.write("# two_j=2 readout_two_mu=2\n")
            handle.write("theta,phi,weight,shots,p\n")
            handle.write("0.5,0.1,1.0,0,0.5\n")
            handle.write("0.5,0.1,1.0\n")
        cfg = os.path.join(CONFIGS, "dicke_j1.json")
        result = run("reconstruct", "--config", cfg, "--input", path, "--out", self.out("x"))
        self.assertEqual(result.returncode, 4, result.stderr)
        self.assertIn("broken.csv:4", result.stderr)

    def test_config_errors_exit_2(self):
        result = run("simulate", "--config", os.path.join(self.tmp, "missing.json"))
        self.assertEqual(result.returncode, 2)

        cfg = self.write_config({"two_j": 2, "state": {"kind": "nonsense"}})
        result = run("simulate", "--config", cfg)
        self.assertEqual(result.returncode, 2)
        self.assertIn("state", result.stderr)

        cfg = self.write_config({
            "two_j": 2,
            "state": {"kind": "two_mode", "amplitudes": [{"n1": 1, "n2": 0, "re": 1.0, "im": 0.0}]},
            "frontend": "abstract",
        })
        result = run("simulate", "--config", cfg)
        self.assertEqual(result.returncode, 2)
        self.assertIn("two_mode", result.stderr)

    def test_jc_roundtrip(self):
        pops = [0.3, 0.25, 0.2, 0.15, 0.07, 0.03]
        pops_path = os.path.join(self.tmp, "pops.json")
        with open(pops_path, "w") as handle:
            json.dump({"populations": pops}, handle)
        cfg = os.path.join(CONFIGS, "jc_readout.json")

        result = run("jc", "--config", cfg, "--populations", pops_path, "--out", self.out("jc"))
        self.assertEqual(result.returncode, 0, result.stderr)
        with open(self.out("jc/jc_populations.json")) as handle:
            recovered = json.load(handle)["populations"]
        for got, want in zip(recovered, pops):
            self.assertLess(abs(got - want), 1e-6)

        result = run("jc", "--config", cfg, "--populations", pops_path,
                     "--out", self.out("jc_noisy"), "--shots", "10000", "--seed", "3")
        self.assertEqual(result.returncode, 0, result.stderr)
        with open(self.out("jc_noisy/jc_populations.json")) as handle:
            noisy = json.load(handle)["populations"]
        for got, want in zip(noisy, pops):
            self.assertLess(abs(got - want), 1e-2)

    def test_sweep_report(self):
        cfg = os.path.join(CONFIGS, "sweep_j1.json")
        for name in ("s1", "s2"):
            result = run("sweep", "--config", cfg, "--out", self.out(name))
            self.assertEqual(result.returncode, 0, result.stderr)
        with open(self.out("s1/sweep_report.json")) as handle:
            report = json.load(handle)
        self.assertLess(report["slope"], -0.3)
        self.assertLessEqual(report["baseline_error"], 1e-9)
        by_shots = {level["shots"]: level["median"] for level in report["levels"]}
        self.assertTrue(1e-3 < by_shots[10000] < 1e-1)
        self.assertEqual(strip_timing(self.out("s1/sweep_report.json")),
                         strip_timing(self.out("s2/sweep_report.json")))
        with open(self.out("s1/sweep.csv")) as fa, open(self.out("s2/sweep.csv")) as fb:
            self.assertEqual(fa.read(), fb.read())

    def test_jc_zero_populations(self):
        pops_path = os.path.join(self.tmp, "zeros.json")
        with open(pops_path, "w") as handle:
            json.dump([0.0] * 6, handle)
        cfg = os.path.join(CONFIGS, "jc_readout.json")
        result = run("jc", "--config", cfg, "--populations", pops_path, "--out", self.out("jcz"))
        self.assertEqual(result.returncode, 0, result.stderr)
        with open(self.out("jcz/jc_populations.json")) as handle:
            recovered = json.load(handle)["populations"]
        self.assertEqual(recovered, [0.0] * 6)


if __name__ == "__main__":
    sys.exit(unittest.main(verbosity=2))
