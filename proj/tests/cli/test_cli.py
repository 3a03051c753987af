"""Exit-code and output contract of the cyclo command line tool.

Usage: test_cli.py <cyclo binary> <benchmark dir> <test data dir> <report schema>
"""

import csv
import json
import math
import os
import subprocess
import sys
import tempfile
import unittest

CYCLO, BENCH, DATA, SCHEMA = sys.argv[1:5]
del sys.argv[1:5]


def run(*args, env=None):
    return subprocess.run([CYCLO, *args], capture_output=True, text=True, env=env, timeout=600)


def slurp(path):
    with open(path) as f:
        return f.read()


def load_json(path):
    return json.loads(slurp(path))


def bench(name):
    return os.path.join(BENCH, name + ".bench")


class Lock(unittest.TestCase):
    def test_same_seed_gives_identical_files(self):
        with tempfile.TemporaryDirectory() as d:
            outs = []
            for tag in "ab":
                b, k = os.path.join(d, tag + ".bench"), os.path.join(d, tag + ".json")
                r = run("lock", "--in", bench("c1908"), "--scheme", "sc", "--n-mc", "2",
                        "--seed", "7", "--out", b, "--key-out", k)
                self.assertEqual(r.returncode, 0, r.stderr)
                outs.append((slurp(b), slurp(k)))
            self.assertEqual(outs[0], outs[1])
            key = json.loads(outs[0][1])
            self.assertEqual(key["added_gates"], 11)
            self.assertEqual(len(key["key"]), 11)
            self.assertTrue(all(v == 0 for v in key["key"].values()))
            self.assertTrue(key["placement_log"])

    def test_infeasible_recipe_exits_2(self):
        r = run("lock", "--in", bench("c432"), "--scheme", "sc", "--n-mc", "20")
        self.assertEqual(r.returncode, 2)
        self.assertEqual(json.loads(r.stderr.splitlines()[0])["error"], "InsufficientGates")

    def test_missing_input_exits_3_with_usage(self):
        r = run("lock", "--scheme", "sc")
        self.assertEqual(r.returncode, 3)
        self.assertIn("Usage", r.stderr)
        self.assertIn("--in", r.stderr)

    def test_unreadable_and_malformed_files(self):
        self.assertEqual(run("lock", "--in", "/nonexistent.bench").returncode, 3)
        with tempfile.NamedTemporaryFile("w", suffix=".bench", delete=False) as f:
            f.write("INPUT(a)\nOUTPUT(b)\nb = FOO(a)\n")
        try:
            r = run("lock", "--in", f.name)
            self.assertEqual(r.returncode, 4)
            self.assertEqual(json.loads(r.stderr)["error"], "UnsupportedGate")
        finally:
            os.unlink(f.name)


class Attack(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.dir = tempfile.TemporaryDirectory()
        d = cls.dir.name
        cls.sc = os.path.join(d, "sc.bench")
        cls.sr = os.path.join(d, "sr.bench")
        assert run("lock", "--in", bench("c880"), "--n-mc", "2", "--seed", "1", "--out", cls.sc,
                   "--key-out", os.devnull).returncode == 0
        assert run("lock", "--in", bench("c1908"), "--scheme", "srlatch", "--latches", "10",
                   "--n-mc", "2", "--seed", "1", "--out", cls.sr,
                   "--key-out", os.devnull).returncode == 0

    @classmethod
    def tearDownClass(cls):
        cls.dir.cleanup()

    def attack(self, locked, oracle, *extra, env=None):
        report = os.path.join(self.dir.name, "report.json")
        r = run("attack", "--locked", locked, "--oracle", bench(oracle), "--report", report,
                *extra, env=env)
        return r.returncode, load_json(report)

    def test_cycsat1_recovers_super_cycle_key(self):
        code, rep = self.attack(self.sc, "c880", "--mode", "cycsat1")
        self.assertEqual(code, 0)
        self.assertEqual(rep["status"], "Success")
        self.assertEqual(len(rep["key"]), 11)

    def test_cycsat1_unsat_on_latches_cycsat2_succeeds(self):
        code, rep = self.attack(self.sr, "c1908", "--mode", "cycsat1")
        self.assertEqual((code, rep["status"]), (10, "Unsat"))
        code, rep = self.attack(self.sr, "c1908", "--mode", "cycsat2")
        self.assertEqual((code, rep["status"]), (0, "Success"))

    def test_plain_sat_is_trapped(self):
        code, rep = self.attack(self.sc, "c880", "--mode", "sat", "--iter-cap", "5")
        self.assertEqual((code, rep["status"]), (11, "IterationCapReached"))

    def test_preprocess_limit_exits_12(self):
        code, rep = self.attack(self.sc, "c880", "--mode", "cycsat1-allcycles", "--cycle-limit", "5")
        self.assertEqual((code, rep["status"]), (12, "PreprocessTimeout"))

    def test_dip_csv(self):
        path = os.path.join(self.dir.name, "dips.csv")
        code, rep = self.attack(self.sc, "c880", "--mode", "cycsat2", "--dip-csv", path)
        with open(path) as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ["iteration", "dip", "solver_seconds"])
        self.assertEqual(len(rows) - 1, rep["iterations"])
        self.assertEqual([r[1] for r in rows[1:]], rep["dips"])

    def test_external_solver_backend(self):
        env = dict(os.environ, CYCLO_SOLVER=CYCLO + " solve")
        code, rep = self.attack(self.sc, "c880", "--mode", "cycsat1", env=env)
        self.assertEqual((code, rep["status"]), (0, "Success"))


class CyclesAndFit(unittest.TestCase):
    def test_cycles(self):
        r = run("cycles", "--in", os.path.join(DATA, "toy_locked.bench"))
        self.assertEqual(r.returncode, 0)
        self.assertIn("count 3\nstatus Complete", r.stdout)
        r = run("cycles", "--in", bench("c432"), "--count-only")
        self.assertIn("count 0\nstatus Complete", r.stdout)

    def test_cycle_listing(self):
        with tempfile.NamedTemporaryFile("r", suffix=".txt") as f:
            r = run("cycles", "--in", os.path.join(DATA, "toy_locked.bench"), "--list-out", f.name)
            self.assertEqual(r.returncode, 0)
            self.assertEqual(len(f.read().splitlines()), 3)

    def test_enumeration_limit_is_a_status(self):
        r = run("cycles", "--in", os.path.join(DATA, "toy_locked.bench"), "--limit", "1")
        self.assertEqual(r.returncode, 0)
        self.assertIn("status LimitHit", r.stdout)

    def test_fit(self):
        r = run("fit", "--points", "1:2,2:4,3:8")
        self.assertEqual(r.returncode, 0)
        fit = json.loads(r.stdout)
        self.assertAlmostEqual(fit["A"], 1.0, places=9)
        self.assertAlmostEqual(fit["B"], math.log(2), places=9)
        self.assertEqual(run("fit", "--points", "1:0,2:3").returncode, 4)
        self.assertEqual(run("fit", "--points", "1:2,1:3").returncode, 4)


class Suite(unittest.TestCase):
    def test_matrix_report(self):
        import jsonschema

        schema = load_json(SCHEMA)
        rows_by_run = []
        with tempfile.TemporaryDirectory() as d:
            for jobs in ("1", "3"):
                out = os.path.join(d, "j" + jobs)
                r = run("bench-suite", "--bench-dir", BENCH, "--benchmarks", "c17,c432,c880",
                        "--sweep", "n_mc=1,2,3", "--seeds", "1,2", "--attacks", "cycsat1",
                        "--jobs", jobs, "--out-dir", out)
                self.assertEqual(r.returncode, 0, r.stderr)
                rep = load_json(os.path.join(out, "report.json"))
                jsonschema.validate(rep, schema)
                self.assertEqual(len(rep["rows"]), 18)
                for row in rep["rows"]:
                    if row["benchmark"] == "c17":
                        self.assertEqual(row["lock_status"], "InsufficientGates")
                        self.assertEqual(row["attack_status"], "")
                    else:
                        self.assertEqual(row["lock_status"], "ok")
                        self.assertEqual(row["cycle_status"], "Complete")
                        self.assertEqual(row["attack_status"], "Success")
                for fit in rep["fits"]:
                    if fit["benchmark"] != "c17":
                        self.assertGreater(fit["B"], 0)

                with open(os.path.join(out, "report.csv")) as f:
                    table = list(csv.DictReader(f))
                self.assertEqual(len(table), len(rep["rows"]))
                for c, j in zip(table, rep["rows"]):
                    for k, v in j.items():
                        if isinstance(v, float):
                            self.assertAlmostEqual(float(c[k]), v, places=6)
                        else:
                            self.assertEqual(c[k], str(v))
                tsv = slurp(os.path.join(out, "cycles.tsv")).splitlines()
                self.assertEqual(tsv[0].split("\t"), ["benchmark", "scheme", "seed",
                                                      "n_mc=1", "n_mc=2", "n_mc=3"])
                self.assertEqual(len(tsv), 1 + 3 * 2)

                timing = {"cycle_seconds", "preprocess_seconds", "solver_seconds"}
                rows_by_run.append([{k: v for k, v in row.items() if k not in timing}
                                    for row in rep["rows"]])
        self.assertEqual(rows_by_run[0], rows_by_run[1])

    def test_missing_bench_dir(self):
        r = run("bench-suite", "--bench-dir", "/nonexistent")
        self.assertEqual(r.returncode, 3)


if __name__ == "__main__":
    unittest.main(verbosity=2)
