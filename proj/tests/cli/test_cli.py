"""End-to-end checks of the sspec command-line tool (exit codes, schemas, oracles)."""

import csv
import json
import math
import os
import subprocess
import sys
import tempfile
import unittest

TOOL = os.environ.get("SSPEC_BIN", "sspec")
FAULT_TOOL = os.environ.get("SSPEC_FAULT_BIN", "sspec_fault")


def run(*args, tool=None):
    return subprocess.run([tool or TOOL, *map(str, args)], capture_output=True, text=True)


def load(path):
    with open(path) as f:
        return json.load(f)


def rows_of(path):
    with open(path) as f:
        return list(csv.DictReader(f))


def first_mode_eigenvalue(L, N):
    # Central differences with zero ghosts: D has eigenvalues i cos(j pi / (N + 1)) / h.
    return sum(math.sin(math.pi / (2 * (n + 1))) ** 2 / (l / (n + 1)) ** 2 for l, n in zip(L, N))


class CliTest(unittest.TestCase):
    def setUp(self):
        self.dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.dir.cleanup()

    def path(self, name):
        return os.path.join(self.dir.name, name)

    def write(self, name, obj):
        p = self.path(name)
        with open(p, "w") as f:
            f.write(obj if isinstance(obj, str) else json.dumps(obj))
        return p

    def matrix(self, name, m, entries):
        return self.write(name, {"m": m, "entries": entries})

    def box(self, name, N=(6, 6, 6), **field):
        cfg = {"kind": "constant", "params": {"c": 1.0}}
        cfg.update(field)
        cfg["box"] = {"L": [1.0, 1.0, 1.0], "N": list(N)}
        return self.write(name, cfg)

    # spectrum

    def test_spectrum_diagonal_real(self):
        p = self.matrix("d.json", 2, [[2, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [3, 0, 0, 0]])
        r = run("spectrum", p)
        self.assertEqual(r.returncode, 0, r.stderr)
        out = json.loads(r.stdout)
        got = sorted((s["u"], s["v"]) for s in out["spheres"])
        for (u, v), (eu, ev) in zip(got, [(2, 0), (3, 0)]):
            self.assertAlmostEqual(u, eu, places=12)
            self.assertAlmostEqual(v, ev, places=12)
        self.assertTrue(out["scan"]["consistent"])

    def test_spectrum_imaginary_unit(self):
        r = run("spectrum", self.matrix("e.json", 1, [[0, 1, 0, 0]]))
        out = json.loads(r.stdout)
        self.assertEqual(len(out["spheres"]), 1)
        self.assertAlmostEqual(out["spheres"][0]["u"], 0.0, places=12)
        self.assertAlmostEqual(out["spheres"][0]["v"], 1.0, places=12)

    def test_malformed_json_and_unknown_keys(self):
        r = run("spectrum", self.write("bad.json", "{bad"))
        self.assertEqual(r.returncode, 2)
        self.assertIn("parse error", r.stderr)
        r = run("spectrum", self.write("extra.json", {"m": 1, "entries": [[1, 0, 0, 0]], "x": 1}))
        self.assertEqual(r.returncode, 2)
        self.assertIn("unknown key", r.stderr)
        self.assertEqual(run("spectrum").returncode, 2)

    # calc

    def test_calc_square_reproduces_matrix_square(self):
        T = [[0.3, 0.1, -0.2, 0.0], [0.0, 0.5, 0.0, 0.1], [0.2, 0.0, 0.0, -0.3], [1.0, 0.0, 0.2, 0.0]]
        r = run("calc", self.matrix("t.json", 2, T), self.write("f.json", {"kind": "monomial", "params": {"m": 2}}))
        self.assertEqual(r.returncode, 0, r.stderr)
        got = json.loads(r.stdout)["entries"]

        def qmul(a, b):
            w1, x1, y1, z1 = a
            w2, x2, y2, z2 = b
            return [w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2, w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
                    w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2, w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2]

        for i in range(2):
            for j in range(2):
                expect = [sum(c) for c in zip(*(qmul(T[2 * i + k], T[2 * k + j]) for k in range(2)))]
                for a, b in zip(got[2 * i + j], expect):
                    self.assertAlmostEqual(a, b, delta=1e-10)

    def test_calc_check_eigen(self):
        e1 = self.matrix("e.json", 1, [[0, 1, 0, 0]])
        r = run("calc", e1, self.write("exp.json", {"kind": "exp"}), "--check-eigen")
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertTrue(json.loads(r.stderr)["eigen_check"]["pass"])
        val = json.loads(r.stdout)["entries"][0]
        self.assertAlmostEqual(val[0], math.cos(1.0), delta=1e-12)
        self.assertAlmostEqual(val[1], math.sin(1.0), delta=1e-12)
        nonint = self.write("n.json", {"kind": "monomial", "params": {"m": 1}, "coefficients": [[0, 0, 1, 0]]})
        self.assertEqual(run("calc", e1, nonint, "--check-eigen").returncode, 5)

    def test_calc_preconditions(self):
        nc = self.matrix("nc.json", 2, [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0]])
        f = self.write("exp.json", {"kind": "exp"})
        r = run("calc", nc, f, "--calculus", "f")
        self.assertEqual(r.returncode, 4)
        self.assertIn("commuting components required", r.stderr)
        e1 = self.matrix("e.json", 1, [[0, 1, 0, 0]])
        self.assertEqual(run("calc", e1, f, "--center", 5, "--radius", 1, "--nodes", 64).returncode, 4)

    def test_calc_f_and_monogenic_agree(self):
        # commuting symmetric triple with A_0 = 0 written as a quaternionic matrix
        c, s = math.cos(0.7), math.sin(0.7)
        V = [[c, -s], [s, c]]

        def sym(a):
            return [[sum(V[i][k] * a[k] * V[j][k] for k in range(2)) for j in range(2)] for i in range(2)]

        A = [sym([0.3, -0.2]), sym([0.1, 0.5]), sym([-0.4, 0.2])]
        entries = [[0.0, A[0][i][j], A[1][i][j], A[2][i][j]] for i in range(2) for j in range(2)]
        m = self.matrix("a.json", 2, entries)
        f = self.write("exp.json", {"kind": "exp"})
        rf = run("calc", m, f, "--calculus", "f")
        rm = run("calc", m, f, "--calculus", "monogenic", "--radius", 1.0)
        self.assertEqual(rf.returncode, 0, rf.stderr)
        self.assertEqual(rm.returncode, 0, rm.stderr)
        ef, em = json.loads(rf.stdout)["entries"], json.loads(rm.stdout)["entries"]
        diff = math.sqrt(sum((a - b) ** 2 for x, y in zip(ef, em) for a, b in zip(x, y)))
        norm = math.sqrt(sum(a * a for x in ef for a in x))
        self.assertLess(diff, 1e-6 * max(1.0, norm))

    # fracpow

    def test_fracpow_constant_coefficients(self):
        cfg = self.box("c.json")
        out, rep = self.path("f.csv"), self.path("r.json")
        r = run("fracpow", cfg, "--alpha", 0.5, "--vector", "random:3", "-o", out, "--report", rep)
        self.assertEqual(r.returncode, 0, r.stderr)
        report = load(rep)
        self.assertLessEqual(report["oracle_agreement"], 1e-8)
        self.assertLessEqual(report["plane_independence_residual"], 1e-8)
        self.assertGreater(report["quadrature"]["nodes_per_branch"], 0)
        self.assertTrue(report["conditions"]["pass"])
        rows = rows_of(out)
        self.assertEqual(len(rows), 216)
        self.assertEqual(list(rows[0].keys()), ["i", "j", "k", "w", "x", "y", "z"])

    def test_fracpow_alpha_out_of_range(self):
        r = run("fracpow", self.box("c.json"), "--alpha", 1.5)
        self.assertEqual(r.returncode, 2)
        self.assertIn("alpha in (0,1) required", r.stderr)

    def test_fracpow_check_only(self):
        cfg = self.box("t.json", kind="trigonometric-perturbation", params={"c": 1.0, "eps": 0.5})
        out = self.path("never.csv")
        r = run("fracpow", cfg, "--check-only", "--report", self.path("r.json"), "-o", out)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertFalse(os.path.exists(out))
        rep = load(self.path("r.json"))
        self.assertEqual(rep["theorem"], "dirichlet")
        self.assertFalse(rep["pass"])
        self.assertEqual(set(rep["rows"][0].keys()), {"inequality", "lhs", "rhs", "margin", "pass"})

    def test_fracpow_is_deterministic(self):
        cfg = self.box("t.json", N=(4, 4, 4), kind="trigonometric-perturbation", params={"c": 1.0, "eps": 0.1})
        a = run("fracpow", cfg, "--vector", "random:5", "--report", self.path("a.json"))
        b = run("fracpow", cfg, "--vector", "random:5", "--report", self.path("b.json"))
        self.assertEqual(a.returncode, 0, a.stderr)
        self.assertEqual(a.stdout, b.stdout)
        self.assertEqual(load(self.path("a.json")), load(self.path("b.json")))

    # heat

    def test_heat_first_mode_decay(self):
        N = (6, 6, 6)
        cfg = self.box("c.json", N=N)
        r = run("heat", cfg, "--alpha", 1, "--dt", 1e-3, "--steps", 50, "-o", self.path("t.csv"),
                "--summary", self.path("s.json"))
        self.assertEqual(r.returncode, 0, r.stderr)
        run_ = load(self.path("s.json"))["runs"][0]
        mu1 = first_mode_eigenvalue((1.0, 1.0, 1.0), N)
        for t, l2 in zip(run_["times"], run_["l2"]):
            self.assertAlmostEqual(l2 / run_["l2"][0], math.exp(-mu1 * t), delta=0.02 * math.exp(-mu1 * t))
        self.assertAlmostEqual(run_["mean_decay_rate"] / mu1, 1.0, delta=0.02)
        rows = rows_of(self.path("t.csv"))
        self.assertEqual(len(rows), 51 * 216)
        self.assertEqual(list(rows[0].keys()), ["step", "t", "i", "j", "k", "v"])

    def test_heat_zero_steps_echoes_initial_field(self):
        cfg = self.box("c.json", N=(4, 4, 4))
        r = run("heat", cfg, "--steps", 0, "--init", "ones", "--summary", self.path("s.json"))
        self.assertEqual(r.returncode, 0, r.stderr)
        rows = list(csv.DictReader(r.stdout.splitlines()))
        self.assertEqual(len(rows), 64)
        self.assertTrue(all(float(row["v"]) == 1.0 and row["step"] == "0" for row in rows))

    def test_heat_alpha_sweep_orders_top_mode_decay(self):
        cfg = self.box("c.json", N=(4, 4, 4))
        out = self.path("traj.csv")
        r = run("heat", cfg, "--alpha", 0.3, 0.6, 0.9, "--dt", 1e-3, "--steps", 5, "--init", "mode:top", "-o", out,
                "--summary", self.path("s.json"))
        self.assertEqual(r.returncode, 0, r.stderr)
        runs = load(self.path("s.json"))["runs"]
        self.assertEqual([x["alpha"] for x in runs], [0.3, 0.6, 0.9])
        finals = [x["l2"][-1] for x in runs]
        self.assertGreater(finals[0], finals[1])
        self.assertGreater(finals[1], finals[2])
        for x in runs:
            self.assertTrue(os.path.exists(x["trajectory"]))

    def test_heat_budget(self):
        r = run("heat", self.box("big.json", N=(13, 12, 12)), "--steps", 1)
        self.assertEqual(r.returncode, 6)

    # check

    def test_check_constant_coefficients(self):
        cfg = self.box("c.json", params={"c": 2.0})
        r = run("check", cfg)
        self.assertEqual(r.returncode, 0, r.stderr)
        reps = {x["theorem"]: x for x in json.loads(r.stdout)["reports"]}
        self.assertAlmostEqual(reps["dirichlet"]["rows"][0]["margin"], 4.0, places=12)
        self.assertAlmostEqual(reps["dirichlet"]["rows"][1]["margin"], 1.0, places=12)
        self.assertTrue(reps["robin"]["flags"]["C_dOmega_estimated"])
        self.assertEqual(reps["unbounded"]["values"]["M"], 0.0)
        self.assertTrue(all(x["pass"] for x in reps.values()))

    def test_check_unbounded_needs_certificate(self):
        cfg = self.box("t.json", kind="affine", params={"c": 1.0, "g": [0.1, 0.0, 0.0]})
        r = run("check", cfg, "--theorem", "unbounded")
        self.assertEqual(r.returncode, 4)
        self.assertIn("decay certificate", r.stderr)
        r = run("check", cfg)
        reps = {x["theorem"]: x for x in json.loads(r.stdout)["reports"]}
        self.assertIn("error", reps["unbounded"])

    # verify

    def test_verify_all_passes(self):
        r = run("verify", "all")
        self.assertEqual(r.returncode, 0, r.stdout + r.stderr)
        self.assertNotIn("FAIL", r.stdout)

    def test_verify_names_injected_failure(self):
        r = run("verify", "kernels", tool=FAULT_TOOL)
        self.assertEqual(r.returncode, 1)
        self.assertIn("failing invariant: kernels/kernel-identity", r.stderr)

    def test_help(self):
        r = run("--help")
        self.assertEqual(r.returncode, 0)
        self.assertIn("SSPEC_THREADS", r.stdout)


if __name__ == "__main__":
    unittest.main(argv=sys.argv[:1], verbosity=2)
