"""End-to-end checks of the curvewind executable.

Run as: python3 test_cli.py <curvewind-binary> <repo-root>
"""

import csv
import json
import os
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema

BINARY = None
ROOT = None


def run(*args, stdin=None, env=None):
    full_env = dict(os.environ, CURVEWIND_LOG="quiet")
    if env:
        full_env.update(env)
    return subprocess.run([BINARY, *map(str, args)], input=stdin, capture_output=True, env=full_env, timeout=600)


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class CliTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.schema = json.loads((ROOT / "schema" / "run_report.schema.json").read_text())
        jsonschema.Draft202012Validator.check_schema(cls.schema)
        cls.circle = ROOT / "samples" / "circle.svg"
        cls.stroke = ROOT / "samples" / "open-stroke.svg"

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.addCleanup(self._tmp.cleanup)

    def field_run(self, name, *flags, source=None):
        out = self.tmp / name
        result = run("--input", source or self.circle, "--out", out, *flags)
        self.assertEqual(result.returncode, 0, result.stderr.decode())
        return out

    def test_field_artifacts_and_schema(self):
        out = self.field_run("agg", "--grid", "40x30", "--method", "agglomerated", "--beta", "2", "--order", "2")
        rows = read_csv(out / "field.csv")
        self.assertEqual(list(rows[0].keys()), ["x", "y", "w", "inside", "confidence"])
        self.assertEqual(len(rows), 40 * 30)
        for r in rows:
            w = float(r["w"])
            self.assertEqual(r["inside"], "1" if round(w) != 0 else "0")
            self.assertAlmostEqual(float(r["confidence"]), abs(w - int(w // 1) - 0.5), places=12)

        report = json.loads((out / "report.json").read_text())
        jsonschema.validate(report, self.schema)
        self.assertEqual(report["grid"]["width"], 40)
        self.assertEqual(report["curves"]["raw"], 4)
        self.assertGreaterEqual(report["curves"]["subdivided"], report["curves"]["raw"])
        self.assertEqual(report["bvh"]["leaves"], report["curves"]["subdivided"])
        self.assertEqual(report["bvh"]["nodes"], 2 * report["curves"]["subdivided"] - 1)
        self.assertIsNone(report["errors"])

        pgm = (out / "field.pgm").read_bytes()
        header = pgm.split(b"\n", 4)
        self.assertEqual(header[0], b"P5")
        self.assertTrue(header[1].startswith(b"# curvewind winding number field, linear map w=0 -> 0, w=1 -> 65535"))
        self.assertEqual(header[2], b"40 30")
        self.assertEqual(header[3], b"65535")
        self.assertEqual(len(header[4]), 40 * 30 * 2)

    def test_direct_method_matches_exact_traversal(self):
        direct = self.field_run("direct", "--grid", "25x25", "--method", "direct")
        exact = self.field_run("exact", "--grid", "25x25", "--beta", "inf")
        report = json.loads((direct / "report.json").read_text())
        jsonschema.validate(report, self.schema)
        self.assertIsNone(report["bvh"])
        a, b = read_csv(direct / "field.csv"), read_csv(exact / "field.csv")
        for ra, rb in zip(a, b):
            self.assertLess(abs(float(ra["w"]) - float(rb["w"])), 1e-12)
        self.assertEqual(json.loads((exact / "report.json").read_text())["beta"], "inf")

    def test_compare_adds_error_files(self):
        out = self.field_run("cmp", "--grid", "60x40", "--compare", "--order", "0", "--beta", "1", source=self.stroke)
        report = json.loads((out / "report.json").read_text())
        jsonschema.validate(report, self.schema)
        errors = read_csv(out / "errors.csv")
        self.assertEqual(len(errors), 60 * 40)
        linf = max(float(e["abs_error"]) for e in errors)
        self.assertAlmostEqual(report["errors"]["linf"], linf, places=15)
        mis = read_csv(out / "misclassified.csv")
        self.assertEqual(len(mis), report["errors"]["misclassified"])
        self.assertEqual(len(report["misclassifications"]), len(mis))

    def test_identical_flags_give_identical_bytes(self):
        flags = ("--grid", "50x50", "--compare", "--seed", "7")
        a = self.field_run("a", *flags, "--threads", "1", source=self.stroke)
        b = self.field_run("b", *flags, "--threads", "8", source=self.stroke)
        for name in ("field.csv", "field.pgm", "errors.csv", "misclassified.csv"):
            self.assertEqual((a / name).read_bytes(), (b / name).read_bytes(), name)

    def test_stdin_input(self):
        out = self.tmp / "stdin"
        result = run("--input", "-", "--grid", "10x10", "--out", out, stdin=self.circle.read_bytes())
        self.assertEqual(result.returncode, 0, result.stderr.decode())
        self.assertEqual(json.loads((out / "report.json").read_text())["input"], "<stdin>")

    def test_dumps(self):
        out = self.field_run("dump", "--grid", "10x10", "--dump-tree", "--dump-moments", "--dump-curves",
                             "--truncate-moments", "6")
        tree = json.loads((out / "tree.json").read_text())
        leaves = [n for n in tree["nodes"] if "curve_id" in n]
        self.assertEqual(len(leaves), tree["leaf_count"])
        self.assertEqual(sorted(n["curve_id"] for n in leaves), list(range(tree["leaf_count"])))
        moments = read_csv(out / "moments.csv")
        self.assertEqual(len(moments), len(tree["nodes"]))
        curves = (out / "curves.csv").read_text().splitlines()
        self.assertEqual(len(curves) - 1, tree["leaf_count"])

    def test_exit_codes(self):
        bad_svg = self.tmp / "bad.svg"
        bad_svg.write_text('<svg><path d="M 0 0 L 1"/></svg>')
        empty_svg = self.tmp / "empty.svg"
        empty_svg.write_text("<svg></svg>")
        blocker = self.tmp / "file"
        blocker.write_text("x")
        cases = [
            (1, ["--input", bad_svg]),
            (1, ["--input", empty_svg]),
            (2, ["--input", self.circle, "--grid", "10by10"]),
            (2, ["--input", self.circle, "--grid", "0x10"]),
            (2, ["--input", self.circle, "--beta", "-1"]),
            (2, ["--input", self.circle, "--beta", "abc"]),
            (2, ["--input", self.circle, "--order", "3"]),
            (2, ["--input", self.circle, "--method", "fast"]),
            (2, ["--input", self.circle, "--subdiv-frac", "0"]),
            (2, ["--experiment", "nope"]),
            (2, []),
            (2, ["--bogus"]),
            (3, ["--input", self.tmp / "missing.svg"]),
            (3, ["--input", self.circle, "--out", blocker / "sub"]),
        ]
        for code, args in cases:
            result = run(*args, "--out", self.tmp / "codes") if "--out" not in args else run(*args)
            self.assertEqual(result.returncode, code, (args, result.stderr.decode()))

    def test_logging_env(self):
        out = self.tmp / "log"
        quiet = run("--input", self.circle, "--grid", "5x5", "--out", out)
        self.assertEqual(quiet.stderr, b"")
        loud = run("--input", self.circle, "--grid", "5x5", "--out", out, env={"CURVEWIND_LOG": "info"})
        self.assertIn(b"curvewind: info:", loud.stderr)

    def test_experiment_overlap(self):
        out = self.tmp / "exp"
        result = run("--experiment", "overlap", "--grid", "60x60", "--out", out, "--threads", "1")
        self.assertEqual(result.returncode, 0, result.stderr.decode())
        rows = read_csv(out / "overlap.csv")
        self.assertEqual([int(float(r["k"])) for r in rows], [1, 2, 4, 8, 16])
        errors = [float(r["linf"]) for r in rows]
        self.assertEqual(errors, sorted(errors))
        summary = json.loads((out / "overlap.json").read_text())
        self.assertEqual(summary["summary"]["order"], 0)
        self.assertEqual(summary["seed"], 1)

    def test_experiment_tables_reproducible(self):
        for name in ("order-sweep", "disagreement"):
            a, b = self.tmp / (name + "-a"), self.tmp / (name + "-b")
            for out in (a, b):
                flags = ["--experiment", name, "--grid", "30x30", "--out", out, "--seed", "4"]
                if name == "order-sweep":
                    flags += ["--input", self.stroke]
                result = run(*flags)
                self.assertEqual(result.returncode, 0, result.stderr.decode())
            strip = lambda p: [
                [v for k, v in row.items() if not k.endswith("_seconds")]
                for row in read_csv(p / (name + ".csv"))
            ]
            self.assertEqual(strip(a), strip(b))


if __name__ == "__main__":
    BINARY = sys.argv.pop(1)
    ROOT = Path(sys.argv.pop(1))
    unittest.main(verbosity=2)
