# SPDX-License-Identifier: BUSL-1.1
"""Tests for CSV/JSON rendering and atomic result files."""

import io
import json
import math
import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np

# Ensure the geoqt package is importable
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from geoqt.errors import DomainError
from geoqt.output import (
    CommandResult,
    build_meta,
    format_float,
    meta_path,
    render,
    render_csv,
    render_json,
    write_result,
)
from geoqt.utils import atomic_write_text


def _result():
    return CommandResult(
        command="thermo",
        columns=("beta", "F", "ok"),
        rows=[(0.0, None, True), (0.1, 1 / 3, False)],
        meta=build_meta("thermo", {"spec": {"beta": 0.1}}, 7),
    )


class TestFloats(unittest.TestCase):
    def test_seventeen_digits_round_trip(self):
        for value in (1 / 3, math.pi, 1e-300, -2.5e17, 0.1 + 0.2):
            self.assertEqual(float(format_float(value)), value)
        self.assertEqual(format_float(np.float64(0.5)), "0.5")

    def test_non_finite_is_empty(self):
        for value in (math.nan, math.inf, -math.inf):
            self.assertEqual(format_float(value), "")


class TestCsv(unittest.TestCase):
    def test_cells(self):
        text = render_csv(("a", "b", "c", "d"), [(1, math.nan, True, 1 / 3), (np.int64(2), None, False, -math.inf)])
        self.assertEqual(text, "a,b,c,d\n1,,true,0.33333333333333331\n2,,false,\n")

    def test_row_length_checked(self):
        with self.assertRaises(DomainError):
            render_csv(("a", "b"), [(1,)])


class TestJson(unittest.TestCase):
    def test_floats_exact_and_nulls(self):
        data = {"x": 1 / 3, "nan": math.nan, "arr": np.array([0.1, np.inf]), "z": 1 + 2j, "n": np.int64(4)}
        payload = json.loads(render_json({"command": "demo"}, data))
        self.assertEqual(payload["meta"], {"command": "demo"})
        self.assertEqual(payload["data"]["x"], 1 / 3)
        self.assertIsNone(payload["data"]["nan"])
        self.assertEqual(payload["data"]["arr"], [0.1, None])
        self.assertEqual(payload["data"]["z"], [1.0, 2.0])
        self.assertEqual(payload["data"]["n"], 4)

    def test_strings_untouched(self):
        payload = json.loads(render_json({}, {"label": "beta=0.1", "list": ["1.0", 1.0]}))
        self.assertEqual(payload["data"], {"label": "beta=0.1", "list": ["1.0", 1.0]})

    def test_rows_become_records(self):
        payload = json.loads(render(_result(), "json"))
        self.assertEqual(payload["data"][1], {"beta": 0.1, "F": 1 / 3, "ok": False})
        self.assertEqual(payload["meta"]["seed"], 7)
        self.assertEqual(payload["meta"]["command"], "thermo")
        self.assertIn("version", payload["meta"])

    def test_unknown_format(self):
        with self.assertRaises(DomainError):
            render(_result(), "xml")


class TestWriting(unittest.TestCase):
    def test_stream(self):
        buf = io.StringIO()
        self.assertIsNone(write_result(_result(), "csv", stream=buf))
        self.assertTrue(buf.getvalue().startswith("beta,F,ok\n"))

    def test_csv_file_gets_meta_sidecar(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_result(_result(), "csv", Path(tmp) / "out.csv")
            self.assertEqual(path.read_text().splitlines()[0], "beta,F,ok")
            sidecar = json.loads(meta_path(path).read_text())
            self.assertEqual(sidecar["meta"]["command"], "thermo")
            self.assertIsNone(sidecar["data"])
            self.assertEqual(sorted(p.name for p in Path(tmp).iterdir()), ["out.csv", "out.csv.meta.json"])

    def test_json_file_has_no_sidecar(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_result(_result(), "json", Path(tmp) / "out.json")
            self.assertFalse(meta_path(path).exists())

    def test_atomic_write_replaces(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = Path(tmp) / "f.txt"
            atomic_write_text(target, "one\n")
            atomic_write_text(target, "two\n")
            self.assertEqual(target.read_bytes(), b"two\n")
            self.assertEqual([p.name for p in Path(tmp).iterdir()], ["f.txt"])


if __name__ == "__main__":
    unittest.main()
