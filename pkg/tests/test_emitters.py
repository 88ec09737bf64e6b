"""Tests for CSV and JSON result emitters"""

import json
import unittest
from fractions import Fraction
from unittest.mock import MagicMock

from wfext.emitters import CsvEmitter, JsonEmitter, RunResult


class EmitterTestCase(unittest.TestCase):
    """Unit tests for CsvEmitter and JsonEmitter"""

    def setUp(self):
        self.result = RunResult(
            document={"kappa": Fraction(3, 2), "values": [0.1, 2.5e-08]},
            columns=("face", "kappa", "value", "flagged", "note"),
            rows=[("{0,1}", Fraction(3, 2), 0.1, False, None), ("{0}", 0, 2.5e-08, True, "")],
        )

    def test_csv_rendering(self):
        text = CsvEmitter(MagicMock()).render(self.result)
        self.assertEqual(
            text,
            'face,kappa,value,flagged,note\n"{0,1}",3/2,0.1,false,\n{0},0,2.5e-08,true,\n',
        )

    def test_csv_header_only(self):
        text = CsvEmitter(MagicMock()).render(RunResult({}, ("face", "kappa")))
        self.assertEqual(text, "face,kappa\n")

    def test_json_rendering(self):
        text = JsonEmitter(MagicMock()).render(self.result)
        self.assertTrue(text.endswith("}\n"))
        self.assertEqual(json.loads(text), {"kappa": "3/2", "values": [0.1, 2.5e-08]})

    def test_json_rejects_unknown_objects(self):
        with self.assertRaises(TypeError):
            JsonEmitter(MagicMock()).render(RunResult({"value": object()}))

    def test_rendering_is_deterministic(self):
        emitter = CsvEmitter(MagicMock())
        self.assertEqual(emitter.render(self.result), emitter.render(self.result))
