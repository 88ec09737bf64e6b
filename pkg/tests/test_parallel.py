import threading
import unittest

from wfext.utils.parallel import ordered_map


class OrderedMapTestCase(unittest.TestCase):
    """Unit tests for ordered_map"""

    def test_serial(self):
        self.assertEqual(ordered_map(lambda x: x * x, range(5)), [0, 1, 4, 9, 16])

    def test_threads_keep_input_order(self):
        def slow_identity(x):
            threading.Event().wait(0.01 * (5 - x))
            return x

        self.assertEqual(ordered_map(slow_identity, range(5), workers=4), [0, 1, 2, 3, 4])

    def test_errors_propagate(self):
        def fail(x):
            raise ValueError(x)

        with self.assertRaises(ValueError):
            ordered_map(fail, [1, 2], workers=2)

    def test_empty(self):
        self.assertEqual(ordered_map(str, [], workers=3), [])
