"""
Tests for history export and curve rendering.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import os
import tempfile
import unittest

import tifinaghocr.curves
import tifinaghocr.errors
import tifinaghocr.training


def make_history(epochs):
    records = []
    for epoch in epochs:
        train = tifinaghocr.training.Metrics(3.5 / epoch, 0.1 + 0.01 * epoch, 0.3 + 0.01 * epoch)
        test = tifinaghocr.training.Metrics(3.6 / epoch, 1 / 3, 2 / 3)
        records.append(tifinaghocr.training.EpochRecord(epoch, train, test))
    return tifinaghocr.training.History(records)


class HistoryCsvTests(unittest.TestCase):

    def setUp(self):
        self._temp_dir = tempfile.TemporaryDirectory()
        self._path = os.path.join(self._temp_dir.name, 'history.csv')

    def tearDown(self):
        self._temp_dir.cleanup()

    def test_layout(self):
        tifinaghocr.curves.export_history_csv(make_history(range(1, 11)), self._path)

        with open(self._path) as f:
            lines = f.read().splitlines()

        self.assertEqual(len(lines), 11)
        self.assertEqual(
            lines[0],
            'epoch,train_loss,train_top1,test_loss,test_top1,train_top5,test_top5'
        )
        self.assertTrue(lines[1].startswith('1,3.5,'))

    def test_reparse_exact(self):
        history = make_history([2, 4, 5])
        tifinaghocr.curves.export_history_csv(history, self._path)
        self.assertEqual(tifinaghocr.curves.read_history_csv(self._path), history)

    def test_empty(self):
        with self.assertRaises(tifinaghocr.errors.ConfigError):
            tifinaghocr.curves.export_history_csv(make_history([]), self._path)

    def test_bad_header(self):
        with open(self._path, 'w') as f:
            f.write('epoch,loss\n1,0.5\n')

        with self.assertRaises(tifinaghocr.errors.FormatError):
            tifinaghocr.curves.read_history_csv(self._path)

    def test_bad_row(self):
        tifinaghocr.curves.export_history_csv(make_history([1]), self._path)
        with open(self._path, 'a') as f:
            f.write('2,abc,0,0,0,0,0\n')

        with self.assertRaises(tifinaghocr.errors.FormatError) as context:
            tifinaghocr.curves.read_history_csv(self._path)
        self.assertIn('line 3', str(context.exception))


class CurvesSvgTests(unittest.TestCase):

    def setUp(self):
        self._temp_dir = tempfile.TemporaryDirectory()
        self._history = make_history(range(1, 6))

    def tearDown(self):
        self._temp_dir.cleanup()

    def _render(self, name):
        path = os.path.join(self._temp_dir.name, name)
        tifinaghocr.curves.render_curves_svg(self._history, path)
        with open(path, 'rb') as f:
            return f.read()

    def test_svg(self):
        content = self._render('curves.svg')
        self.assertIn(b'<svg', content)

    def test_reproducible(self):
        self.assertEqual(self._render('first.svg'), self._render('second.svg'))

    def test_figure_panels(self):
        figure = tifinaghocr.curves.build_curves_figure(self._history)
        axes = figure.get_axes()
        self.assertEqual(len(axes), 2)
        self.assertEqual(len(axes[0].get_lines()), 2)
        self.assertEqual(len(axes[1].get_lines()), 4)

    def test_empty(self):
        with self.assertRaises(tifinaghocr.errors.ConfigError):
            tifinaghocr.curves.render_curves_svg(
                make_history([]),
                os.path.join(self._temp_dir.name, 'empty.svg')
            )
