"""
Tests for the synthetic corpus generator.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import unittest

import tifinaghocr.errors
import tifinaghocr.labels
import tifinaghocr.synth


class WriterStyleTests(unittest.TestCase):

    def test_bounds(self):
        for writer_id in range(50):
            style = tifinaghocr.synth.draw_writer_style(3, writer_id)
            self.assertGreaterEqual(style.get_stroke_width(), 1)
            self.assertLessEqual(style.get_stroke_width(), 3)
            self.assertLessEqual(abs(style.get_slant_degrees()), 10)
            self.assertGreaterEqual(style.get_jitter(), 0)
            self.assertLessEqual(style.get_jitter(), 0.1)

    def test_deterministic(self):
        first = tifinaghocr.synth.draw_writer_style(3, 7)
        second = tifinaghocr.synth.draw_writer_style(3, 7)
        self.assertEqual(first.get_slant_degrees(), second.get_slant_degrees())
        self.assertEqual(first.get_jitter(), second.get_jitter())


class SkeletonTests(unittest.TestCase):

    def test_every_letter(self):
        registry = tifinaghocr.labels.build_registry()
        for entry in registry.get_entries():
            self.assertTrue(tifinaghocr.synth.get_skeleton(entry.get_name()))

    def test_unknown(self):
        with self.assertRaises(tifinaghocr.errors.InternalConsistencyError):
            tifinaghocr.synth.get_skeleton('yabc')


class SynthCorpusTests(unittest.TestCase):

    def setUp(self):
        self._registry = tifinaghocr.labels.build_registry()
        self._corpus = tifinaghocr.synth.synth_corpus(2, 0, self._registry)

    def test_size(self):
        self.assertEqual(self._corpus.get_size(), 66)
        self.assertEqual(self._corpus.get_writers(), [0, 1])

    def test_order(self):
        keys = [(x.get_writer_id(), x.get_label()) for x in self._corpus.get_examples()]
        self.assertEqual(keys, [(w, l) for w in range(2) for l in range(33)])

    def test_normalized(self):
        for example in self._corpus.get_examples():
            pixels = example.get_glyph().get_pixels()
            self.assertEqual(pixels.shape, (28, 28))
            self.assertFalse(pixels[:2, :].any())
            self.assertFalse(pixels[:, :2].any())
            self.assertTrue(pixels.any())

    def test_letters_distinct(self):
        glyphs = set(x.get_glyph() for x in self._corpus.subset([0]).get_examples())
        self.assertGreater(len(glyphs), 30)

    def test_deterministic(self):
        again = tifinaghocr.synth.synth_corpus(2, 0, self._registry)
        self.assertEqual(again, self._corpus)

    def test_seed_matters(self):
        other = tifinaghocr.synth.synth_corpus(2, 1, self._registry)
        self.assertNotEqual(other, self._corpus)

    def test_no_writers(self):
        with self.assertRaises(tifinaghocr.errors.ConfigError):
            tifinaghocr.synth.synth_corpus(0, 0, self._registry)
