"""
Tests for glyph image structures.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import unittest

import numpy

import tifinaghocr.errors
import tifinaghocr.glyph_model


def make_block_pixels():
    pixels = numpy.zeros((28, 28), dtype=numpy.uint8)
    pixels[5:20, 8:14] = 255
    return pixels


class RawGlyphTests(unittest.TestCase):

    def setUp(self):
        self._glyph = tifinaghocr.glyph_model.RawGlyph(numpy.zeros((7, 11)))

    def test_dimensions(self):
        self.assertEqual(self._glyph.get_width(), 11)
        self.assertEqual(self._glyph.get_height(), 7)

    def test_read_only(self):
        with self.assertRaises(ValueError):
            self._glyph.get_pixels()[0, 0] = 1

    def test_not_2d(self):
        with self.assertRaises(tifinaghocr.errors.DimensionError):
            tifinaghocr.glyph_model.RawGlyph(numpy.zeros((2, 2, 3)))

    def test_out_of_range(self):
        with self.assertRaises(tifinaghocr.errors.ConfigError):
            tifinaghocr.glyph_model.RawGlyph(numpy.full((2, 2), 300))


class Glyph28Tests(unittest.TestCase):

    def setUp(self):
        self._glyph = tifinaghocr.glyph_model.Glyph28(make_block_pixels())

    def test_to_tensor(self):
        tensor = self._glyph.to_tensor()
        self.assertEqual(tensor.shape, (1, 28, 28))
        self.assertEqual(tensor.dtype, numpy.float32)
        self.assertAlmostEqual(float(tensor.max()), 1.0)
        self.assertAlmostEqual(float(tensor.min()), 0.0)

    def test_equality(self):
        other = tifinaghocr.glyph_model.Glyph28(make_block_pixels())
        self.assertEqual(self._glyph, other)
        self.assertEqual(hash(self._glyph), hash(other))

    def test_wrong_size(self):
        with self.assertRaises(tifinaghocr.errors.DimensionError):
            tifinaghocr.glyph_model.Glyph28(numpy.zeros((27, 28)))

    def test_ink_in_frame(self):
        pixels = make_block_pixels()
        pixels[1, 10] = 10
        with self.assertRaises(tifinaghocr.errors.ConfigError):
            tifinaghocr.glyph_model.Glyph28(pixels)

    def test_blank(self):
        with self.assertRaises(tifinaghocr.errors.ConfigError):
            tifinaghocr.glyph_model.Glyph28(numpy.zeros((28, 28)))

    def test_blank_allowed(self):
        glyph = tifinaghocr.glyph_model.Glyph28(numpy.zeros((28, 28)), allow_blank=True)
        self.assertTrue(glyph.is_blank())


class RectTests(unittest.TestCase):

    def setUp(self):
        self._rect = tifinaghocr.glyph_model.Rect(2, 3, 4, 5)

    def test_getters(self):
        self.assertEqual(self._rect.get_x(), 2)
        self.assertEqual(self._rect.get_y(), 3)
        self.assertEqual(self._rect.get_w(), 4)
        self.assertEqual(self._rect.get_h(), 5)

    def test_crop(self):
        pixels = numpy.arange(100).reshape(10, 10)
        cropped = self._rect.crop(pixels)
        self.assertEqual(cropped.shape, (5, 4))
        self.assertEqual(int(cropped[0, 0]), 32)

    def test_crop_outside(self):
        with self.assertRaises(tifinaghocr.errors.DimensionError):
            self._rect.crop(numpy.zeros((6, 6)))

    def test_repr(self):
        self.assertEqual(repr(self._rect), 'Rect(x=2, y=3, w=4, h=5)')

    def test_empty(self):
        with self.assertRaises(tifinaghocr.errors.ConfigError):
            tifinaghocr.glyph_model.Rect(0, 0, 0, 1)


class PerturbResultTests(unittest.TestCase):

    def test_with_ink(self):
        result = tifinaghocr.glyph_model.PerturbResult(make_block_pixels())
        self.assertFalse(result.get_is_degenerate())
        self.assertEqual(result.get_glyph(), tifinaghocr.glyph_model.Glyph28(make_block_pixels()))

    def test_degenerate(self):
        result = tifinaghocr.glyph_model.PerturbResult(numpy.zeros((28, 28)))
        self.assertTrue(result.get_is_degenerate())
        with self.assertRaises(tifinaghocr.errors.DegenerateGlyphError):
            result.get_glyph()
