"""
Image records used by the preprocessing pipeline.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import numpy

import tifinaghocr.errors

GLYPH_SIZE = 28
FRAME_WIDTH = 2
MAX_PIXEL = 255


def as_pixel_array(pixels) -> numpy.ndarray:
    """Convert image data to a 2D uint8 array after checking the value range.

    Args:
        pixels: Array-like of shape [height, width] with values in [0, 255].

    Returns:
        Copy of the pixels as uint8.

    Raises:
        DimensionError: Raised if the data are not a non-empty 2D array.
        ConfigError: Raised if a value is outside [0, 255].
    """
    array = numpy.asarray(pixels)
    if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
        raise tifinaghocr.errors.DimensionError(
            'Expected a non-empty 2D image, got shape %s.' % (array.shape,)
        )

    if array.dtype != numpy.uint8:
        if array.min() < 0 or array.max() > MAX_PIXEL:
            raise tifinaghocr.errors.ConfigError('Pixel values must be within [0, 255].')

    return numpy.array(array, dtype=numpy.uint8, copy=True)


class RawGlyph:
    """A captured grayscale glyph of any size and unknown polarity."""

    def __init__(self, pixels):
        """Create a new raw glyph.

        Args:
            pixels: Array-like of shape [height, width] with 8-bit gray values.
        """
        self._pixels = as_pixel_array(pixels)
        self._pixels.setflags(write=False)

    def get_pixels(self) -> numpy.ndarray:
        """Get the pixel values.

        Returns:
            Read-only uint8 array of shape [height, width].
        """
        return self._pixels

    def get_width(self) -> int:
        """Get the number of columns.

        Returns:
            Image width in pixels.
        """
        return int(self._pixels.shape[1])

    def get_height(self) -> int:
        """Get the number of rows.

        Returns:
            Image height in pixels.
        """
        return int(self._pixels.shape[0])


class Glyph28:
    """A normalized 28x28 glyph with a black (zero) background and bright ink.

    The outer frame of the image is always zero. Unless built with allow_blank, at least one pixel
    holds ink.
    """

    def __init__(self, pixels, frame: int = FRAME_WIDTH, allow_blank: bool = False):
        """Create a new normalized glyph.

        Args:
            pixels: Array-like of shape [28, 28].
            frame: Width of the border that must be entirely zero.
            allow_blank: Flag indicating if an image without ink is accepted.

        Raises:
            DimensionError: Raised if the image is not 28x28.
            ConfigError: Raised if the frame holds ink or the image is blank when not allowed.
        """
        array = as_pixel_array(pixels)
        if array.shape != (GLYPH_SIZE, GLYPH_SIZE):
            raise tifinaghocr.errors.DimensionError(
                'Expected a %dx%d glyph, got shape %s.' % (GLYPH_SIZE, GLYPH_SIZE, array.shape)
            )

        if frame > 0:
            interior = array[frame:-frame, frame:-frame]
            if int(array.sum(dtype=numpy.int64)) != int(interior.sum(dtype=numpy.int64)):
                raise tifinaghocr.errors.ConfigError(
                    'Glyph has ink within its %d pixel frame.' % frame
                )

        if not allow_blank and not array.any():
            raise tifinaghocr.errors.ConfigError('Glyph has no ink.')

        self._pixels = array
        self._pixels.setflags(write=False)

    def get_pixels(self) -> numpy.ndarray:
        """Get the pixel values.

        Returns:
            Read-only uint8 array of shape [28, 28].
        """
        return self._pixels

    def is_blank(self) -> bool:
        """Determine if no pixel holds ink.

        Returns:
            True if every pixel is zero.
        """
        return not self._pixels.any()

    def to_tensor(self, dtype=numpy.float32) -> numpy.ndarray:
        """Get the network input for this glyph.

        Args:
            dtype: Floating point precision of the result.

        Returns:
            Array of shape [1, 28, 28] holding pixels / 255.
        """
        return (self._pixels.astype(dtype) / MAX_PIXEL)[None, :, :]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Glyph28):
            return False

        return numpy.array_equal(self._pixels, other.get_pixels())

    def __hash__(self) -> int:
        return hash(self._pixels.tobytes())


class Rect:
    """An axis aligned rectangle in pixel coordinates."""

    def __init__(self, x: int, y: int, w: int, h: int):
        """Create a new rectangle.

        Args:
            x: Left column.
            y: Top row.
            w: Width which must be at least 1.
            h: Height which must be at least 1.
        """
        if w < 1 or h < 1:
            raise tifinaghocr.errors.ConfigError('Rect must be at least 1x1, got %dx%d.' % (w, h))

        self._x = int(x)
        self._y = int(y)
        self._w = int(w)
        self._h = int(h)

    def get_x(self) -> int:
        """Get the left column.

        Returns:
            Zero-based column index.
        """
        return self._x

    def get_y(self) -> int:
        """Get the top row.

        Returns:
            Zero-based row index.
        """
        return self._y

    def get_w(self) -> int:
        """Get the width.

        Returns:
            Number of columns covered.
        """
        return self._w

    def get_h(self) -> int:
        """Get the height.

        Returns:
            Number of rows covered.
        """
        return self._h

    def crop(self, pixels: numpy.ndarray) -> numpy.ndarray:
        """Cut this rectangle out of an image.

        Args:
            pixels: Image of shape [height, width] containing this rectangle.

        Returns:
            Copy of the covered region.
        """
        height, width = pixels.shape
        if self._x < 0 or self._y < 0 or self._x + self._w > width or self._y + self._h > height:
            raise tifinaghocr.errors.DimensionError(
                'Rect %s lies outside of a %dx%d image.' % (repr(self), width, height)
            )

        return numpy.array(pixels[self._y:self._y + self._h, self._x:self._x + self._w])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Rect):
            return False

        return (self._x, self._y, self._w, self._h) == (
            other.get_x(),
            other.get_y(),
            other.get_w(),
            other.get_h()
        )

    def __hash__(self) -> int:
        return hash((self._x, self._y, self._w, self._h))

    def __repr__(self) -> str:
        return 'Rect(x=%d, y=%d, w=%d, h=%d)' % (self._x, self._y, self._w, self._h)


class PerturbResult:
    """Outcome of erasing part of a glyph.

    Erasing may remove all of the ink in which case the result is degenerate and cannot be used as
    a Glyph28.
    """

    def __init__(self, pixels: numpy.ndarray):
        """Create a new perturbation result.

        Args:
            pixels: The 28x28 image after erasure.
        """
        self._glyph = Glyph28(pixels, allow_blank=True)

    def get_pixels(self) -> numpy.ndarray:
        """Get the image after erasure.

        Returns:
            Read-only uint8 array of shape [28, 28], possibly all zero.
        """
        return self._glyph.get_pixels()

    def get_is_degenerate(self) -> bool:
        """Determine if the erasure removed every ink pixel.

        Returns:
            True if no ink remains.
        """
        return self._glyph.is_blank()

    def get_glyph(self) -> Glyph28:
        """Get the perturbed glyph.

        Returns:
            The glyph after erasure.

        Raises:
            DegenerateGlyphError: Raised if no ink remains.
        """
        if self.get_is_degenerate():
            raise tifinaghocr.errors.DegenerateGlyphError('Perturbation erased all ink.')

        return self._glyph
