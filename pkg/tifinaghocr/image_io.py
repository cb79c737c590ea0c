"""
Reading and writing of single glyph image files.

Binary PGM (P5) is always supported. PNG files are read through Pillow.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import os
import typing

import numpy
import PIL.Image

import tifinaghocr.errors
import tifinaghocr.glyph_model

from tifinaghocr.glyph_model import MAX_PIXEL

PGM_MAGIC = b'P5'
WHITESPACE = b' \t\r\n'
SUPPORTED_EXTENSIONS = ('.pgm', '.png')


def read_header_token(data: bytes, offset: int) -> typing.Tuple[bytes, int]:
    """Read the next whitespace separated token of a PGM header.

    Args:
        data: The complete file contents.
        offset: Position from which to start reading.

    Returns:
        Tuple of the token and the offset just after it.
    """
    while offset < len(data):
        if data[offset:offset + 1] == b'#':
            while offset < len(data) and data[offset:offset + 1] not in (b'\n', b'\r'):
                offset += 1
        elif data[offset:offset + 1] in WHITESPACE:
            offset += 1
        else:
            break

    start = offset
    while offset < len(data) and data[offset:offset + 1] not in WHITESPACE:
        offset += 1

    if start == offset:
        raise tifinaghocr.errors.FormatError('Truncated PGM header', start)

    return (data[start:offset], offset)


def parse_header_int(token: bytes, offset: int, name: str) -> int:
    """Parse a positive integer header field."""
    try:
        value = int(token)
    except ValueError:
        raise tifinaghocr.errors.FormatError('Invalid PGM %s %r' % (name, token), offset)

    if value < 1:
        raise tifinaghocr.errors.FormatError('PGM %s must be positive' % name, offset)

    return value


def decode_pgm(data: bytes) -> numpy.ndarray:
    """Decode the contents of a binary PGM file.

    Args:
        data: Raw file bytes.

    Returns:
        uint8 array of shape [height, width]. Files with a maxval below 255 are rescaled.

    Raises:
        FormatError: Raised if the file is not an 8-bit binary PGM.
    """
    if data[0:2] != PGM_MAGIC:
        raise tifinaghocr.errors.FormatError('Not a binary PGM (P5) file', 0)

    width_token, offset = read_header_token(data, 2)
    width = parse_header_int(width_token, offset - len(width_token), 'width')

    height_token, offset = read_header_token(data, offset)
    height = parse_header_int(height_token, offset - len(height_token), 'height')

    maxval_token, offset = read_header_token(data, offset)
    maxval = parse_header_int(maxval_token, offset - len(maxval_token), 'maxval')
    if maxval > MAX_PIXEL:
        raise tifinaghocr.errors.FormatError('Only 8-bit PGM files are supported', offset)

    # Exactly one whitespace byte separates the header from the raster.
    offset += 1
    expected = width * height
    raster = data[offset:offset + expected]
    if len(raster) != expected:
        raise tifinaghocr.errors.FormatError(
            'Expected %d raster bytes, found %d' % (expected, len(raster)),
            offset
        )

    pixels = numpy.frombuffer(raster, dtype=numpy.uint8).reshape(height, width)
    if maxval == MAX_PIXEL:
        return pixels.copy()

    if int(pixels.max()) > maxval:
        raise tifinaghocr.errors.FormatError('Pixel above maxval %d' % maxval, offset)

    scaled = numpy.floor(pixels.astype(numpy.float64) * MAX_PIXEL / maxval + 0.5)
    return scaled.astype(numpy.uint8)


def encode_pgm(pixels: numpy.ndarray) -> bytes:
    """Encode a 2D uint8 image as a binary PGM file."""
    array = tifinaghocr.glyph_model.as_pixel_array(pixels)
    height, width = array.shape
    header = b'P5\n%d %d\n%d\n' % (width, height, MAX_PIXEL)
    return header + array.tobytes()


def read_pgm(path: str) -> tifinaghocr.glyph_model.RawGlyph:
    """Read a binary PGM file.

    Args:
        path: Location of the file.

    Returns:
        The image as a raw glyph.
    """
    with open(path, 'rb') as f:
        data = f.read()

    return tifinaghocr.glyph_model.RawGlyph(decode_pgm(data))


def write_pgm(path: str, pixels: numpy.ndarray):
    """Write a 2D uint8 image as a binary PGM file.

    Args:
        path: Location at which to write.
        pixels: Image of shape [height, width].
    """
    with open(path, 'wb') as f:
        f.write(encode_pgm(pixels))


def read_png(path: str) -> tifinaghocr.glyph_model.RawGlyph:
    """Read a PNG file as a grayscale glyph.

    Args:
        path: Location of the file.

    Returns:
        The image converted to 8-bit luminance.
    """
    try:
        with PIL.Image.open(path) as image:
            pixels = numpy.asarray(image.convert('L'))
    except PIL.UnidentifiedImageError as e:
        raise tifinaghocr.errors.FormatError('Unreadable PNG %s (%s)' % (path, str(e)))

    return tifinaghocr.glyph_model.RawGlyph(pixels)


def is_supported_image(path: str) -> bool:
    """Determine if a file has an extension this module can read."""
    return os.path.splitext(path)[1].lower() in SUPPORTED_EXTENSIONS


def load_raw_glyph(path: str) -> tifinaghocr.glyph_model.RawGlyph:
    """Read a glyph image choosing the codec by file extension.

    Args:
        path: Location of a .pgm or .png file.

    Returns:
        The image as a raw glyph.

    Raises:
        FormatError: Raised if the extension is not supported or the file is malformed.
    """
    extension = os.path.splitext(path)[1].lower()
    if extension == '.pgm':
        return read_pgm(path)
    elif extension == '.png':
        return read_png(path)
    else:
        raise tifinaghocr.errors.FormatError('Unsupported image type: %s' % path)
