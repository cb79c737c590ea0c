"""
Normalization of captured glyphs into 28x28 network inputs along with augmentation operators.

The pipeline inverts dark-on-light captures, finds the ink with an Otsu threshold, crops the tight
bounding box, scales it with bicubic interpolation so that its longer side fills the 24 pixel
content area, and centers it on a black 28x28 canvas leaving a 2 pixel empty frame.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import math
import typing

import numpy

import tifinaghocr.errors
import tifinaghocr.glyph_model

from tifinaghocr.glyph_model import FRAME_WIDTH
from tifinaghocr.glyph_model import GLYPH_SIZE
from tifinaghocr.glyph_model import MAX_PIXEL
from tifinaghocr.typesdef import SCALE_RANGE
from tifinaghocr.typesdef import SEED

BICUBIC_A = -0.5
BICUBIC_TAPS = 4
POLARITY_MIDPOINT = 127
NUM_LEVELS = 256
DEFAULT_MAX_SHIFT = 2
DEFAULT_SCALE_RANGE = (0.9, 1.1)

IMAGE_LIKE = typing.Union[numpy.ndarray, tifinaghocr.glyph_model.RawGlyph]


def round_half_up(value: float) -> int:
    """Round to the nearest integer with halves going up."""
    return int(math.floor(value + 0.5))


def get_pixels(target: IMAGE_LIKE) -> numpy.ndarray:
    """Get the 2D pixel array behind an image-like value."""
    if isinstance(target, tifinaghocr.glyph_model.RawGlyph):
        return target.get_pixels()
    else:
        return numpy.asarray(target)


def normalize_polarity(raw: tifinaghocr.glyph_model.RawGlyph) -> tifinaghocr.glyph_model.RawGlyph:
    """Make the background black and the ink bright.

    The background is estimated by the median of the pixels on the image border. If it is light
    (above 127) the image is inverted with v <- 255 - v. Otherwise it is returned unchanged.

    Args:
        raw: The captured glyph.

    Returns:
        Glyph with a dark background.
    """
    pixels = raw.get_pixels()

    border_mask = numpy.zeros(pixels.shape, dtype=bool)
    border_mask[0, :] = True
    border_mask[-1, :] = True
    border_mask[:, 0] = True
    border_mask[:, -1] = True

    background = float(numpy.median(pixels[border_mask]))
    if background > POLARITY_MIDPOINT:
        return tifinaghocr.glyph_model.RawGlyph(MAX_PIXEL - pixels)
    else:
        return raw


def otsu_threshold(gray: IMAGE_LIKE) -> int:
    """Find the threshold maximizing between-class variance of the gray histogram.

    Pixels at or below the threshold form the background class and pixels above it the
    foreground. The search is exhaustive over [0, 255) using exact integer arithmetic and ties go
    to the smallest threshold such that a constant image yields 0.

    Args:
        gray: Image with 8-bit values.

    Returns:
        The threshold.
    """
    pixels = get_pixels(gray)
    histogram = [int(x) for x in numpy.bincount(pixels.ravel(), minlength=NUM_LEVELS)]

    total_count = sum(histogram)
    total_sum = sum(level * count for level, count in enumerate(histogram))

    best_threshold = 0
    best_numerator = 0
    best_denominator = 1

    count_below = 0
    sum_below = 0
    for threshold in range(NUM_LEVELS - 1):
        count_below += histogram[threshold]
        sum_below += threshold * histogram[threshold]
        count_above = total_count - count_below
        sum_above = total_sum - sum_below

        if count_below == 0 or count_above == 0:
            continue

        # Variance up to the constant factor 1 / total_count^2.
        numerator = (sum_below * count_above - sum_above * count_below) ** 2
        denominator = count_below * count_above

        if numerator * best_denominator > best_numerator * denominator:
            best_threshold = threshold
            best_numerator = numerator
            best_denominator = denominator

    return best_threshold


def get_ink_bbox(pixels: numpy.ndarray, threshold: int) -> tifinaghocr.glyph_model.Rect:
    """Find the tightest rectangle holding every pixel above a threshold.

    Args:
        pixels: Image of shape [height, width].
        threshold: Pixels strictly above this value are ink.

    Returns:
        Bounding rectangle of the ink.

    Raises:
        NoForegroundError: Raised if no pixel exceeds the threshold.
    """
    mask = pixels > threshold
    rows = numpy.nonzero(mask.any(axis=1))[0]
    if rows.size == 0:
        raise tifinaghocr.errors.NoForegroundError(
            'No pixel exceeds threshold %d.' % threshold
        )

    cols = numpy.nonzero(mask.any(axis=0))[0]
    top = int(rows[0])
    left = int(cols[0])
    return tifinaghocr.glyph_model.Rect(
        left,
        top,
        int(cols[-1]) - left + 1,
        int(rows[-1]) - top + 1
    )


def foreground_bbox(gray: tifinaghocr.glyph_model.RawGlyph,
    threshold: int) -> tifinaghocr.glyph_model.Rect:
    """Find the region around the actual character in a polarity-normalized glyph.

    Args:
        gray: Glyph with a dark background.
        threshold: Pixels strictly above this value are ink.

    Returns:
        Tightest rectangle holding all ink.
    """
    return get_ink_bbox(gray.get_pixels(), threshold)


def bicubic_kernel(x: numpy.ndarray) -> numpy.ndarray:
    """Evaluate the cubic convolution kernel with a = -0.5 (Catmull-Rom)."""
    a = BICUBIC_A
    distance = numpy.abs(x)
    distance_2 = distance * distance
    distance_3 = distance_2 * distance

    near = (a + 2) * distance_3 - (a + 3) * distance_2 + 1
    far = a * distance_3 - 5 * a * distance_2 + 8 * a * distance - 4 * a

    return numpy.where(distance <= 1, near, numpy.where(distance < 2, far, 0.0))


def build_resample_matrix(in_size: int, out_size: int) -> numpy.ndarray:
    """Build the matrix mapping one image axis to its resampled version.

    Sample positions follow pixel centers. Each output sample reads the four input pixels around
    its mapped source coordinate, from floor(center) - 1 to floor(center) + 2, with taps beyond
    the image clamped to the edge pixel. The kernel keeps its width at every scale.

    Args:
        in_size: Input length.
        out_size: Output length.

    Returns:
        Matrix of shape [out_size, in_size].
    """
    scale = in_size / out_size

    matrix = numpy.zeros((out_size, in_size), dtype=numpy.float64)
    for out_index in range(out_size):
        center = (out_index + 0.5) * scale - 0.5
        first = math.floor(center) - 1
        taps = numpy.arange(first, first + BICUBIC_TAPS)
        weights = bicubic_kernel(taps - center)
        clamped = numpy.clip(taps, 0, in_size - 1)
        numpy.add.at(matrix[out_index], clamped, weights)

    return matrix


def resize_bicubic(gray: IMAGE_LIKE, out_w: int, out_h: int) -> numpy.ndarray:
    """Resample an image with bicubic interpolation.

    Args:
        gray: Image with 8-bit values.
        out_w: Output width, at least 1.
        out_h: Output height, at least 1.

    Returns:
        uint8 array of shape [out_h, out_w]. Values are clamped to [0, 255] and rounded half up.
    """
    if out_w < 1 or out_h < 1:
        raise tifinaghocr.errors.ConfigError(
            'Output size must be at least 1x1, got %dx%d.' % (out_w, out_h)
        )

    pixels = get_pixels(gray).astype(numpy.float64)
    in_h, in_w = pixels.shape

    row_matrix = build_resample_matrix(in_h, out_h)
    col_matrix = build_resample_matrix(in_w, out_w)
    resampled = row_matrix @ pixels @ col_matrix.T

    clamped = numpy.clip(resampled, 0, MAX_PIXEL)
    return numpy.floor(clamped + 0.5).astype(numpy.uint8)


def fit_dimensions(width: int, height: int, longest: int) -> typing.Tuple[int, int]:
    """Scale a box so its longer side equals longest while preserving aspect ratio.

    Args:
        width: Box width.
        height: Box height.
        longest: Target length for the longer side.

    Returns:
        Tuple of new width and new height, each at least 1.
    """
    factor = longest / max(width, height)
    return (
        max(1, round_half_up(width * factor)),
        max(1, round_half_up(height * factor))
    )


def place_centered(content: numpy.ndarray, target: int) -> numpy.ndarray:
    """Place an image on a zero square canvas using floor offsets.

    Args:
        content: Image no larger than the canvas.
        target: Canvas side length.

    Returns:
        uint8 canvas of shape [target, target].
    """
    height, width = content.shape
    canvas = numpy.zeros((target, target), dtype=numpy.uint8)
    top = (target - height) // 2
    left = (target - width) // 2
    canvas[top:top + height, left:left + width] = content
    return canvas


def preprocess_glyph(raw: tifinaghocr.glyph_model.RawGlyph, target: int = GLYPH_SIZE,
    border: int = FRAME_WIDTH) -> tifinaghocr.glyph_model.Glyph28:
    """Normalize a captured glyph into a network-ready 28x28 image.

    Args:
        raw: The captured glyph in either polarity.
        target: Side of the output square. Only 28 is supported.
        border: Width of the empty frame around the content area.

    Returns:
        Normalized glyph whose ink bounding box has a long side of target - 2 * border.

    Raises:
        NoForegroundError: Raised if the glyph holds no ink.
        ConfigError: Raised if target or border are unsupported.
    """
    if target != GLYPH_SIZE:
        raise tifinaghocr.errors.ConfigError('Only %d pixel targets are supported.' % GLYPH_SIZE)

    content_size = target - 2 * border
    if border < 0 or content_size < 1:
        raise tifinaghocr.errors.ConfigError('Border %d leaves no content area.' % border)

    normalized = normalize_polarity(raw)
    threshold = otsu_threshold(normalized)
    region = foreground_bbox(normalized, threshold)
    cropped = region.crop(normalized.get_pixels())

    new_width, new_height = fit_dimensions(region.get_w(), region.get_h(), content_size)
    scaled = resize_bicubic(cropped, new_width, new_height)

    canvas = place_centered(scaled, target)
    if not canvas.any():
        raise tifinaghocr.errors.NoForegroundError('Ink vanished while resampling.')

    return tifinaghocr.glyph_model.Glyph28(canvas, frame=border)


def check_augment_args(max_shift: int, scale_range: SCALE_RANGE):
    """Validate augmentation parameters."""
    if max_shift < 0:
        raise tifinaghocr.errors.ConfigError('Shift must be non-negative, got %d.' % max_shift)

    low, high = scale_range
    if not (0 < low <= high):
        raise tifinaghocr.errors.ConfigError('Invalid scale range %s.' % (scale_range,))


def clamp(value: int, low: int, high: int) -> int:
    """Limit value to [low, high]."""
    return max(low, min(high, value))


def augment(glyph: tifinaghocr.glyph_model.Glyph28, rng_seed: SEED,
    max_shift: int = DEFAULT_MAX_SHIFT,
    scale_range: SCALE_RANGE = DEFAULT_SCALE_RANGE) -> tifinaghocr.glyph_model.Glyph28:
    """Randomly translate and rescale the ink of a glyph.

    The ink bounding box is rescaled about its center by a factor drawn uniformly from
    scale_range (capped so the ink still fits the content area) and shifted by an integer offset
    in [-max_shift, max_shift] on each axis. Placement is clamped so the empty frame survives.

    Args:
        glyph: Normalized glyph.
        rng_seed: Seed making the result deterministic.
        max_shift: Largest translation in pixels.
        scale_range: Tuple of the smallest and largest scale factor.

    Returns:
        Augmented glyph.
    """
    check_augment_args(max_shift, scale_range)

    rng = numpy.random.default_rng(rng_seed)
    shift_x, shift_y = [int(x) for x in rng.integers(-max_shift, max_shift + 1, size=2)]
    low, high = scale_range
    scale = low if low == high else float(rng.uniform(low, high))

    pixels = glyph.get_pixels()
    region = get_ink_bbox(pixels, 0)
    width = region.get_w()
    height = region.get_h()

    content_size = GLYPH_SIZE - 2 * FRAME_WIDTH
    factor = min(scale, content_size / max(width, height))
    new_width = clamp(round_half_up(width * factor), 1, content_size)
    new_height = clamp(round_half_up(height * factor), 1, content_size)

    cropped = region.crop(pixels)
    if (new_width, new_height) == (width, height):
        scaled = cropped
    else:
        scaled = resize_bicubic(cropped, new_width, new_height)

    top = region.get_y() + (height - new_height) // 2 + shift_y
    left = region.get_x() + (width - new_width) // 2 + shift_x
    top = clamp(top, FRAME_WIDTH, GLYPH_SIZE - FRAME_WIDTH - new_height)
    left = clamp(left, FRAME_WIDTH, GLYPH_SIZE - FRAME_WIDTH - new_width)

    canvas = numpy.zeros((GLYPH_SIZE, GLYPH_SIZE), dtype=numpy.uint8)
    canvas[top:top + new_height, left:left + new_width] = scaled

    if not canvas.any():
        return glyph

    return tifinaghocr.glyph_model.Glyph28(canvas)


def perturb_missing_parts(glyph: tifinaghocr.glyph_model.Glyph28, fraction: float,
    rng_seed: SEED) -> tifinaghocr.glyph_model.PerturbResult:
    """Erase a random rectangle from the ink of a glyph.

    The erased rectangle keeps the aspect ratio of the ink bounding box, covers about fraction of
    its area and lies entirely inside it.

    Args:
        glyph: Normalized glyph.
        fraction: Share of the ink bounding box area to erase in [0, 1].
        rng_seed: Seed making the result deterministic.

    Returns:
        Result holding the perturbed image and a flag for when no ink remains.

    Raises:
        ConfigError: Raised if fraction is outside [0, 1].
    """
    if not (0 <= fraction <= 1):
        raise tifinaghocr.errors.ConfigError('Fraction must be in [0, 1], got %s.' % fraction)

    pixels = numpy.array(glyph.get_pixels())
    if fraction == 0:
        return tifinaghocr.glyph_model.PerturbResult(pixels)

    region = get_ink_bbox(pixels, 0)
    width = region.get_w()
    height = region.get_h()

    side_factor = math.sqrt(fraction)
    erase_width = clamp(round_half_up(width * side_factor), 1, width)
    erase_height = clamp(round_half_up(height * side_factor), 1, height)

    rng = numpy.random.default_rng(rng_seed)
    top = region.get_y() + int(rng.integers(0, height - erase_height + 1))
    left = region.get_x() + int(rng.integers(0, width - erase_width + 1))

    pixels[top:top + erase_height, left:left + erase_width] = 0
    return tifinaghocr.glyph_model.PerturbResult(pixels)
