"""
Procedural synthetic corpus with the writer structure of the real collection.

Each of the 33 classes has a fixed stroke skeleton made of polylines, arcs and dots in a unit
square (y pointing down). Every writer draws all skeletons in a personal style (stroke width,
slant, jitter amplitude) and every glyph receives its own control point jitter. Skeletons only
loosely follow Tifinagh letterforms. They exist to provide a distinct shape per class.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import logging
import math
import typing

import numpy
import PIL.Image
import PIL.ImageDraw

import tifinaghocr.dataset_model
import tifinaghocr.errors
import tifinaghocr.glyph_model
import tifinaghocr.labels
import tifinaghocr.preprocess

CANVAS_SIZE = 40
DRAW_SIZE = 24
MIN_STROKE_WIDTH = 1
MAX_STROKE_WIDTH = 3
MAX_SLANT_DEGREES = 10.0
MAX_JITTER = 0.1
ARC_SEGMENTS = 24
BACKGROUND = 255
INK = 0

POINT = typing.Tuple[float, float]

LOGGER = logging.getLogger(__name__)


class Stroke:
    """One pen movement of a skeleton in unit square coordinates."""

    def get_points(self, rng: numpy.random.Generator, jitter: float) -> typing.List[POINT]:
        """Get the jittered points along this stroke.

        Args:
            rng: Generator supplying the per-glyph jitter.
            jitter: Largest control point offset as a share of the unit square.

        Returns:
            Points to connect with a line, a single point for dots.
        """
        raise NotImplementedError('Use implementor.')

    def is_dot(self) -> bool:
        """Determine if this stroke is drawn as a filled dot rather than a line."""
        return False


def jitter_point(point: POINT, rng: numpy.random.Generator, jitter: float) -> POINT:
    """Move a control point by up to jitter along each axis."""
    offset = rng.uniform(-jitter, jitter, size=2)
    return (point[0] + float(offset[0]), point[1] + float(offset[1]))


class Polyline(Stroke):
    """Connected straight segments through control points."""

    def __init__(self, *points: POINT):
        self._points = list(points)

    def get_points(self, rng: numpy.random.Generator, jitter: float) -> typing.List[POINT]:
        return [jitter_point(x, rng, jitter) for x in self._points]


class Arc(Stroke):
    """Part of a circle going counterclockwise on screen from start to end degrees."""

    def __init__(self, center: POINT, radius: float, start: float = 0, end: float = 360):
        self._center = center
        self._radius = radius
        self._start = start
        self._end = end

    def get_points(self, rng: numpy.random.Generator, jitter: float) -> typing.List[POINT]:
        center_x, center_y = jitter_point(self._center, rng, jitter)
        radius = self._radius * (1 + float(rng.uniform(-jitter, jitter)))

        angles = numpy.linspace(
            math.radians(self._start),
            math.radians(self._end),
            ARC_SEGMENTS + 1
        )
        return [
            (center_x + radius * math.cos(x), center_y - radius * math.sin(x))
            for x in angles
        ]


class Dot(Stroke):
    """A filled point."""

    def __init__(self, center: POINT):
        self._center = center

    def get_points(self, rng: numpy.random.Generator, jitter: float) -> typing.List[POINT]:
        return [jitter_point(self._center, rng, jitter)]

    def is_dot(self) -> bool:
        return True


LABIAL_TICK = Polyline((0.85, 0.0), (1.0, 0.0))

SKELETONS: typing.Dict[str, typing.List[Stroke]] = {
    'ya': [Arc((0.5, 0.5), 0.5)],
    'yab': [Arc((0.5, 0.5), 0.5), Dot((0.5, 0.5))],
    'yag': [
        Polyline((0.5, 0.0), (0.5, 1.0)),
        Polyline((0.1, 0.0), (0.9, 0.0)),
        Polyline((0.1, 1.0), (0.9, 1.0))
    ],
    'yagw': [
        Polyline((0.4, 0.1), (0.4, 1.0)),
        Polyline((0.0, 0.1), (0.7, 0.1)),
        Polyline((0.0, 1.0), (0.7, 1.0)),
        LABIAL_TICK
    ],
    'yad': [Polyline((0.0, 1.0), (0.5, 0.0), (1.0, 1.0))],
    'yadd': [
        Polyline((0.0, 1.0), (0.5, 0.0), (1.0, 1.0)),
        Polyline((0.25, 0.55), (0.75, 0.55))
    ],
    'yey': [Polyline((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0))],
    'yaf': [Polyline((0.0, 0.0), (1.0, 1.0)), Polyline((1.0, 0.0), (0.0, 1.0))],
    'yak': [Polyline((0.5, 0.0), (0.5, 1.0)), Polyline((0.0, 0.5), (1.0, 0.5))],
    'yakw': [
        Polyline((0.4, 0.1), (0.4, 1.0)),
        Polyline((0.0, 0.55), (0.8, 0.55)),
        LABIAL_TICK
    ],
    'yah': [Polyline((0.0, 1.0), (0.0, 0.0), (1.0, 0.0), (1.0, 1.0))],
    'yahh': [
        Polyline((0.3, 0.0), (0.3, 1.0)),
        Polyline((0.7, 0.0), (0.7, 1.0)),
        Polyline((0.0, 0.3), (1.0, 0.3)),
        Polyline((0.0, 0.7), (1.0, 0.7))
    ],
    'yaa': [Arc((0.5, 0.25), 0.25, -90, 90), Arc((0.5, 0.75), 0.25, -90, 90)],
    'yakh': [Arc((0.5, 0.5), 0.5), Polyline((0.0, 0.5), (1.0, 0.5))],
    'yaq': [Polyline((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0))],
    'yi': [Polyline((0.5, 0.0), (0.5, 1.0))],
    'yazh': [Polyline((0.5, 0.0), (0.5, 1.0)), Polyline((0.0, 0.0), (1.0, 0.0))],
    'yal': [Polyline((0.2, 0.0), (0.2, 1.0)), Polyline((0.8, 0.0), (0.8, 1.0))],
    'yam': [Polyline((0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0))],
    'yan': [Polyline((0.0, 0.5), (1.0, 0.5))],
    'yu': [Polyline((0.0, 0.3), (1.0, 0.3)), Polyline((0.0, 0.7), (1.0, 0.7))],
    'yar': [Arc((0.5, 0.7), 0.3), Polyline((0.5, 0.0), (0.5, 0.4))],
    'yarr': [
        Arc((0.5, 0.5), 0.25),
        Polyline((0.5, 0.0), (0.5, 0.25)),
        Polyline((0.5, 0.75), (0.5, 1.0))
    ],
    'yagh': [Polyline((0.0, 0.0), (0.5, 0.5), (1.0, 0.0)), Polyline((0.5, 0.5), (0.5, 1.0))],
    'yas': [Arc((0.5, 0.5), 0.5, 90, 270)],
    'yass': [Arc((0.5, 0.5), 0.5, 90, 270), Polyline((0.2, 0.5), (0.8, 0.5))],
    'yash': [Arc((0.5, 0.3), 0.5, 180, 360)],
    'yat': [Polyline((0.5, 0.0), (0.5, 1.0)), Polyline((0.0, 1.0), (1.0, 1.0))],
    'yatt': [Polyline((0.5, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.0))],
    'yaw': [Polyline((0.0, 0.0), (0.5, 1.0), (1.0, 0.0))],
    'yay': [Polyline((0.0, 0.0), (0.25, 1.0), (0.5, 0.3), (0.75, 1.0), (1.0, 0.0))],
    'yaz': [Polyline((0.0, 1.0), (0.0, 0.0), (1.0, 1.0), (1.0, 0.0))],
    'yazz': [
        Polyline((0.0, 0.0), (1.0, 1.0)),
        Polyline((1.0, 0.0), (0.0, 1.0)),
        Polyline((0.0, 0.0), (1.0, 0.0)),
        Polyline((0.0, 1.0), (1.0, 1.0))
    ]
}


class WriterStyle:
    """Handwriting parameters shared by every glyph of one synthetic writer."""

    def __init__(self, stroke_width: int, slant_degrees: float, jitter: float):
        """Create a new style.

        Args:
            stroke_width: Pen width in canvas pixels within [1, 3].
            slant_degrees: Shear angle within [-10, 10], positive leaning right.
            jitter: Largest control point offset as share of the unit square within [0, 0.1].
        """
        self._stroke_width = stroke_width
        self._slant_degrees = slant_degrees
        self._jitter = jitter

    def get_stroke_width(self) -> int:
        """Get the pen width in canvas pixels."""
        return self._stroke_width

    def get_slant_degrees(self) -> float:
        """Get the shear angle in degrees."""
        return self._slant_degrees

    def get_jitter(self) -> float:
        """Get the largest control point offset as share of the unit square."""
        return self._jitter


def draw_writer_style(seed: int, writer_id: int) -> WriterStyle:
    """Deterministically draw the style of a writer.

    Args:
        seed: Corpus seed.
        writer_id: The writer.

    Returns:
        Style drawn from a generator seeded by (seed, writer_id).
    """
    rng = numpy.random.default_rng([seed, writer_id])
    stroke_width = int(rng.integers(MIN_STROKE_WIDTH, MAX_STROKE_WIDTH + 1))
    slant = float(rng.uniform(-MAX_SLANT_DEGREES, MAX_SLANT_DEGREES))
    jitter = float(rng.uniform(0, MAX_JITTER))
    return WriterStyle(stroke_width, slant, jitter)


def to_canvas(point: POINT, shear: float) -> POINT:
    """Map a unit square point onto the canvas after shearing about the square center."""
    x, y = point
    sheared_x = x + shear * (0.5 - y)
    margin = (CANVAS_SIZE - DRAW_SIZE) / 2
    return (margin + sheared_x * DRAW_SIZE, margin + y * DRAW_SIZE)


def render_skeleton(strokes: typing.List[Stroke], style: WriterStyle,
    rng: numpy.random.Generator) -> tifinaghocr.glyph_model.RawGlyph:
    """Rasterize a skeleton as dark ink on a light canvas.

    Args:
        strokes: The skeleton to draw.
        style: Writer style to apply.
        rng: Generator for the per-glyph jitter.

    Returns:
        Captured-style glyph of CANVAS_SIZE x CANVAS_SIZE pixels.
    """
    image = PIL.Image.new('L', (CANVAS_SIZE, CANVAS_SIZE), BACKGROUND)
    draw = PIL.ImageDraw.Draw(image)

    shear = math.tan(math.radians(style.get_slant_degrees()))
    width = style.get_stroke_width()

    for stroke in strokes:
        points = [to_canvas(x, shear) for x in stroke.get_points(rng, style.get_jitter())]

        if stroke.is_dot():
            x, y = points[0]
            radius = max(width, 1.5)
            draw.ellipse((x - radius, y - radius, x + radius, y + radius), fill=INK)
        else:
            draw.line(points, fill=INK, width=width, joint='curve')

    return tifinaghocr.glyph_model.RawGlyph(numpy.asarray(image))


def get_skeleton(name: str) -> typing.List[Stroke]:
    """Get the skeleton for a romanized letter name.

    Raises:
        InternalConsistencyError: Raised if no skeleton is defined for the letter.
    """
    if name not in SKELETONS:
        raise tifinaghocr.errors.InternalConsistencyError('No skeleton for letter %s.' % name)

    return SKELETONS[name]


def synth_glyph(label: int, writer_id: int, seed: int,
    registry: tifinaghocr.labels.LabelRegistry) -> tifinaghocr.glyph_model.Glyph28:
    """Draw and normalize one synthetic glyph.

    Args:
        label: Class index.
        writer_id: The writer drawing the glyph.
        seed: Corpus seed.
        registry: Registry mapping the class index to its letter.

    Returns:
        Normalized glyph.
    """
    style = draw_writer_style(seed, writer_id)
    strokes = get_skeleton(registry.get_name(label))
    rng = numpy.random.default_rng([seed, writer_id, label])
    raw = render_skeleton(strokes, style, rng)
    return tifinaghocr.preprocess.preprocess_glyph(raw)


def synth_corpus(n_writers: int, seed: int,
    registry: tifinaghocr.labels.LabelRegistry) -> tifinaghocr.dataset_model.Corpus:
    """Generate a synthetic corpus of n_writers x 33 glyphs.

    Args:
        n_writers: Number of writers, at least 1. Writer ids run from 0 to n_writers - 1.
        seed: Seed making the corpus bit-identical across runs.
        registry: Label registry.

    Returns:
        Corpus sorted by (writer_id, label).
    """
    if n_writers < 1:
        raise tifinaghocr.errors.ConfigError('Need at least one writer, got %d.' % n_writers)

    examples = [
        tifinaghocr.dataset_model.Example(
            synth_glyph(label, writer_id, seed, registry),
            label,
            writer_id
        )
        for writer_id in range(n_writers)
        for label in range(registry.get_size())
    ]

    corpus = tifinaghocr.dataset_model.Corpus(examples, registry)
    corpus.check_dense_writers()

    LOGGER.info('Synthesized %d examples from %d writers.', corpus.get_size(), n_writers)
    return corpus
