"""
Serialization, ingestion, splitting and expansion of glyph corpora.

Corpora are stored as an MNIST-compatible pair of IDX files (images and labels) plus a plain text
sidecar holding one writer id per line in the same order, since IDX has no field for writers.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import logging
import os
import struct
import typing

import numpy
import toolz  # type: ignore

import tifinaghocr.dataset_model
import tifinaghocr.errors
import tifinaghocr.glyph_model
import tifinaghocr.image_io
import tifinaghocr.labels
import tifinaghocr.preprocess

from tifinaghocr.glyph_model import GLYPH_SIZE
from tifinaghocr.typesdef import OPT_STR

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
IMAGES_HEADER_SIZE = 16
LABELS_HEADER_SIZE = 8
GLYPH_BYTES = GLYPH_SIZE * GLYPH_SIZE
DEFAULT_TRAIN_FRACTION = 0.86

IDX_DATA_TYPES = {
    0x08: 'ubyte',
    0x09: 'byte',
    0x0B: 'short',
    0x0C: 'int',
    0x0D: 'float',
    0x0E: 'double'
}

LOGGER = logging.getLogger(__name__)


class IdxHeader:
    """Description of an IDX file taken from its header alone."""

    def __init__(self, data_type: int, dims: typing.Iterable[int]):
        """Create a new header record.

        Args:
            data_type: The type code from the third magic byte like 0x08 for unsigned bytes.
            dims: Size of each dimension in file order.
        """
        self._data_type = data_type
        self._dims = tuple(dims)

    def get_data_type(self) -> int:
        """Get the element type code.

        Returns:
            Type code like 0x08.
        """
        return self._data_type

    def get_dims(self) -> typing.Tuple[int, ...]:
        """Get the dimension sizes.

        Returns:
            Tuple with the count first, for example (10000, 28, 28) for MNIST test images.
        """
        return self._dims

    def get_magic(self) -> int:
        """Get the magic number implied by type and rank.

        Returns:
            Magic like 0x00000803.
        """
        return (self._data_type << 8) | len(self._dims)

    def get_count(self) -> int:
        """Get the number of records (size of the first dimension)."""
        return self._dims[0]

    def get_payload_size(self) -> int:
        """Get the number of elements following the header."""
        return int(numpy.prod(self._dims, dtype=numpy.int64))


def parse_idx_header(data: bytes) -> IdxHeader:
    """Parse the header at the start of IDX file contents.

    Args:
        data: File contents, at least through the end of the header.

    Returns:
        Parsed header.

    Raises:
        FormatError: Raised for an unknown magic or a truncated header.
    """
    if len(data) < 4:
        raise tifinaghocr.errors.FormatError('Truncated IDX magic', len(data))

    if data[0] != 0 or data[1] != 0:
        raise tifinaghocr.errors.FormatError('Bad IDX magic 0x%s' % data[0:4].hex(), 0)

    data_type = data[2]
    rank = data[3]
    if data_type not in IDX_DATA_TYPES or rank < 1:
        raise tifinaghocr.errors.FormatError('Bad IDX magic 0x%s' % data[0:4].hex(), 0)

    header_size = 4 + 4 * rank
    if len(data) < header_size:
        raise tifinaghocr.errors.FormatError(
            'Truncated IDX header: expected %d bytes' % header_size,
            len(data)
        )

    dims = struct.unpack('>%dI' % rank, data[4:header_size])
    return IdxHeader(data_type, dims)


def read_idx_header(path: str) -> IdxHeader:
    """Read the header of an IDX file without reading its payload.

    Args:
        path: Location of the file.

    Returns:
        Parsed header.
    """
    with open(path, 'rb') as f:
        start = f.read(4)
        rank = start[3] if len(start) == 4 else 0
        rest = f.read(4 * rank)

    return parse_idx_header(start + rest)


def encode_images(corpus: tifinaghocr.dataset_model.Corpus) -> bytes:
    """Serialize the glyphs of a corpus as an IDX images file."""
    header = struct.pack('>IIII', IMAGES_MAGIC, corpus.get_size(), GLYPH_SIZE, GLYPH_SIZE)
    payload = b''.join(map(
        lambda x: x.get_glyph().get_pixels().tobytes(),
        corpus.get_examples()
    ))
    return header + payload


def encode_labels(corpus: tifinaghocr.dataset_model.Corpus) -> bytes:
    """Serialize the labels of a corpus as an IDX labels file."""
    header = struct.pack('>II', LABELS_MAGIC, corpus.get_size())
    return header + bytes(x.get_label() for x in corpus.get_examples())


def write_idx(corpus: tifinaghocr.dataset_model.Corpus, images_path: str, labels_path: str):
    """Write a corpus as a pair of MNIST-compatible IDX files.

    Writer ids are not part of IDX. Use write_writer_sidecar to keep them.

    Args:
        corpus: Nonempty corpus to write.
        images_path: Location for the images file (magic 0x00000803).
        labels_path: Location for the labels file (magic 0x00000801).

    Raises:
        ConfigError: Raised if the corpus is empty.
    """
    if corpus.is_empty():
        raise tifinaghocr.errors.ConfigError('Cannot write an empty corpus.')

    with open(images_path, 'wb') as f:
        f.write(encode_images(corpus))

    with open(labels_path, 'wb') as f:
        f.write(encode_labels(corpus))


def check_magic(data: bytes, expected: int, name: str):
    """Check the magic number at the start of an IDX file."""
    if len(data) < 4:
        raise tifinaghocr.errors.FormatError('Truncated %s magic' % name, len(data))

    found = struct.unpack('>I', data[0:4])[0]
    if found != expected:
        raise tifinaghocr.errors.FormatError(
            'Bad %s magic 0x%08x, expected 0x%08x' % (name, found, expected),
            0
        )


def decode_images(data: bytes) -> typing.List[numpy.ndarray]:
    """Decode the contents of an IDX images file into 28x28 pixel arrays.

    Args:
        data: Raw file bytes.

    Returns:
        One uint8 array per image.

    Raises:
        FormatError: Raised for a bad magic, unexpected image size or truncation.
    """
    check_magic(data, IMAGES_MAGIC, 'images')

    if len(data) < IMAGES_HEADER_SIZE:
        raise tifinaghocr.errors.FormatError('Truncated images header', len(data))

    count, rows, cols = struct.unpack('>III', data[4:IMAGES_HEADER_SIZE])
    if rows != GLYPH_SIZE:
        raise tifinaghocr.errors.FormatError('Expected %d rows, got %d' % (GLYPH_SIZE, rows), 8)

    if cols != GLYPH_SIZE:
        raise tifinaghocr.errors.FormatError(
            'Expected %d columns, got %d' % (GLYPH_SIZE, cols),
            12
        )

    expected_size = IMAGES_HEADER_SIZE + count * GLYPH_BYTES
    if len(data) < expected_size:
        raise tifinaghocr.errors.FormatError(
            'Truncated images payload: expected %d bytes, found %d' % (expected_size, len(data)),
            len(data)
        )

    if len(data) > expected_size:
        raise tifinaghocr.errors.FormatError('Trailing bytes after images payload', expected_size)

    flat = numpy.frombuffer(data, dtype=numpy.uint8, offset=IMAGES_HEADER_SIZE)
    stacked = flat.reshape(count, GLYPH_SIZE, GLYPH_SIZE)
    return [numpy.array(x) for x in stacked]


def decode_labels(data: bytes) -> typing.List[int]:
    """Decode the contents of an IDX labels file.

    Args:
        data: Raw file bytes.

    Returns:
        One integer label per record.

    Raises:
        FormatError: Raised for a bad magic or truncation.
    """
    check_magic(data, LABELS_MAGIC, 'labels')

    if len(data) < LABELS_HEADER_SIZE:
        raise tifinaghocr.errors.FormatError('Truncated labels header', len(data))

    count = struct.unpack('>I', data[4:LABELS_HEADER_SIZE])[0]
    expected_size = LABELS_HEADER_SIZE + count
    if len(data) < expected_size:
        raise tifinaghocr.errors.FormatError(
            'Truncated labels payload: expected %d bytes, found %d' % (expected_size, len(data)),
            len(data)
        )

    if len(data) > expected_size:
        raise tifinaghocr.errors.FormatError('Trailing bytes after labels payload', expected_size)

    return list(data[LABELS_HEADER_SIZE:expected_size])


def write_writer_sidecar(corpus: tifinaghocr.dataset_model.Corpus, path: str):
    """Write the writer id of every example, one per line, in corpus order.

    Args:
        corpus: The corpus whose writers should be recorded.
        path: Location of the text file.
    """
    with open(path, 'w') as f:
        for example in corpus.get_examples():
            f.write('%d\n' % example.get_writer_id())


def read_writer_sidecar(path: str) -> typing.List[int]:
    """Read a writer sidecar.

    Args:
        path: Location of the text file.

    Returns:
        Writer ids in file order.

    Raises:
        FormatError: Raised if a line is not a non-negative decimal integer.
    """
    with open(path, 'rb') as f:
        data = f.read()

    writers = []
    offset = 0
    for line in data.splitlines(keepends=True):
        stripped = line.strip()
        if stripped:
            if not stripped.isdigit():
                raise tifinaghocr.errors.FormatError(
                    'Invalid writer id %r in %s' % (stripped, path),
                    offset
                )
            writers.append(int(stripped))

        offset += len(line)

    return writers


def read_idx(images_path: str, labels_path: str, registry: tifinaghocr.labels.LabelRegistry,
    writers_path: OPT_STR = None) -> tifinaghocr.dataset_model.Corpus:
    """Read a corpus from a pair of IDX files.

    Args:
        images_path: Location of the images file.
        labels_path: Location of the labels file.
        registry: Registry against which labels are checked.
        writers_path: Optional writer sidecar. If not given, every example gets writer 0.

    Returns:
        Corpus in file order.

    Raises:
        FormatError: Raised for bad magic, truncation, count mismatch, out of range labels or
            images breaking the glyph invariants. The message names the byte offset.
    """
    with open(images_path, 'rb') as f:
        images_data = f.read()

    with open(labels_path, 'rb') as f:
        labels_data = f.read()

    images = decode_images(images_data)
    labels = decode_labels(labels_data)

    if len(images) != len(labels):
        raise tifinaghocr.errors.FormatError(
            'Image count %d does not match label count %d' % (len(images), len(labels)),
            4
        )

    if writers_path is None:
        writers = [0] * len(images)
    else:
        writers = read_writer_sidecar(writers_path)
        if len(writers) != len(images):
            raise tifinaghocr.errors.FormatError(
                'Sidecar has %d writer ids for %d images' % (len(writers), len(images))
            )

    examples = []
    for position, (pixels, label, writer_id) in enumerate(zip(images, labels, writers)):
        if not registry.is_valid(label):
            raise tifinaghocr.errors.FormatError(
                'Label %d out of range' % label,
                LABELS_HEADER_SIZE + position
            )

        try:
            glyph = tifinaghocr.glyph_model.Glyph28(pixels)
        except tifinaghocr.errors.TifinaghError as e:
            raise tifinaghocr.errors.FormatError(
                'Invalid glyph (%s)' % str(e),
                IMAGES_HEADER_SIZE + position * GLYPH_BYTES
            )

        examples.append(tifinaghocr.dataset_model.Example(glyph, label, writer_id))

    corpus = tifinaghocr.dataset_model.Corpus(examples, registry)

    if writers_path is not None:
        try:
            corpus.check_dense_writers()
        except tifinaghocr.errors.ConfigError as e:
            raise tifinaghocr.errors.FormatError('%s in %s' % (str(e), writers_path))

    LOGGER.info('Read %d examples from %s.', corpus.get_size(), images_path)
    return corpus


def parse_index_name(name: str, path: str, kind: str) -> int:
    """Parse a non-negative decimal directory or file name."""
    if not name.isdigit():
        raise tifinaghocr.errors.IngestionError('Unparsable %s name' % kind, path)

    return int(name)


def load_image_file(path: str) -> tifinaghocr.glyph_model.Glyph28:
    """Read and normalize one file of an ingestion directory."""
    try:
        raw = tifinaghocr.image_io.load_raw_glyph(path)
    except (tifinaghocr.errors.FormatError, OSError) as e:
        raise tifinaghocr.errors.IngestionError('Unreadable image (%s)' % str(e), path)

    try:
        return tifinaghocr.preprocess.preprocess_glyph(raw)
    except tifinaghocr.errors.NoForegroundError as e:
        raise tifinaghocr.errors.NoForegroundError(str(e), path=path)


def load_writer_dir(writer_path: str, writer_id: int,
    registry: tifinaghocr.labels.LabelRegistry) -> typing.List[tifinaghocr.dataset_model.Example]:
    """Load the glyphs of one writer.

    Args:
        writer_path: Directory holding <label_index>.pgm files.
        writer_id: The writer to whom the files belong.
        registry: Registry against which labels are checked.

    Returns:
        Examples of this writer sorted by label.
    """
    examples = []
    seen: typing.Dict[int, str] = {}

    for file_name in sorted(os.listdir(writer_path)):
        file_path = os.path.join(writer_path, file_name)

        if not tifinaghocr.image_io.is_supported_image(file_path):
            raise tifinaghocr.errors.IngestionError('Unparsable filename', file_path)

        stem = os.path.splitext(file_name)[0]
        label = parse_index_name(stem, file_path, 'file')
        if not registry.is_valid(label):
            raise tifinaghocr.errors.IngestionError(
                'Label %d out of range [0, %d)' % (label, registry.get_size()),
                file_path
            )

        if label in seen:
            raise tifinaghocr.errors.IngestionError(
                'Label %d also provided by %s' % (label, seen[label]),
                file_path
            )

        seen[label] = file_path
        glyph = load_image_file(file_path)
        examples.append(tifinaghocr.dataset_model.Example(glyph, label, writer_id))

    return sorted(examples, key=lambda x: x.get_label())


def load_image_dir(root_path: str,
    registry: tifinaghocr.labels.LabelRegistry) -> tifinaghocr.dataset_model.Corpus:
    """Ingest a directory of captured glyphs laid out as root/<writer_id>/<label_index>.pgm.

    Every file is normalized through preprocess_glyph. PNG files are accepted alongside PGM.

    Args:
        root_path: Directory holding one subdirectory per writer.
        registry: Registry against which labels are checked.

    Returns:
        Corpus sorted by (writer_id, label).

    Raises:
        IngestionError: Raised for an unparsable name, an out of range label, an unreadable image,
            writer ids which are not dense from 0 or an empty directory.
        NoForegroundError: Raised with the offending path for an image without ink.
    """
    if not os.path.isdir(root_path):
        raise tifinaghocr.errors.IngestionError('Not a directory', root_path)

    writer_dirs = []
    for name in os.listdir(root_path):
        path = os.path.join(root_path, name)
        if os.path.isdir(path):
            writer_dirs.append((parse_index_name(name, path, 'writer directory'), path))
        else:
            LOGGER.warning('Skipping %s outside of a writer directory.', path)

    examples = []
    for writer_id, writer_path in sorted(writer_dirs):
        examples.extend(load_writer_dir(writer_path, writer_id, registry))

    if not examples:
        raise tifinaghocr.errors.IngestionError('Empty corpus', root_path)

    corpus = tifinaghocr.dataset_model.Corpus(examples, registry)
    try:
        corpus.check_dense_writers()
    except tifinaghocr.errors.ConfigError as e:
        raise tifinaghocr.errors.IngestionError(str(e), root_path)

    LOGGER.info(
        'Ingested %d examples from %d writers.',
        corpus.get_size(),
        len(corpus.get_writers())
    )
    return corpus


def get_train_writer_count(num_writers: int, train_fraction: float) -> int:
    """Determine how many writers go to the training split.

    Args:
        num_writers: Total writer count, at least 2.
        train_fraction: Share of writers for training in (0, 1).

    Returns:
        num_writers * train_fraction rounded half up and kept within [1, num_writers - 1] so
        both splits are nonempty.
    """
    count = tifinaghocr.preprocess.round_half_up(num_writers * train_fraction)
    return max(1, min(num_writers - 1, count))


def split_by_writer(corpus: tifinaghocr.dataset_model.Corpus,
    train_fraction: float = DEFAULT_TRAIN_FRACTION,
    seed: int = 0) -> tifinaghocr.dataset_model.SplitResult:
    """Partition a corpus into train and test sets such that no writer appears in both.

    Writers are shuffled with a generator seeded by seed and the first
    n_writers * train_fraction, rounded half up, go to training (88 of 102 at the default fraction).

    Args:
        corpus: Corpus with at least two writers.
        train_fraction: Share of writers assigned to training in (0, 1).
        seed: Shuffle seed.

    Returns:
        The split. Each half keeps the corpus order of its examples.

    Raises:
        ConfigError: Raised if the fraction is outside (0, 1) or fewer than two writers exist.
    """
    if not (0 < train_fraction < 1):
        raise tifinaghocr.errors.ConfigError(
            'Train fraction must be in (0, 1), got %s.' % train_fraction
        )

    writers = corpus.get_writers()
    if len(writers) < 2:
        raise tifinaghocr.errors.ConfigError(
            'Splitting by writer requires at least 2 writers, got %d.' % len(writers)
        )

    rng = numpy.random.default_rng(seed)
    shuffled = [writers[int(i)] for i in rng.permutation(len(writers))]

    train_count = get_train_writer_count(len(writers), train_fraction)
    train_writers = set(shuffled[:train_count])
    test_writers = set(shuffled[train_count:])

    by_side = toolz.groupby(
        lambda x: 'train' if x.get_writer_id() in train_writers else 'test',
        corpus.get_examples()
    )

    registry = corpus.get_registry()
    train = tifinaghocr.dataset_model.Corpus(by_side.get('train', []), registry)
    test = tifinaghocr.dataset_model.Corpus(by_side.get('test', []), registry)

    LOGGER.info(
        'Split %d writers into %d train (%d examples) and %d test (%d examples).',
        len(writers),
        len(train_writers),
        train.get_size(),
        len(test_writers),
        test.get_size()
    )

    return tifinaghocr.dataset_model.SplitResult(train, test, train_writers, test_writers)


def augment_corpus(corpus: tifinaghocr.dataset_model.Corpus, copies: int, seed: int,
    perturb_fraction: float = 0.0) -> tifinaghocr.dataset_model.Corpus:
    """Expand a corpus with augmented and optionally perturbed variants of every example.

    Each example is followed by its variants. Variant c of example i is augmented with the seed
    sequence (seed, i, c) and, if perturb_fraction is positive, has a rectangle of ink erased with
    seed sequence (seed, i, c, 1). Variants left without ink are skipped.

    Args:
        corpus: The corpus to expand.
        copies: Number of variants per example, zero returning the corpus unchanged.
        seed: Base seed.
        perturb_fraction: Share of the ink bounding box to erase in [0, 1].

    Returns:
        New corpus keeping labels and writers of the originals.
    """
    if copies < 0:
        raise tifinaghocr.errors.ConfigError('Copies must be non-negative, got %d.' % copies)

    if not (0 <= perturb_fraction <= 1):
        raise tifinaghocr.errors.ConfigError(
            'Perturb fraction must be in [0, 1], got %s.' % perturb_fraction
        )

    if copies == 0:
        return corpus

    def make_variants(position: int,
        example: tifinaghocr.dataset_model.Example) -> typing.Iterable[
            tifinaghocr.dataset_model.Example]:
        yield example

        for copy_index in range(copies):
            glyph = tifinaghocr.preprocess.augment(
                example.get_glyph(),
                [seed, position, copy_index]
            )

            if perturb_fraction > 0:
                result = tifinaghocr.preprocess.perturb_missing_parts(
                    glyph,
                    perturb_fraction,
                    [seed, position, copy_index, 1]
                )
                if result.get_is_degenerate():
                    LOGGER.warning('Skipping degenerate variant of example %d.', position)
                    continue

                glyph = result.get_glyph()

            yield tifinaghocr.dataset_model.Example(
                glyph,
                example.get_label(),
                example.get_writer_id()
            )

    expanded = toolz.concat(map(
        lambda x: make_variants(x[0], x[1]),
        enumerate(corpus.get_examples())
    ))
    result = tifinaghocr.dataset_model.Corpus(expanded, corpus.get_registry())

    LOGGER.info('Augmented %d examples into %d.', corpus.get_size(), result.get_size())
    return result
