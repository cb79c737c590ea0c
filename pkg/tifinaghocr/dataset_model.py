"""
Data structures for labeled, writer-attributed glyph collections.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import typing

import numpy

import tifinaghocr.errors
import tifinaghocr.glyph_model
import tifinaghocr.labels

BATCH = typing.Tuple[numpy.ndarray, numpy.ndarray]


class Example:
    """A single labeled glyph and the writer who produced it."""

    def __init__(self, glyph: tifinaghocr.glyph_model.Glyph28, label: int, writer_id: int):
        """Create a new example.

        Args:
            glyph: The normalized glyph.
            label: Class index in [0, 33).
            writer_id: Non-negative writer identifier.
        """
        if writer_id < 0:
            raise tifinaghocr.errors.ConfigError('Writer id must be non-negative.')

        self._glyph = glyph
        self._label = int(label)
        self._writer_id = int(writer_id)

    def get_glyph(self) -> tifinaghocr.glyph_model.Glyph28:
        """Get the normalized glyph.

        Returns:
            The 28x28 image.
        """
        return self._glyph

    def get_label(self) -> int:
        """Get the class index.

        Returns:
            Index into the label registry.
        """
        return self._label

    def get_writer_id(self) -> int:
        """Get the writer identifier.

        Returns:
            Non-negative writer id.
        """
        return self._writer_id

    def __eq__(self, other) -> bool:
        if not isinstance(other, Example):
            return False

        return (
            self._label == other.get_label()
            and self._writer_id == other.get_writer_id()
            and self._glyph == other.get_glyph()
        )

    def __hash__(self) -> int:
        return hash((self._label, self._writer_id, hash(self._glyph)))


class Corpus:
    """Ordered, immutable collection of examples sharing one label registry."""

    def __init__(self, examples: typing.Iterable[Example],
        registry: tifinaghocr.labels.LabelRegistry):
        """Create a new corpus.

        Args:
            examples: The examples in their canonical order.
            registry: The label registry against which labels are checked.

        Raises:
            LabelError: Raised for the first example with a label unknown to the registry.
        """
        self._examples = tuple(examples)
        self._registry = registry

        for position, example in enumerate(self._examples):
            if not registry.is_valid(example.get_label()):
                raise tifinaghocr.errors.LabelError(
                    'Example %d has invalid label %d.' % (position, example.get_label()),
                    position
                )

    def get_examples(self) -> typing.Tuple[Example, ...]:
        """Get the examples.

        Returns:
            Tuple of examples in corpus order.
        """
        return self._examples

    def get_registry(self) -> tifinaghocr.labels.LabelRegistry:
        """Get the label registry.

        Returns:
            Registry shared by all examples.
        """
        return self._registry

    def get_size(self) -> int:
        """Get the number of examples."""
        return len(self._examples)

    def is_empty(self) -> bool:
        """Determine if the corpus holds no examples."""
        return len(self._examples) == 0

    def get_writers(self) -> typing.List[int]:
        """Get the distinct writer ids.

        Returns:
            Sorted list of writer ids.
        """
        return sorted(set(x.get_writer_id() for x in self._examples))

    def get_labels(self) -> numpy.ndarray:
        """Get the label of every example as an int64 vector."""
        return numpy.array([x.get_label() for x in self._examples], dtype=numpy.int64)

    def check_dense_writers(self):
        """Check that writer ids form the dense range 0 to n - 1.

        Raises:
            ConfigError: Raised if a writer id is missing from the range.
        """
        writers = self.get_writers()
        if writers != list(range(len(writers))):
            missing = sorted(set(range(max(writers) + 1)) - set(writers)) if writers else []
            raise tifinaghocr.errors.ConfigError(
                'Writer ids must be dense from 0, missing %s.' % missing
            )

    def subset(self, writers: typing.Iterable[int]) -> 'Corpus':
        """Keep the examples of some writers.

        Args:
            writers: Writer ids to keep.

        Returns:
            New corpus with the matching examples in their original order.
        """
        writers_set = set(writers)
        kept = filter(lambda x: x.get_writer_id() in writers_set, self._examples)
        return Corpus(kept, self._registry)

    def to_batch(self, dtype=numpy.float32) -> BATCH:
        """Build network inputs for every example.

        Args:
            dtype: Floating point precision of the images.

        Returns:
            Tuple of an [N,1,28,28] image tensor and an [N] label vector.
        """
        size = tifinaghocr.glyph_model.GLYPH_SIZE
        if self.is_empty():
            images = numpy.zeros((0, 1, size, size), dtype=dtype)
        else:
            images = numpy.stack([x.get_glyph().to_tensor(dtype) for x in self._examples])

        return (images, self.get_labels())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return False

        return self._examples == other.get_examples()


class SplitResult:
    """Partition of a corpus into train and test corpora along writer lines."""

    def __init__(self, train: Corpus, test: Corpus, train_writers: typing.Iterable[int],
        test_writers: typing.Iterable[int]):
        """Create a new split.

        Args:
            train: Examples of the training writers.
            test: Examples of the test writers.
            train_writers: Writer ids assigned to training.
            test_writers: Writer ids assigned to testing.

        Raises:
            InternalConsistencyError: Raised if the writer sets overlap.
        """
        self._train = train
        self._test = test
        self._train_writers = frozenset(train_writers)
        self._test_writers = frozenset(test_writers)

        overlap = self._train_writers & self._test_writers
        if overlap:
            raise tifinaghocr.errors.InternalConsistencyError(
                'Writers %s appear in both splits.' % sorted(overlap)
            )

    def get_train(self) -> Corpus:
        """Get the training corpus.

        Returns:
            Examples of training writers.
        """
        return self._train

    def get_test(self) -> Corpus:
        """Get the test corpus.

        Returns:
            Examples of test writers.
        """
        return self._test

    def get_train_writers(self) -> typing.FrozenSet[int]:
        """Get the training writer ids.

        Returns:
            Set of writer ids.
        """
        return self._train_writers

    def get_test_writers(self) -> typing.FrozenSet[int]:
        """Get the test writer ids.

        Returns:
            Set of writer ids.
        """
        return self._test_writers
