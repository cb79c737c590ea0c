"""
Tests for corpus serialization, ingestion, splitting and expansion.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import os
import struct
import tempfile
import unittest

import numpy

import tifinaghocr.dataset_io
import tifinaghocr.dataset_model
import tifinaghocr.errors
import tifinaghocr.glyph_model
import tifinaghocr.image_io
import tifinaghocr.labels


def make_glyph(label):
    pixels = numpy.zeros((28, 28), dtype=numpy.uint8)
    pixels[4:24, 4 + label % 16:8 + label % 16] = 255
    pixels[12, 4:24] = 100 + label
    return tifinaghocr.glyph_model.Glyph28(pixels)


def make_corpus(num_writers, labels=(0, 1, 2)):
    registry = tifinaghocr.labels.build_registry()
    examples = [
        tifinaghocr.dataset_model.Example(make_glyph(label), label, writer_id)
        for writer_id in range(num_writers)
        for label in labels
    ]
    return tifinaghocr.dataset_model.Corpus(examples, registry)


def make_capture(label):
    pixels = numpy.full((40, 40), 255, dtype=numpy.uint8)
    pixels[8:30, 10 + label % 10:14 + label % 10] = 0
    pixels[18:21, 5:35] = 0
    return pixels


class IdxTests(unittest.TestCase):

    def setUp(self):
        self._temp_dir = tempfile.TemporaryDirectory()
        directory = self._temp_dir.name
        self._images_path = os.path.join(directory, 'images.idx3-ubyte')
        self._labels_path = os.path.join(directory, 'labels.idx1-ubyte')
        self._writers_path = os.path.join(directory, 'writers.txt')
        self._registry = tifinaghocr.labels.build_registry()

    def tearDown(self):
        self._temp_dir.cleanup()

    def _write_bytes(self, path, data):
        with open(path, 'wb') as f:
            f.write(data)

    def _read_bytes(self, path):
        with open(path, 'rb') as f:
            return f.read()

    def test_single_image_layout(self):
        corpus = make_corpus(1, labels=[7])
        tifinaghocr.dataset_io.write_idx(corpus, self._images_path, self._labels_path)

        images = self._read_bytes(self._images_path)
        self.assertEqual(len(images), 16 + 784)
        self.assertEqual(images[0:4], bytes([0x00, 0x00, 0x08, 0x03]))
        self.assertEqual(struct.unpack('>III', images[4:16]), (1, 28, 28))

        labels = self._read_bytes(self._labels_path)
        self.assertEqual(labels, bytes([0x00, 0x00, 0x08, 0x01, 0, 0, 0, 1, 7]))

    def test_round_trip_with_writers(self):
        corpus = make_corpus(3)
        tifinaghocr.dataset_io.write_idx(corpus, self._images_path, self._labels_path)
        tifinaghocr.dataset_io.write_writer_sidecar(corpus, self._writers_path)

        read = tifinaghocr.dataset_io.read_idx(
            self._images_path,
            self._labels_path,
            self._registry,
            writers_path=self._writers_path
        )
        self.assertEqual(read, corpus)

    def test_without_writers(self):
        corpus = make_corpus(2)
        tifinaghocr.dataset_io.write_idx(corpus, self._images_path, self._labels_path)

        read = tifinaghocr.dataset_io.read_idx(
            self._images_path,
            self._labels_path,
            self._registry
        )
        self.assertEqual(read.get_writers(), [0])
        numpy.testing.assert_array_equal(read.get_labels(), corpus.get_labels())

    def test_empty_corpus(self):
        corpus = make_corpus(0)
        with self.assertRaises(tifinaghocr.errors.ConfigError):
            tifinaghocr.dataset_io.write_idx(corpus, self._images_path, self._labels_path)

    def test_read_header(self):
        header = struct.pack('>IIII', 0x00000803, 60000, 28, 28)
        self._write_bytes(self._images_path, header)

        parsed = tifinaghocr.dataset_io.read_idx_header(self._images_path)
        self.assertEqual(parsed.get_dims(), (60000, 28, 28))
        self.assertEqual(parsed.get_count(), 60000)
        self.assertEqual(parsed.get_data_type(), 0x08)
        self.assertEqual(parsed.get_magic(), 0x00000803)
        self.assertEqual(parsed.get_payload_size(), 60000 * 784)

    def test_read_test_set_header(self):
        header = struct.pack('>IIII', 0x00000803, 10000, 28, 28)
        self._write_bytes(self._images_path, header)

        parsed = tifinaghocr.dataset_io.read_idx_header(self._images_path)
        self.assertEqual(parsed.get_dims(), (10000, 28, 28))
        self.assertEqual(parsed.get_payload_size(), 10000 * 784)

        labels_header = struct.pack('>II', 0x00000801, 10000)
        self._write_bytes(self._labels_path, labels_header)
        parsed_labels = tifinaghocr.dataset_io.read_idx_header(self._labels_path)
        self.assertEqual(parsed_labels.get_dims(), (10000,))

    def test_header_bad_magic(self):
        with self.assertRaises(tifinaghocr.errors.FormatError) as context:
            tifinaghocr.dataset_io.parse_idx_header(b'\x01\x00\x08\x03' + bytes(12))
        self.assertEqual(context.exception.get_offset(), 0)

    def test_images_bad_magic(self):
        corpus = make_corpus(1)
        tifinaghocr.dataset_io.write_idx(corpus, self._images_path, self._labels_path)
        self._write_bytes(self._images_path, self._read_bytes(self._labels_path))

        with self.assertRaises(tifinaghocr.errors.FormatError) as context:
            tifinaghocr.dataset_io.read_idx(self._images_path, self._labels_path, self._registry)
        self.assertEqual(context.exception.get_offset(), 0)

    def test_count_mismatch(self):
        tifinaghocr.dataset_io.write_idx(make_corpus(2), self._images_path, self._labels_path)
        labels = tifinaghocr.dataset_io.encode_labels(make_corpus(1))
        self._write_bytes(self._labels_path, labels)

        with self.assertRaises(tifinaghocr.errors.FormatError) as context:
            tifinaghocr.dataset_io.read_idx(self._images_path, self._labels_path, self._registry)
        self.assertEqual(context.exception.get_offset(), 4)

    def test_truncated_images(self):
        tifinaghocr.dataset_io.write_idx(make_corpus(1), self._images_path, self._labels_path)
        data = self._read_bytes(self._images_path)[:-1]
        self._write_bytes(self._images_path, data)

        with self.assertRaises(tifinaghocr.errors.FormatError) as context:
            tifinaghocr.dataset_io.read_idx(self._images_path, self._labels_path, self._registry)
        self.assertEqual(context.exception.get_offset(), len(data))
        self.assertIn('byte offset', str(context.exception))

    def test_label_out_of_range(self):
        tifinaghocr.dataset_io.write_idx(make_corpus(1), self._images_path, self._labels_path)
        self._write_bytes(self._labels_path, struct.pack('>II', 0x801, 3) + bytes([0, 40, 1]))

        with self.assertRaises(tifinaghocr.errors.FormatError) as context:
            tifinaghocr.dataset_io.read_idx(self._images_path, self._labels_path, self._registry)
        self.assertEqual(context.exception.get_offset(), 9)

    def test_ink_in_frame(self):
        tifinaghocr.dataset_io.write_idx(make_corpus(1), self._images_path, self._labels_path)
        data = bytearray(self._read_bytes(self._images_path))
        data[16 + 784] = 255
        self._write_bytes(self._images_path, bytes(data))

        with self.assertRaises(tifinaghocr.errors.FormatError) as context:
            tifinaghocr.dataset_io.read_idx(self._images_path, self._labels_path, self._registry)
        self.assertEqual(context.exception.get_offset(), 16 + 784)

    def test_sidecar_count(self):
        tifinaghocr.dataset_io.write_idx(make_corpus(1), self._images_path, self._labels_path)
        self._write_bytes(self._writers_path, b'0\n0\n')

        with self.assertRaises(tifinaghocr.errors.FormatError):
            tifinaghocr.dataset_io.read_idx(
                self._images_path,
                self._labels_path,
                self._registry,
                writers_path=self._writers_path
            )

    def test_sidecar_not_dense(self):
        tifinaghocr.dataset_io.write_idx(make_corpus(1), self._images_path, self._labels_path)
        self._write_bytes(self._writers_path, b'0\n2\n2\n')

        with self.assertRaises(tifinaghocr.errors.FormatError):
            tifinaghocr.dataset_io.read_idx(
                self._images_path,
                self._labels_path,
                self._registry,
                writers_path=self._writers_path
            )

    def test_sidecar_invalid(self):
        self._write_bytes(self._writers_path, b'0\nx1\n')
        with self.assertRaises(tifinaghocr.errors.FormatError) as context:
            tifinaghocr.dataset_io.read_writer_sidecar(self._writers_path)
        self.assertEqual(context.exception.get_offset(), 2)


class LoadImageDirTests(unittest.TestCase):

    def setUp(self):
        self._temp_dir = tempfile.TemporaryDirectory()
        self._root = self._temp_dir.name
        self._registry = tifinaghocr.labels.build_registry()

    def tearDown(self):
        self._temp_dir.cleanup()

    def _write_capture(self, writer_id, file_name, pixels):
        directory = os.path.join(self._root, str(writer_id))
        os.makedirs(directory, exist_ok=True)
        tifinaghocr.image_io.write_pgm(os.path.join(directory, file_name), pixels)

    def _write_writer(self, writer_id):
        for label in range(33):
            self._write_capture(writer_id, '%d.pgm' % label, make_capture(label))

    def test_two_writers(self):
        self._write_writer(1)
        self._write_writer(0)

        corpus = tifinaghocr.dataset_io.load_image_dir(self._root, self._registry)
        self.assertEqual(corpus.get_size(), 66)
        self.assertEqual(corpus.get_writers(), [0, 1])

        keys = [(x.get_writer_id(), x.get_label()) for x in corpus.get_examples()]
        self.assertEqual(keys, sorted(keys))

    def test_label_out_of_range(self):
        self._write_capture(0, '33.pgm', make_capture(0))
        with self.assertRaises(tifinaghocr.errors.IngestionError) as context:
            tifinaghocr.dataset_io.load_image_dir(self._root, self._registry)
        self.assertIn('33.pgm', str(context.exception))

    def test_unparsable_name(self):
        self._write_capture(0, 'yab.pgm', make_capture(0))
        with self.assertRaises(tifinaghocr.errors.IngestionError):
            tifinaghocr.dataset_io.load_image_dir(self._root, self._registry)

    def test_unparsable_writer(self):
        self._write_capture('alice', '0.pgm', make_capture(0))
        with self.assertRaises(tifinaghocr.errors.IngestionError):
            tifinaghocr.dataset_io.load_image_dir(self._root, self._registry)

    def test_duplicate_label(self):
        self._write_capture(0, '3.pgm', make_capture(3))
        self._write_capture(0, '03.pgm', make_capture(3))
        with self.assertRaises(tifinaghocr.errors.IngestionError):
            tifinaghocr.dataset_io.load_image_dir(self._root, self._registry)

    def test_sparse_writers(self):
        self._write_capture(0, '0.pgm', make_capture(0))
        self._write_capture(2, '0.pgm', make_capture(0))
        with self.assertRaises(tifinaghocr.errors.IngestionError):
            tifinaghocr.dataset_io.load_image_dir(self._root, self._registry)

    def test_blank_image(self):
        self._write_capture(0, '5.pgm', numpy.full((30, 30), 255, dtype=numpy.uint8))
        with self.assertRaises(tifinaghocr.errors.NoForegroundError) as context:
            tifinaghocr.dataset_io.load_image_dir(self._root, self._registry)
        self.assertIn('5.pgm', str(context.exception))
        self.assertEqual(context.exception.exit_code, 3)

    def test_empty(self):
        with self.assertRaises(tifinaghocr.errors.IngestionError):
            tifinaghocr.dataset_io.load_image_dir(self._root, self._registry)

    def test_missing(self):
        missing = os.path.join(self._root, 'missing')
        with self.assertRaises(tifinaghocr.errors.IngestionError):
            tifinaghocr.dataset_io.load_image_dir(missing, self._registry)


class SplitByWriterTests(unittest.TestCase):

    def setUp(self):
        self._corpus = make_corpus(102, labels=[0])

    def test_train_count_rounds_half_up(self):
        self.assertEqual(tifinaghocr.dataset_io.get_train_writer_count(10, 0.25), 3)
        self.assertEqual(tifinaghocr.dataset_io.get_train_writer_count(4, 0.625), 3)
        self.assertEqual(tifinaghocr.dataset_io.get_train_writer_count(102, 0.86), 88)
        self.assertEqual(tifinaghocr.dataset_io.get_train_writer_count(2, 0.75), 1)

    def test_counts(self):
        split = tifinaghocr.dataset_io.split_by_writer(self._corpus)
        self.assertEqual(len(split.get_train_writers()), 88)
        self.assertEqual(len(split.get_test_writers()), 14)
        self.assertEqual(split.get_train().get_size(), 88)
        self.assertEqual(split.get_test().get_size(), 14)

    def test_deterministic(self):
        first = tifinaghocr.dataset_io.split_by_writer(self._corpus, seed=4)
        second = tifinaghocr.dataset_io.split_by_writer(self._corpus, seed=4)
        self.assertEqual(first.get_train_writers(), second.get_train_writers())
        self.assertEqual(first.get_test(), second.get_test())

    def test_seed_changes_split(self):
        first = tifinaghocr.dataset_io.split_by_writer(self._corpus, seed=1)
        second = tifinaghocr.dataset_io.split_by_writer(self._corpus, seed=2)
        self.assertNotEqual(first.get_test_writers(), second.get_test_writers())

    def test_partition(self):
        corpus = make_corpus(10)
        for seed in range(20):
            split = tifinaghocr.dataset_io.split_by_writer(corpus, train_fraction=0.7, seed=seed)
            train_writers = split.get_train_writers()
            test_writers = split.get_test_writers()

            self.assertFalse(train_writers & test_writers)
            self.assertEqual(train_writers | test_writers, frozenset(range(10)))
            self.assertEqual(split.get_train().get_writers(), sorted(train_writers))
            self.assertEqual(split.get_test().get_writers(), sorted(test_writers))
            self.assertEqual(
                split.get_train().get_size() + split.get_test().get_size(),
                corpus.get_size()
            )

    def test_two_writers_extreme_fraction(self):
        corpus = make_corpus(2)
        split = tifinaghocr.dataset_io.split_by_writer(corpus, train_fraction=0.99)
        self.assertEqual(len(split.get_train_writers()), 1)
        self.assertEqual(len(split.get_test_writers()), 1)

    def test_one_writer(self):
        with self.assertRaises(tifinaghocr.errors.ConfigError):
            tifinaghocr.dataset_io.split_by_writer(make_corpus(1))

    def test_invalid_fraction(self):
        with self.assertRaises(tifinaghocr.errors.ConfigError):
            tifinaghocr.dataset_io.split_by_writer(self._corpus, train_fraction=1.0)


class AugmentCorpusTests(unittest.TestCase):

    def setUp(self):
        self._corpus = make_corpus(1)

    def test_no_copies(self):
        expanded = tifinaghocr.dataset_io.augment_corpus(self._corpus, 0, 1)
        self.assertEqual(expanded, self._corpus)

    def test_copies(self):
        expanded = tifinaghocr.dataset_io.augment_corpus(self._corpus, 2, 1)
        self.assertEqual(expanded.get_size(), 9)

        examples = expanded.get_examples()
        for position, original in enumerate(self._corpus.get_examples()):
            self.assertEqual(examples[position * 3], original)
            for variant in examples[position * 3 + 1:position * 3 + 3]:
                self.assertEqual(variant.get_label(), original.get_label())
                self.assertEqual(variant.get_writer_id(), original.get_writer_id())

    def test_deterministic(self):
        first = tifinaghocr.dataset_io.augment_corpus(self._corpus, 2, 5, perturb_fraction=0.2)
        second = tifinaghocr.dataset_io.augment_corpus(self._corpus, 2, 5, perturb_fraction=0.2)
        self.assertEqual(first, second)

    def test_degenerate_skipped(self):
        expanded = tifinaghocr.dataset_io.augment_corpus(self._corpus, 2, 1, perturb_fraction=1)
        self.assertEqual(expanded, self._corpus)

    def test_invalid(self):
        with self.assertRaises(tifinaghocr.errors.ConfigError):
            tifinaghocr.dataset_io.augment_corpus(self._corpus, -1, 1)

        with self.assertRaises(tifinaghocr.errors.ConfigError):
            tifinaghocr.dataset_io.augment_corpus(self._corpus, 1, 1, perturb_fraction=2)
