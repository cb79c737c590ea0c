"""
Tests for the command line entry point.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import contextlib
import io
import os
import tempfile
import unittest

import numpy

import tifinaghocr.cli
import tifinaghocr.image_io


def run_quietly(argv):
    stdout = io.StringIO()
    with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(io.StringIO()):
        code = tifinaghocr.cli.main(argv)
    return (code, stdout.getvalue())


def make_capture(size=40):
    pixels = numpy.full((size, size), 255, dtype=numpy.uint8)
    pixels[8:30, 15:19] = 0
    pixels[8:11, 10:30] = 0
    return pixels


class DispatchTests(unittest.TestCase):

    def test_no_command(self):
        code, _ = run_quietly([])
        self.assertEqual(code, 2)

    def test_unknown_command(self):
        code, _ = run_quietly(['fit'])
        self.assertEqual(code, 2)

    def test_missing_option(self):
        code, _ = run_quietly(['synth'])
        self.assertEqual(code, 2)


class PipelineTests(unittest.TestCase):

    def setUp(self):
        self._temp_dir = tempfile.TemporaryDirectory()
        self._root = self._temp_dir.name

    def tearDown(self):
        self._temp_dir.cleanup()

    def _path(self, *parts):
        return os.path.join(self._root, *parts)

    def _synth(self, writers):
        return run_quietly([
            'synth',
            '--writers', str(writers),
            '--seed', '1',
            '--out', self._path('data')
        ])

    def _train(self):
        with open(self._path('run.cfg'), 'w') as f:
            f.write('epochs=2\nbatch_size=16\ntrain_fraction=0.5\n')

        return run_quietly([
            'train',
            '--data', self._path('data'),
            '--config', self._path('run.cfg'),
            '--out', self._path('out')
        ])

    def test_synth(self):
        code, output = self._synth(1)
        self.assertEqual(code, 0)
        self.assertEqual(output.strip(), '33 examples')

        for name in ['images.idx3-ubyte', 'labels.idx1-ubyte', 'writers.txt']:
            self.assertTrue(os.path.exists(self._path('data', name)))

        self.assertEqual(os.path.getsize(self._path('data', 'images.idx3-ubyte')), 16 + 33 * 784)

    def test_synth_reproducible(self):
        self._synth(1)
        with open(self._path('data', 'images.idx3-ubyte'), 'rb') as f:
            first = f.read()

        self._synth(1)
        with open(self._path('data', 'images.idx3-ubyte'), 'rb') as f:
            second = f.read()

        self.assertEqual(first, second)

    def test_synth_verbose(self):
        stderr = io.StringIO()
        with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(stderr):
            code = tifinaghocr.cli.main([
                'synth',
                '--writers', '1',
                '--out', self._path('data'),
                '--verbose'
            ])

        tifinaghocr.cli.configure_logging(False)
        self.assertEqual(code, 0)
        self.assertIn('Synthesized 33 examples', stderr.getvalue())

    def test_synth_no_writers(self):
        code, _ = run_quietly(['synth', '--writers', '0', '--out', self._path('data')])
        self.assertEqual(code, 2)

    def test_build_dataset(self):
        for writer_id in range(2):
            directory = self._path('captures', str(writer_id))
            os.makedirs(directory)
            for label in range(3):
                tifinaghocr.image_io.write_pgm(
                    os.path.join(directory, '%d.pgm' % label),
                    make_capture()
                )

        code, output = run_quietly([
            'build-dataset',
            '--in', self._path('captures'),
            '--out', self._path('data')
        ])
        self.assertEqual(code, 0)
        self.assertEqual(output.strip(), '6 examples')

    def test_build_dataset_bad_name(self):
        os.makedirs(self._path('captures', '0'))
        tifinaghocr.image_io.write_pgm(self._path('captures', '0', '33.pgm'), make_capture())

        code, _ = run_quietly([
            'build-dataset',
            '--in', self._path('captures'),
            '--out', self._path('data')
        ])
        self.assertEqual(code, 3)

    def test_preprocess(self):
        tifinaghocr.image_io.write_pgm(self._path('in.pgm'), make_capture(60))
        code, _ = run_quietly([
            'preprocess',
            '--in', self._path('in.pgm'),
            '--out', self._path('out.pgm')
        ])
        self.assertEqual(code, 0)

        result = tifinaghocr.image_io.read_pgm(self._path('out.pgm'))
        self.assertEqual(result.get_pixels().shape, (28, 28))

    def test_preprocess_blank(self):
        blank = numpy.full((30, 30), 255, dtype=numpy.uint8)
        tifinaghocr.image_io.write_pgm(self._path('blank.pgm'), blank)
        code, _ = run_quietly([
            'preprocess',
            '--in', self._path('blank.pgm'),
            '--out', self._path('out.pgm')
        ])
        self.assertEqual(code, 3)

    def test_preprocess_missing(self):
        code, _ = run_quietly([
            'preprocess',
            '--in', self._path('missing.pgm'),
            '--out', self._path('out.pgm')
        ])
        self.assertEqual(code, 2)

    def test_train_eval_infer(self):
        self._synth(2)
        code, output = self._train()
        self.assertEqual(code, 0)

        lines = output.strip().split('\n')
        self.assertEqual(len(lines), 2)
        self.assertTrue(lines[0].startswith('train loss='))
        self.assertTrue(lines[1].startswith('test loss='))

        for name in ['weights.bin', 'history.csv', 'curves.svg', 'run.cfg']:
            self.assertTrue(os.path.exists(self._path('out', name)))

        code, output = run_quietly([
            'eval',
            '--data', self._path('data'),
            '--weights', self._path('out', 'weights.bin'),
            '--config', self._path('out', 'run.cfg')
        ])
        self.assertEqual(code, 0)
        self.assertTrue(output.startswith('eval loss='))

        tifinaghocr.image_io.write_pgm(self._path('glyph.pgm'), make_capture())
        code, output = run_quietly([
            'infer',
            '--weights', self._path('out', 'weights.bin'),
            '--image', self._path('glyph.pgm')
        ])
        self.assertEqual(code, 0)

        rows = [x.split('\t') for x in output.strip().split('\n')]
        self.assertEqual(len(rows), 5)
        probabilities = [float(x[2]) for x in rows]
        self.assertEqual(probabilities, sorted(probabilities, reverse=True))
        self.assertTrue(all(0 <= int(x[0]) < 33 for x in rows))

        code, _ = run_quietly([
            'curves',
            '--history', self._path('out', 'history.csv'),
            '--out', self._path('redrawn.svg')
        ])
        self.assertEqual(code, 0)
        self.assertTrue(os.path.exists(self._path('redrawn.svg')))

    def test_infer_config_mismatch(self):
        self._synth(2)
        self._train()

        with open(self._path('other.cfg'), 'w') as f:
            f.write('conv1_out=4\n')

        tifinaghocr.image_io.write_pgm(self._path('glyph.pgm'), make_capture())
        code, _ = run_quietly([
            'infer',
            '--weights', self._path('out', 'weights.bin'),
            '--image', self._path('glyph.pgm'),
            '--config', self._path('other.cfg')
        ])
        self.assertEqual(code, 2)
