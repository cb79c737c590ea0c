"""
Tests for the Experiment facade, including the opt-in full synthetic run.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import os
import unittest

import tifinaghocr
import tifinaghocr.errors
import tifinaghocr.labels
import tifinaghocr.run_config
import tifinaghocr.synth

ACCEPTANCE_FLAG = 'TIFINAGH_ACCEPTANCE'


class ExperimentTests(unittest.TestCase):

    def setUp(self):
        registry = tifinaghocr.labels.build_registry()
        self._corpus = tifinaghocr.synth.synth_corpus(3, 0, registry)
        self._run_config = tifinaghocr.run_config.parse_run_config(
            'epochs=2\nbatch_size=33\ntrain_fraction=0.67\nsplit_seed=5\n'
        )

    def test_requires_corpus(self):
        with self.assertRaises(tifinaghocr.errors.StateError):
            tifinaghocr.Experiment().execute()

    def test_default_config(self):
        experiment = tifinaghocr.Experiment()
        self.assertEqual(experiment.get_run_config(), tifinaghocr.run_config.RunConfig())

    def test_execute(self):
        result = tifinaghocr.Experiment() \
            .set_corpus(self._corpus) \
            .set_run_config(self._run_config) \
            .execute()

        split = result.get_split()
        self.assertEqual(len(split.get_train_writers()), 2)
        self.assertEqual(len(split.get_test_writers()), 1)
        self.assertEqual(split.get_train().get_size(), 66)

        history = result.get_history()
        self.assertEqual([x.get_epoch() for x in history.get_records()], [1, 2])
        self.assertEqual(result.get_final_test(), history.get_final().get_test())
        self.assertEqual(result.get_model().get_dtype().name, 'float32')

    def test_reproducible(self):
        first = tifinaghocr.Experiment() \
            .set_corpus(self._corpus) \
            .set_run_config(self._run_config) \
            .execute()
        second = tifinaghocr.Experiment() \
            .set_corpus(self._corpus) \
            .set_run_config(self._run_config) \
            .execute()
        self.assertEqual(first.get_history(), second.get_history())


@unittest.skipUnless(os.environ.get(ACCEPTANCE_FLAG) == '1', 'set %s=1 to run' % ACCEPTANCE_FLAG)
class SyntheticAcceptanceTests(unittest.TestCase):

    def test_full_run(self):
        registry = tifinaghocr.labels.build_registry()
        corpus = tifinaghocr.synth.synth_corpus(102, 0, registry)
        self.assertEqual(corpus.get_size(), 3366)

        result = tifinaghocr.Experiment().set_corpus(corpus).execute()

        split = result.get_split()
        self.assertEqual(len(split.get_train_writers()), 88)
        self.assertEqual(len(split.get_test_writers()), 14)
        self.assertEqual(result.get_history().get_size(), 100)

        final_test = result.get_final_test()
        self.assertGreaterEqual(final_test.get_top1(), 0.90)
        self.assertGreaterEqual(final_test.get_top5(), 0.99)
