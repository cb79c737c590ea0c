"""Library for recognizing handwritten Tifinagh characters with a small convolutional network.

This library normalizes captured glyphs into MNIST-style 28x28 images, manages writer-attributed
corpora of the 33 IRCAM letters, and trains and evaluates a two convolution / two pooling network
built directly on numpy. A synthetic corpus generator stands in when no real handwriting is at
hand.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import typing

import tifinaghocr.dataset_io
import tifinaghocr.dataset_model
import tifinaghocr.errors
import tifinaghocr.model
import tifinaghocr.run_config
import tifinaghocr.training


class ExperimentResult:
    """Outcome of splitting a corpus, training a model and tracking its metrics."""

    def __init__(self, model: tifinaghocr.model.Model, history: tifinaghocr.training.History,
        split: tifinaghocr.dataset_model.SplitResult):
        """Create a new result record.

        Args:
            model: The trained model.
            history: Metrics of each evaluated epoch.
            split: Writer partition used for training and testing.
        """
        self._model = model
        self._history = history
        self._split = split

    def get_model(self) -> tifinaghocr.model.Model:
        """Get the trained model.

        Returns:
            Model after the final epoch.
        """
        return self._model

    def get_history(self) -> tifinaghocr.training.History:
        """Get the per-epoch metrics.

        Returns:
            History of the run.
        """
        return self._history

    def get_split(self) -> tifinaghocr.dataset_model.SplitResult:
        """Get the train / test partition.

        Returns:
            The writer split.
        """
        return self._split

    def get_final_test(self) -> tifinaghocr.training.Metrics:
        """Get the test metrics of the final epoch."""
        return self._history.get_final().get_test()


class Experiment:
    """Entrypoint for the tifinaghocr library.

    Facade for running the split, initialize, train pipeline on a corpus and builder to configure
    that run.
    """

    def __init__(self):
        """Create a new experiment without a corpus and with the default configuration."""
        self._corpus: typing.Optional[tifinaghocr.dataset_model.Corpus] = None
        self._run_config = tifinaghocr.run_config.RunConfig()

    def set_corpus(self, corpus: tifinaghocr.dataset_model.Corpus) -> 'Experiment':
        """Set the corpus to split and train on.

        Args:
            corpus: Corpus with at least two writers.

        Returns:
            This object for chaining if desired.
        """
        self._corpus = corpus
        return self

    def set_run_config(self, run_config: tifinaghocr.run_config.RunConfig) -> 'Experiment':
        """Set the network, training and split configuration.

        Args:
            run_config: The configuration to use.

        Returns:
            This object for chaining if desired.
        """
        self._run_config = run_config
        return self

    def get_run_config(self) -> tifinaghocr.run_config.RunConfig:
        """Get the configuration which execute will use."""
        return self._run_config

    def execute(self) -> ExperimentResult:
        """Split the corpus by writer, initialize a model and train it.

        Returns:
            The trained model, its history and the split.

        Raises:
            StateError: Raised if no corpus was set.
        """
        if self._corpus is None:
            raise tifinaghocr.errors.StateError('Set a corpus before executing.')

        config = self._run_config
        split = tifinaghocr.dataset_io.split_by_writer(
            self._corpus,
            train_fraction=config.get_train_fraction(),
            seed=config.get_split_seed()
        )

        model = tifinaghocr.model.init_model(config.get_cnn_config())
        trained, history = tifinaghocr.training.train(
            model,
            split.get_train(),
            split.get_test(),
            config.get_train_config()
        )

        return ExperimentResult(trained, history, split)
