"""
Epoch loop and top-k evaluation.

Each epoch shuffles the training examples with a generator seeded once per run, takes one
momentum SGD step per minibatch (keeping the last partial batch) and then evaluates on both the
training and test corpora.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import logging
import math
import typing

import numpy
import toolz  # type: ignore

import tifinaghocr.dataset_io
import tifinaghocr.dataset_model
import tifinaghocr.errors
import tifinaghocr.model
import tifinaghocr.numeric
import tifinaghocr.numeric_model

EVAL_CHUNK_SIZE = 256
TOP_K = 5

LOGGER = logging.getLogger(__name__)


class TrainConfig:
    """Hyperparameters of the training loop."""

    def __init__(self, epochs: int = 100, batch_size: int = 32, lr: float = 0.01,
        momentum: float = 0.9, shuffle_seed: int = 0, eval_every: int = 1,
        augment_copies: int = 0, augment_seed: int = 0, perturb_fraction: float = 0.0):
        """Create a new training configuration.

        Args:
            epochs: Number of passes over the training corpus, at least 1.
            batch_size: Examples per optimizer step, at least 1.
            lr: Positive learning rate.
            momentum: Momentum in [0, 1).
            shuffle_seed: Seed for the per-run shuffle generator.
            eval_every: Evaluate every this many epochs. The final epoch is always evaluated.
            augment_copies: Augmented variants added per training example before the first epoch.
            augment_seed: Seed for augmentation and perturbation.
            perturb_fraction: Share of the ink box erased in each variant, 0 to disable.

        Raises:
            ConfigError: Raised if a value is out of range.
        """
        if epochs < 1:
            raise tifinaghocr.errors.ConfigError('epochs must be at least 1, got %d.' % epochs)

        if batch_size < 1:
            raise tifinaghocr.errors.ConfigError(
                'batch_size must be at least 1, got %d.' % batch_size
            )

        if not lr > 0:
            raise tifinaghocr.errors.ConfigError('lr must be positive, got %s.' % lr)

        if not (0 <= momentum < 1):
            raise tifinaghocr.errors.ConfigError('momentum must be in [0, 1), got %s.' % momentum)

        if eval_every < 1:
            raise tifinaghocr.errors.ConfigError(
                'eval_every must be at least 1, got %d.' % eval_every
            )

        if augment_copies < 0:
            raise tifinaghocr.errors.ConfigError(
                'augment_copies must be non-negative, got %d.' % augment_copies
            )

        if not (0 <= perturb_fraction <= 1):
            raise tifinaghocr.errors.ConfigError(
                'perturb_fraction must be in [0, 1], got %s.' % perturb_fraction
            )

        self._epochs = epochs
        self._batch_size = batch_size
        self._lr = lr
        self._momentum = momentum
        self._shuffle_seed = shuffle_seed
        self._eval_every = eval_every
        self._augment_copies = augment_copies
        self._augment_seed = augment_seed
        self._perturb_fraction = perturb_fraction

    def get_epochs(self) -> int:
        """Get the number of epochs."""
        return self._epochs

    def get_batch_size(self) -> int:
        """Get the minibatch size."""
        return self._batch_size

    def get_lr(self) -> float:
        """Get the learning rate."""
        return self._lr

    def get_momentum(self) -> float:
        """Get the momentum coefficient."""
        return self._momentum

    def get_shuffle_seed(self) -> int:
        """Get the shuffle seed."""
        return self._shuffle_seed

    def get_eval_every(self) -> int:
        """Get the evaluation interval in epochs."""
        return self._eval_every

    def get_augment_copies(self) -> int:
        """Get the number of augmented variants per training example."""
        return self._augment_copies

    def get_augment_seed(self) -> int:
        """Get the augmentation seed."""
        return self._augment_seed

    def get_perturb_fraction(self) -> float:
        """Get the share of the ink box erased in augmented variants."""
        return self._perturb_fraction


class Metrics:
    """Mean loss and top-k accuracies on a corpus."""

    def __init__(self, loss: float, top1: float, top5: float):
        """Create a new metrics record.

        Args:
            loss: Mean cross-entropy, non-negative.
            top1: Share of examples whose label is the best scoring class.
            top5: Share of examples whose label is among the five best scoring classes.

        Raises:
            InternalConsistencyError: Raised if a value is out of range or top1 exceeds top5.
        """
        if not loss >= 0:
            raise tifinaghocr.errors.InternalConsistencyError(
                'Loss must be non-negative, got %s.' % loss
            )

        if not (0 <= top1 <= 1 and 0 <= top5 <= 1):
            raise tifinaghocr.errors.InternalConsistencyError(
                'Accuracies must be in [0, 1], got %s and %s.' % (top1, top5)
            )

        if top1 > top5:
            raise tifinaghocr.errors.InternalConsistencyError(
                'Top-1 accuracy %s exceeds top-5 accuracy %s.' % (top1, top5)
            )

        self._loss = loss
        self._top1 = top1
        self._top5 = top5

    def get_loss(self) -> float:
        """Get the mean cross-entropy loss.

        Returns:
            Non-negative loss in nats.
        """
        return self._loss

    def get_top1(self) -> float:
        """Get the top-1 accuracy.

        Returns:
            Share in [0, 1].
        """
        return self._top1

    def get_top5(self) -> float:
        """Get the top-5 accuracy.

        Returns:
            Share in [0, 1], never below top-1.
        """
        return self._top5

    def __eq__(self, other) -> bool:
        if not isinstance(other, Metrics):
            return False

        return (
            self._loss == other.get_loss()
            and self._top1 == other.get_top1()
            and self._top5 == other.get_top5()
        )

    def __repr__(self) -> str:
        return 'loss=%.6f top1=%.4f top5=%.4f' % (self._loss, self._top1, self._top5)


class EpochRecord:
    """Train and test metrics after one epoch."""

    def __init__(self, epoch: int, train: Metrics, test: Metrics):
        """Create a new record.

        Args:
            epoch: One-based epoch index.
            train: Metrics on the training corpus.
            test: Metrics on the test corpus.
        """
        self._epoch = epoch
        self._train = train
        self._test = test

    def get_epoch(self) -> int:
        """Get the one-based epoch index."""
        return self._epoch

    def get_train(self) -> Metrics:
        """Get the training corpus metrics."""
        return self._train

    def get_test(self) -> Metrics:
        """Get the test corpus metrics."""
        return self._test

    def __eq__(self, other) -> bool:
        if not isinstance(other, EpochRecord):
            return False

        return (
            self._epoch == other.get_epoch()
            and self._train == other.get_train()
            and self._test == other.get_test()
        )


class History:
    """Ordered per-epoch records of a training run."""

    def __init__(self, records: typing.Iterable[EpochRecord]):
        """Create a new history.

        Args:
            records: Records with strictly increasing epoch indices starting at 1 or later.

        Raises:
            InternalConsistencyError: Raised if epoch indices are not strictly increasing.
        """
        self._records = tuple(records)

        epochs = [x.get_epoch() for x in self._records]
        previous = 0
        for epoch in epochs:
            if epoch <= previous:
                raise tifinaghocr.errors.InternalConsistencyError(
                    'Epoch indices must increase from 1, got %s.' % epochs
                )
            previous = epoch

    def get_records(self) -> typing.Tuple[EpochRecord, ...]:
        """Get the records in epoch order.

        Returns:
            Tuple of records.
        """
        return self._records

    def get_size(self) -> int:
        """Get the number of records."""
        return len(self._records)

    def is_empty(self) -> bool:
        """Determine if no epoch was recorded."""
        return len(self._records) == 0

    def get_final(self) -> EpochRecord:
        """Get the record of the last epoch.

        Returns:
            Final record whose metrics are the ones reported for a run.

        Raises:
            StateError: Raised if the history is empty.
        """
        if self.is_empty():
            raise tifinaghocr.errors.StateError('History has no records.')

        return self._records[-1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, History):
            return False

        return self._records == other.get_records()


def evaluate(model: tifinaghocr.model.Model,
    corpus: tifinaghocr.dataset_model.Corpus) -> Metrics:
    """Measure mean loss and top-1 / top-5 accuracy of a model on a corpus.

    Per example losses are computed in double precision and summed exactly so the result does not
    depend on corpus order. Examples are forwarded in chunks to bound memory.

    Args:
        model: The model to evaluate. Its forward cache is overwritten.
        corpus: Nonempty corpus.

    Returns:
        Metrics over every example.

    Raises:
        ConfigError: Raised if the corpus is empty.
    """
    if corpus.is_empty():
        raise tifinaghocr.errors.ConfigError('Cannot evaluate on an empty corpus.')

    images, labels = corpus.to_batch()

    losses: typing.List[float] = []
    top1_hits = 0
    top5_hits = 0
    for chunk in toolz.partition_all(EVAL_CHUNK_SIZE, range(corpus.get_size())):
        indices = numpy.array(chunk)
        chunk_labels = labels[indices]
        logits = numpy.asarray(model.forward(images[indices]), dtype=numpy.float64)

        log_probs = tifinaghocr.numeric.log_softmax(logits)
        losses.extend(-log_probs[numpy.arange(len(indices)), chunk_labels])

        k = min(TOP_K, logits.shape[1])
        top = tifinaghocr.model.predict_topk(logits, k)
        top1_hits += int((top[:, 0] == chunk_labels).sum())
        top5_hits += int((top == chunk_labels[:, None]).any(axis=1).sum())

    count = corpus.get_size()
    return Metrics(math.fsum(losses) / count, top1_hits / count, top5_hits / count)


def expand_training_corpus(corpus: tifinaghocr.dataset_model.Corpus,
    config: TrainConfig) -> tifinaghocr.dataset_model.Corpus:
    """Apply the configured augmentation to a training corpus."""
    if config.get_augment_copies() == 0:
        return corpus

    return tifinaghocr.dataset_io.augment_corpus(
        corpus,
        config.get_augment_copies(),
        config.get_augment_seed(),
        perturb_fraction=config.get_perturb_fraction()
    )


def should_evaluate(epoch: int, config: TrainConfig) -> bool:
    """Determine if metrics are recorded after an epoch."""
    return epoch % config.get_eval_every() == 0 or epoch == config.get_epochs()


def train(model: tifinaghocr.model.Model, train_corpus: tifinaghocr.dataset_model.Corpus,
    test_corpus: tifinaghocr.dataset_model.Corpus,
    config: TrainConfig) -> typing.Tuple[tifinaghocr.model.Model, History]:
    """Train a model with minibatch momentum SGD.

    Repeated runs with the same model initialization, corpora and configuration produce identical
    histories. Metrics on the training side are measured on the corpus as given, before any
    augmentation.

    Args:
        model: Model to train. Its parameters are updated in place.
        train_corpus: Nonempty training corpus.
        test_corpus: Nonempty test corpus.
        config: Loop hyperparameters.

    Returns:
        Tuple of the trained model and the history of evaluated epochs.

    Raises:
        ConfigError: Raised if either corpus is empty.
    """
    if train_corpus.is_empty():
        raise tifinaghocr.errors.ConfigError('Training corpus is empty.')

    if test_corpus.is_empty():
        raise tifinaghocr.errors.ConfigError('Test corpus is empty.')

    fit_corpus = expand_training_corpus(train_corpus, config)
    images, labels = fit_corpus.to_batch(model.get_dtype())

    state = tifinaghocr.numeric_model.make_optim_state(
        model.get_params(),
        config.get_lr(),
        config.get_momentum()
    )
    rng = numpy.random.default_rng(config.get_shuffle_seed())

    records = []
    for epoch in range(1, config.get_epochs() + 1):
        order = rng.permutation(fit_corpus.get_size())

        for batch_indices in toolz.partition_all(config.get_batch_size(), order):
            indices = numpy.array(batch_indices)
            logits = model.forward(images[indices])
            loss, d_logits = tifinaghocr.numeric.softmax_cross_entropy(logits, labels[indices])
            grads = [x.get_grad() for x in model.backward(d_logits)]
            new_params, state = tifinaghocr.numeric.sgd_momentum_step(
                model.get_params(),
                grads,
                state
            )
            model.set_params(new_params)
            LOGGER.debug('Epoch %d batch loss %.6f', epoch, loss)

        if should_evaluate(epoch, config):
            record = EpochRecord(
                epoch,
                evaluate(model, train_corpus),
                evaluate(model, test_corpus)
            )
            records.append(record)
            LOGGER.info(
                'Epoch %d/%d train %s test %s',
                epoch,
                config.get_epochs(),
                record.get_train(),
                record.get_test()
            )

    return (model, History(records))
