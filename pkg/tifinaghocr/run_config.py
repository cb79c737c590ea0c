"""
Flat key=value run configuration combining network, training and split settings.

Blank lines and lines starting with # are ignored. Absent keys take their defaults while unknown
or repeated keys are rejected.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import typing

import tifinaghocr.dataset_io
import tifinaghocr.errors
import tifinaghocr.model
import tifinaghocr.training

from tifinaghocr.typesdef import OPT_STR

CNN_KEYS = ['conv1_out', 'conv1_kernel', 'conv2_out', 'conv2_kernel', 'n_classes', 'init_seed']
TRAIN_KEYS = [
    'epochs',
    'batch_size',
    'lr',
    'momentum',
    'shuffle_seed',
    'eval_every',
    'augment_copies',
    'augment_seed',
    'perturb_fraction'
]
SPLIT_KEYS = ['train_fraction', 'split_seed']

FIELD_TYPES: typing.Dict[str, typing.Callable[[str], typing.Any]] = {
    'conv1_out': int,
    'conv1_kernel': int,
    'conv2_out': int,
    'conv2_kernel': int,
    'n_classes': int,
    'init_seed': int,
    'epochs': int,
    'batch_size': int,
    'lr': float,
    'momentum': float,
    'shuffle_seed': int,
    'eval_every': int,
    'augment_copies': int,
    'augment_seed': int,
    'perturb_fraction': float,
    'train_fraction': float,
    'split_seed': int
}

DEFAULTS: typing.Dict[str, typing.Any] = {
    'conv1_out': 8,
    'conv1_kernel': 5,
    'conv2_out': 16,
    'conv2_kernel': 5,
    'n_classes': 33,
    'init_seed': 0,
    'epochs': 100,
    'batch_size': 32,
    'lr': 0.01,
    'momentum': 0.9,
    'shuffle_seed': 0,
    'eval_every': 1,
    'augment_copies': 0,
    'augment_seed': 0,
    'perturb_fraction': 0.0,
    'train_fraction': tifinaghocr.dataset_io.DEFAULT_TRAIN_FRACTION,
    'split_seed': 0
}


class RunConfig:
    """Everything needed to reproduce a split, initialization and training run."""

    def __init__(self, values: typing.Optional[typing.Dict[str, typing.Any]] = None):
        """Create a new run configuration.

        Args:
            values: Mapping from recognized key to typed value. Absent keys take their defaults.

        Raises:
            ConfigError: Raised for an unknown key or a value out of range.
        """
        overrides = {} if values is None else values
        unknown = sorted(set(overrides.keys()) - set(DEFAULTS.keys()))
        if unknown:
            raise tifinaghocr.errors.ConfigError('Unknown configuration keys: %s' % unknown)

        self._values = dict(DEFAULTS)
        self._values.update(overrides)

        self._cnn_config = tifinaghocr.model.CnnConfig(
            **dict(map(lambda x: (x, self._values[x]), CNN_KEYS))
        )
        self._train_config = tifinaghocr.training.TrainConfig(
            **dict(map(lambda x: (x, self._values[x]), TRAIN_KEYS))
        )

        train_fraction = self._values['train_fraction']
        if not (0 < train_fraction < 1):
            raise tifinaghocr.errors.ConfigError(
                'train_fraction must be in (0, 1), got %s.' % train_fraction
            )

    def get_cnn_config(self) -> tifinaghocr.model.CnnConfig:
        """Get the network configuration.

        Returns:
            Network hyperparameters and initialization seed.
        """
        return self._cnn_config

    def get_train_config(self) -> tifinaghocr.training.TrainConfig:
        """Get the training loop configuration.

        Returns:
            Loop hyperparameters.
        """
        return self._train_config

    def get_train_fraction(self) -> float:
        """Get the share of writers assigned to training."""
        return self._values['train_fraction']

    def get_split_seed(self) -> int:
        """Get the writer shuffle seed."""
        return self._values['split_seed']

    def get_values(self) -> typing.Dict[str, typing.Any]:
        """Get every key with its effective value.

        Returns:
            Copy of the mapping in canonical key order.
        """
        return dict(map(lambda x: (x, self._values[x]), DEFAULTS.keys()))

    def to_text(self) -> str:
        """Serialize in the key=value format read by parse_run_config.

        Returns:
            One line per key in canonical order.
        """
        return ''.join(map(
            lambda x: '%s=%s\n' % (x[0], repr(x[1])),
            self.get_values().items()
        ))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RunConfig):
            return False

        return self.get_values() == other.get_values()


def parse_value(key: str, raw: str, line: int) -> typing.Any:
    """Convert the text of a value to the type of its key."""
    try:
        return FIELD_TYPES[key](raw)
    except ValueError:
        raise tifinaghocr.errors.ConfigError(
            'Invalid value %r for %s on line %d.' % (raw, key, line)
        )


def parse_run_config(text: str) -> RunConfig:
    """Parse key=value configuration text.

    Args:
        text: Configuration contents.

    Returns:
        Parsed configuration with defaults for absent keys.

    Raises:
        ConfigError: Raised for malformed lines, unknown or repeated keys and bad values. The
            message names the line.
    """
    values: typing.Dict[str, typing.Any] = {}

    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue

        if '=' not in stripped:
            raise tifinaghocr.errors.ConfigError(
                'Expected key=value on line %d, got %r.' % (line_number, stripped)
            )

        key_raw, value_raw = stripped.split('=', 1)
        key = key_raw.strip()

        if key not in FIELD_TYPES:
            raise tifinaghocr.errors.ConfigError(
                'Unknown key %s on line %d.' % (key, line_number)
            )

        if key in values:
            raise tifinaghocr.errors.ConfigError(
                'Repeated key %s on line %d.' % (key, line_number)
            )

        values[key] = parse_value(key, value_raw.strip(), line_number)

    return RunConfig(values)


def load_run_config(path: OPT_STR) -> RunConfig:
    """Read a configuration file.

    Args:
        path: Location of the file or None for all defaults.

    Returns:
        Parsed configuration.
    """
    if path is None:
        return RunConfig()

    with open(path) as f:
        return parse_run_config(f.read())


def save_run_config(config: RunConfig, path: str):
    """Write a configuration file readable by load_run_config."""
    with open(path, 'w') as f:
        f.write(config.to_text())
