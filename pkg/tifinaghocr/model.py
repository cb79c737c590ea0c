"""
Two convolution / two max pooling network with a dense softmax head.

Layers run conv1, relu, pool, conv2, relu, pool, flatten and dense. With the default configuration
feature maps go 28 -> 24 -> 12 -> 8 -> 4 and the flattened features have 4 * 4 * 16 = 256 values
feeding 33 logits.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import math
import struct
import typing

import numpy

import tifinaghocr.errors
import tifinaghocr.numeric
import tifinaghocr.numeric_model

from tifinaghocr.glyph_model import GLYPH_SIZE
from tifinaghocr.labels import NUM_CLASSES
from tifinaghocr.numeric import POOL_SIZE
from tifinaghocr.typesdef import OPT_INT
from tifinaghocr.typesdef import PARAMS_DICT
from tifinaghocr.typesdef import TENSOR
from tifinaghocr.typesdef import TENSORS

PARAM_NAMES = [
    'conv1.weight',
    'conv1.bias',
    'conv2.weight',
    'conv2.bias',
    'dense.weight',
    'dense.bias'
]
WEIGHTS_TAG = b'TIFCNN01'
INPUT_CHANNELS = 1

SHAPE = typing.Tuple[int, ...]


class CnnConfig:
    """Hyperparameters of the network."""

    def __init__(self, conv1_out: int = 8, conv1_kernel: int = 5, conv2_out: int = 16,
        conv2_kernel: int = 5, pool: int = POOL_SIZE, n_classes: int = NUM_CLASSES,
        init_seed: int = 0):
        """Create a new network configuration.

        Args:
            conv1_out: Output channels of the first convolution.
            conv1_kernel: Square kernel side of the first convolution.
            conv2_out: Output channels of the second convolution.
            conv2_kernel: Square kernel side of the second convolution.
            pool: Pooling window side. Only 2 is supported.
            n_classes: Number of logits.
            init_seed: Default seed for parameter initialization.

        Raises:
            ConfigError: Raised if a value is out of range or a feature map size is not a positive
                integer.
        """
        positive = {
            'conv1_out': conv1_out,
            'conv1_kernel': conv1_kernel,
            'conv2_out': conv2_out,
            'conv2_kernel': conv2_kernel,
            'n_classes': n_classes
        }
        for name, value in positive.items():
            if value < 1:
                raise tifinaghocr.errors.ConfigError('%s must be positive, got %d.' % (name, value))

        if pool != POOL_SIZE:
            raise tifinaghocr.errors.ConfigError('Only %d x %d pooling is supported.' % (
                POOL_SIZE,
                POOL_SIZE
            ))

        self._conv1_out = conv1_out
        self._conv1_kernel = conv1_kernel
        self._conv2_out = conv2_out
        self._conv2_kernel = conv2_kernel
        self._pool = pool
        self._n_classes = n_classes
        self._init_seed = init_seed

        conv1_size = GLYPH_SIZE - conv1_kernel + 1
        pool1_size = self._get_pooled_size(conv1_size, 'conv1')
        conv2_size = pool1_size - conv2_kernel + 1
        pool2_size = self._get_pooled_size(conv2_size, 'conv2')
        self._feature_sizes = (conv1_size, pool1_size, conv2_size, pool2_size)

    def _get_pooled_size(self, size: int, layer: str) -> int:
        if size < 1:
            raise tifinaghocr.errors.ConfigError('%s output size %d is not positive.' % (
                layer,
                size
            ))

        if size % self._pool != 0:
            raise tifinaghocr.errors.ConfigError(
                '%s output size %d is not divisible by the pool size %d.' % (
                    layer,
                    size,
                    self._pool
                )
            )

        return size // self._pool

    def get_conv1_out(self) -> int:
        """Get the output channels of the first convolution."""
        return self._conv1_out

    def get_conv1_kernel(self) -> int:
        """Get the kernel side of the first convolution."""
        return self._conv1_kernel

    def get_conv2_out(self) -> int:
        """Get the output channels of the second convolution."""
        return self._conv2_out

    def get_conv2_kernel(self) -> int:
        """Get the kernel side of the second convolution."""
        return self._conv2_kernel

    def get_pool(self) -> int:
        """Get the pooling window side."""
        return self._pool

    def get_n_classes(self) -> int:
        """Get the number of logits."""
        return self._n_classes

    def get_init_seed(self) -> int:
        """Get the default initialization seed."""
        return self._init_seed

    def get_feature_sizes(self) -> typing.Tuple[int, int, int, int]:
        """Get the spatial side after each of conv1, pool1, conv2 and pool2.

        Returns:
            (24, 12, 8, 4) for the default configuration.
        """
        return self._feature_sizes

    def get_flat_size(self) -> int:
        """Get the number of features entering the dense layer.

        Returns:
            256 for the default configuration.
        """
        pooled = self._feature_sizes[3]
        return pooled * pooled * self._conv2_out

    def get_param_shapes(self) -> typing.Dict[str, SHAPE]:
        """Get the shape of every parameter tensor.

        Returns:
            Mapping from parameter name to shape in PARAM_NAMES order.
        """
        return {
            'conv1.weight': (
                self._conv1_out,
                INPUT_CHANNELS,
                self._conv1_kernel,
                self._conv1_kernel
            ),
            'conv1.bias': (self._conv1_out,),
            'conv2.weight': (
                self._conv2_out,
                self._conv1_out,
                self._conv2_kernel,
                self._conv2_kernel
            ),
            'conv2.bias': (self._conv2_out,),
            'dense.weight': (self._n_classes, self.get_flat_size()),
            'dense.bias': (self._n_classes,)
        }


class ForwardCache:
    """Intermediate values of a forward pass needed by backward."""

    def __init__(self, batch: TENSOR, conv1: TENSOR, pool1_indices: TENSOR, pool1: TENSOR,
        conv2: TENSOR, pool2_indices: TENSOR, pool2_shape: SHAPE, flat: TENSOR,
        logits_shape: SHAPE):
        self._batch = batch
        self._conv1 = conv1
        self._pool1_indices = pool1_indices
        self._pool1 = pool1
        self._conv2 = conv2
        self._pool2_indices = pool2_indices
        self._pool2_shape = pool2_shape
        self._flat = flat
        self._logits_shape = logits_shape

    def get_batch(self) -> TENSOR:
        return self._batch

    def get_conv1(self) -> TENSOR:
        return self._conv1

    def get_pool1_indices(self) -> TENSOR:
        return self._pool1_indices

    def get_pool1(self) -> TENSOR:
        return self._pool1

    def get_conv2(self) -> TENSOR:
        return self._conv2

    def get_pool2_indices(self) -> TENSOR:
        return self._pool2_indices

    def get_pool2_shape(self) -> SHAPE:
        return self._pool2_shape

    def get_flat(self) -> TENSOR:
        return self._flat

    def get_logits_shape(self) -> SHAPE:
        return self._logits_shape


class Model:
    """The network parameters along with the cache of the latest forward pass.

    The cache makes a model single-writer: concurrent forward calls on one instance would overwrite
    each other's cache.
    """

    def __init__(self, config: CnnConfig, params: PARAMS_DICT):
        """Create a model from existing parameters.

        Args:
            config: Network configuration.
            params: Mapping from every name in PARAM_NAMES to a tensor of the configured shape.

        Raises:
            DimensionError: Raised if a tensor is missing or has the wrong shape.
        """
        self._config = config
        self._params: PARAMS_DICT = {}
        self._cache: typing.Optional[ForwardCache] = None
        self.set_params([params.get(x) for x in PARAM_NAMES])  # type: ignore

    def get_config(self) -> CnnConfig:
        """Get the network configuration.

        Returns:
            Configuration used to build the model.
        """
        return self._config

    def get_params(self) -> TENSORS:
        """Get the parameter tensors in PARAM_NAMES order.

        Returns:
            List of tensors. These are the live arrays of the model.
        """
        return [self._params[x] for x in PARAM_NAMES]

    def get_param(self, name: str) -> TENSOR:
        """Get a parameter by name like conv1.weight."""
        if name not in self._params:
            raise tifinaghocr.errors.ConfigError('Unknown parameter %s.' % name)

        return self._params[name]

    def get_named_params(self) -> PARAMS_DICT:
        """Get a copy of the mapping from parameter name to tensor."""
        return dict(self._params)

    def get_dtype(self):
        """Get the floating point type of the parameters."""
        return self._params['conv1.weight'].dtype

    def set_params(self, params: TENSORS):
        """Replace the parameters.

        Args:
            params: Tensors in PARAM_NAMES order.

        Raises:
            DimensionError: Raised if a tensor is missing or has the wrong shape.
        """
        if len(params) != len(PARAM_NAMES):
            raise tifinaghocr.errors.DimensionError(
                'Expected %d parameter tensors, got %d.' % (len(PARAM_NAMES), len(params))
            )

        shapes = self._config.get_param_shapes()
        for name, tensor in zip(PARAM_NAMES, params):
            if tensor is None:
                raise tifinaghocr.errors.DimensionError('Missing tensor %s.' % name)

            if tuple(tensor.shape) != shapes[name]:
                raise tifinaghocr.errors.DimensionError(
                    'Tensor %s has shape %s, expected %s.' % (name, tensor.shape, shapes[name])
                )

        self._params = dict(zip(PARAM_NAMES, params))
        self._cache = None

    def has_cache(self) -> bool:
        """Determine if a forward pass has been recorded for backward."""
        return self._cache is not None

    def astype(self, dtype) -> 'Model':
        """Copy this model into another floating point precision.

        Args:
            dtype: Target type like numpy.float64.

        Returns:
            New model without a forward cache.
        """
        converted = dict(map(lambda x: (x[0], x[1].astype(dtype)), self._params.items()))
        return Model(self._config, converted)

    def forward(self, batch: TENSOR) -> TENSOR:
        """Run the network on a batch and remember intermediates for backward.

        Args:
            batch: Images of shape [N,1,28,28].

        Returns:
            Logits of shape [N,n_classes].

        Raises:
            DimensionError: Raised if the batch shape is wrong, naming the axis.
        """
        self._check_batch(batch)
        batch = batch.astype(self.get_dtype(), copy=False)

        params = self._params
        conv1 = tifinaghocr.numeric.conv2d_forward(
            batch,
            params['conv1.weight'],
            params['conv1.bias']
        )
        pool1, pool1_indices = tifinaghocr.numeric.maxpool2_forward(
            tifinaghocr.numeric.relu_forward(conv1)
        )

        conv2 = tifinaghocr.numeric.conv2d_forward(
            pool1,
            params['conv2.weight'],
            params['conv2.bias']
        )
        pool2, pool2_indices = tifinaghocr.numeric.maxpool2_forward(
            tifinaghocr.numeric.relu_forward(conv2)
        )

        flat = pool2.reshape(pool2.shape[0], -1)
        logits = tifinaghocr.numeric.dense_forward(
            flat,
            params['dense.weight'],
            params['dense.bias']
        )

        self._cache = ForwardCache(
            batch,
            conv1,
            pool1_indices,
            pool1,
            conv2,
            pool2_indices,
            pool2.shape,
            flat,
            logits.shape
        )
        return logits

    def backward(self, d_logits: TENSOR) -> typing.List[tifinaghocr.numeric_model.GradPair]:
        """Backpropagate a gradient with respect to the logits of the latest forward pass.

        The cache is kept so calling backward twice with the same input gives identical results.

        Args:
            d_logits: Gradient of the loss with respect to the logits [N,n_classes].

        Returns:
            One value / gradient pair per parameter in PARAM_NAMES order.

        Raises:
            StateError: Raised if no forward pass was recorded.
            DimensionError: Raised if d_logits does not match the recorded logits.
        """
        cache = self._cache
        if cache is None:
            raise tifinaghocr.errors.StateError('Backward requires a prior forward pass.')

        if tuple(d_logits.shape) != tuple(cache.get_logits_shape()):
            raise tifinaghocr.errors.DimensionError(
                'Logit gradient has shape %s, expected %s.' % (
                    d_logits.shape,
                    cache.get_logits_shape()
                )
            )

        params = self._params
        d_logits = d_logits.astype(self.get_dtype(), copy=False)

        d_flat, d_dense_weight, d_dense_bias = tifinaghocr.numeric.dense_backward(
            cache.get_flat(),
            params['dense.weight'],
            d_logits
        )

        d_pool2 = d_flat.reshape(cache.get_pool2_shape())
        d_relu2 = tifinaghocr.numeric.maxpool2_backward(cache.get_pool2_indices(), d_pool2)
        d_conv2 = tifinaghocr.numeric.relu_backward(cache.get_conv2(), d_relu2)
        d_pool1, d_conv2_weight, d_conv2_bias = tifinaghocr.numeric.conv2d_backward(
            cache.get_pool1(),
            params['conv2.weight'],
            d_conv2
        )

        d_relu1 = tifinaghocr.numeric.maxpool2_backward(cache.get_pool1_indices(), d_pool1)
        d_conv1 = tifinaghocr.numeric.relu_backward(cache.get_conv1(), d_relu1)
        _, d_conv1_weight, d_conv1_bias = tifinaghocr.numeric.conv2d_backward(
            cache.get_batch(),
            params['conv1.weight'],
            d_conv1
        )

        grads = [
            d_conv1_weight,
            d_conv1_bias,
            d_conv2_weight,
            d_conv2_bias,
            d_dense_weight,
            d_dense_bias
        ]
        return [
            tifinaghocr.numeric_model.GradPair(value, grad)
            for value, grad in zip(self.get_params(), grads)
        ]

    def _check_batch(self, batch: TENSOR):
        tifinaghocr.numeric.check_rank(batch, 4, 'batch', '[N,1,28,28]')
        tifinaghocr.numeric.check_axis('channel axis (C)', batch.shape[1], INPUT_CHANNELS,
            'model input')
        tifinaghocr.numeric.check_axis('height axis (H)', batch.shape[2], GLYPH_SIZE,
            'model input')
        tifinaghocr.numeric.check_axis('width axis (W)', batch.shape[3], GLYPH_SIZE,
            'model input')


def get_glorot_limit(shape: SHAPE) -> float:
    """Get the Glorot uniform bound for a weight tensor.

    Args:
        shape: Either [K,C,kh,kw] for convolutions or [O,F] for dense layers.

    Returns:
        sqrt(6 / (fan_in + fan_out)).
    """
    if len(shape) == 4:
        receptive = shape[2] * shape[3]
        fan_in = shape[1] * receptive
        fan_out = shape[0] * receptive
    else:
        fan_in = shape[1]
        fan_out = shape[0]

    return math.sqrt(6 / (fan_in + fan_out))


def init_model(config: CnnConfig, seed: OPT_INT = None, dtype=numpy.float32) -> Model:
    """Build a freshly initialized model.

    Weights are drawn Glorot uniform in PARAM_NAMES order from a single generator and biases start
    at zero.

    Args:
        config: Network configuration.
        seed: Initialization seed. If None, the seed in the config is used.
        dtype: Floating point type of the parameters.

    Returns:
        New model.
    """
    seed_realized = config.get_init_seed() if seed is None else seed
    rng = numpy.random.default_rng(seed_realized)

    params = {}
    for name, shape in config.get_param_shapes().items():
        if name.endswith('.bias'):
            params[name] = numpy.zeros(shape, dtype=dtype)
        else:
            limit = get_glorot_limit(shape)
            params[name] = rng.uniform(-limit, limit, size=shape).astype(dtype)

    return Model(config, params)


def count_parameters(model: Model) -> int:
    """Count the learnable scalars of a model.

    Returns:
        11,905 for the default configuration.
    """
    return sum(int(x.size) for x in model.get_params())


def predict_topk(logits: TENSOR, k: int) -> numpy.ndarray:
    """Find the k highest scoring classes of every row.

    Args:
        logits: Scores of shape [N,C].
        k: Number of classes to return in [1, C].

    Returns:
        Integer array [N,k] with classes in descending score order. Equal scores keep the lower
        class index first.

    Raises:
        ConfigError: Raised if k is outside [1, C].
    """
    tifinaghocr.numeric.check_rank(logits, 2, 'logits', '[N,C]')
    num_classes = logits.shape[1]
    if not (1 <= k <= num_classes):
        raise tifinaghocr.errors.ConfigError('k must be in [1, %d], got %d.' % (num_classes, k))

    order = numpy.argsort(-logits, axis=1, kind='stable')
    return order[:, :k]


def encode_weights(model: Model) -> bytes:
    """Serialize the parameters of a model.

    Args:
        model: The model to serialize.

    Returns:
        Tag followed by one record per tensor of name length, name, rank, dims and float32
        payload, all little endian.
    """
    chunks = [WEIGHTS_TAG]
    for name, tensor in zip(PARAM_NAMES, model.get_params()):
        name_bytes = name.encode('ascii')
        chunks.append(struct.pack('<I', len(name_bytes)))
        chunks.append(name_bytes)
        chunks.append(struct.pack('<I', tensor.ndim))
        chunks.append(struct.pack('<%dI' % tensor.ndim, *tensor.shape))
        chunks.append(numpy.ascontiguousarray(tensor, dtype='<f4').tobytes())

    return b''.join(chunks)


def save_weights(model: Model, path: str):
    """Write the parameters of a model as 32-bit floats.

    Args:
        model: The model to save.
        path: Location of the weights file.
    """
    with open(path, 'wb') as f:
        f.write(encode_weights(model))


def read_chunk(data: bytes, offset: int, size: int, what: str) -> typing.Tuple[bytes, int]:
    """Take size bytes starting at offset, failing on truncation."""
    end = offset + size
    if end > len(data):
        raise tifinaghocr.errors.FormatError('Truncated weights file reading %s' % what, offset)

    return (data[offset:end], end)


def decode_weights(data: bytes, config: CnnConfig) -> Model:
    """Parse weights file contents against a configuration.

    Args:
        data: Contents written by encode_weights.
        config: Configuration whose shapes the file must match.

    Returns:
        Model with float32 parameters.

    Raises:
        FormatError: Raised for a bad tag, truncation, an unexpected tensor or a shape mismatch.
            The message names the tensor.
    """
    tag, offset = read_chunk(data, 0, len(WEIGHTS_TAG), 'format tag')
    if tag != WEIGHTS_TAG:
        raise tifinaghocr.errors.FormatError('Unknown weights format tag %r' % tag, 0)

    shapes = config.get_param_shapes()
    params = {}
    for name in PARAM_NAMES:
        start = offset
        length_bytes, offset = read_chunk(data, offset, 4, 'name length of %s' % name)
        name_bytes, offset = read_chunk(
            data,
            offset,
            struct.unpack('<I', length_bytes)[0],
            'name of %s' % name
        )

        found_name = name_bytes.decode('ascii', errors='replace')
        if found_name != name:
            raise tifinaghocr.errors.FormatError(
                'Expected tensor %s but found %s' % (name, found_name),
                start
            )

        rank_bytes, offset = read_chunk(data, offset, 4, 'rank of %s' % name)
        rank = struct.unpack('<I', rank_bytes)[0]
        dims_bytes, offset = read_chunk(data, offset, 4 * rank, 'dims of %s' % name)
        dims = struct.unpack('<%dI' % rank, dims_bytes)

        if dims != shapes[name]:
            raise tifinaghocr.errors.FormatError(
                'Shape mismatch for tensor %s: file has %s, config expects %s' % (
                    name,
                    dims,
                    shapes[name]
                ),
                start
            )

        count = int(numpy.prod(dims, dtype=numpy.int64))
        payload, offset = read_chunk(data, offset, 4 * count, 'payload of %s' % name)
        values = numpy.frombuffer(payload, dtype='<f4').reshape(dims)
        params[name] = values.astype(numpy.float32)

    if offset != len(data):
        raise tifinaghocr.errors.FormatError('Trailing bytes after tensor dense.bias', offset)

    return Model(config, params)


def load_weights(path: str, config: CnnConfig) -> Model:
    """Read a weights file written by save_weights.

    Args:
        path: Location of the weights file.
        config: Configuration whose shapes the file must match.

    Returns:
        Model with float32 parameters.
    """
    with open(path, 'rb') as f:
        data = f.read()

    return decode_weights(data, config)
