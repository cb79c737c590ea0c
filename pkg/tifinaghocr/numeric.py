"""
Forward and backward kernels for the layers of the character classifier.

All tensors are numpy arrays in row-major order. Kernels never modify their inputs, keep the
floating point precision of their inputs, and use a fixed reduction order so that repeated calls
give bit-identical results. Convolution follows the cross-correlation convention (no kernel flip).

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import typing

import numpy
import numpy.lib.stride_tricks

import tifinaghocr.errors
import tifinaghocr.numeric_model

from tifinaghocr.typesdef import LABELS
from tifinaghocr.typesdef import SCALAR_FUNCTION
from tifinaghocr.typesdef import TENSOR
from tifinaghocr.typesdef import TENSORS

POOL_SIZE = 2
POOL_WINDOW = POOL_SIZE * POOL_SIZE

CONV_GRADS = typing.Tuple[TENSOR, TENSOR, TENSOR]
DENSE_GRADS = typing.Tuple[TENSOR, TENSOR, TENSOR]
POOL_RESULT = typing.Tuple[TENSOR, TENSOR]
LOSS_RESULT = typing.Tuple[float, TENSOR]
STEP_RESULT = typing.Tuple[TENSORS, tifinaghocr.numeric_model.OptimState]


def check_rank(target: TENSOR, rank: int, name: str, layout: str):
    """Check that a tensor has the expected number of dimensions.

    Args:
        target: The tensor to check.
        rank: Expected number of dimensions.
        name: Human readable name of the tensor for error messages.
        layout: Description of the expected axes like "[N,C,H,W]".

    Raises:
        DimensionError: Raised if the rank differs.
    """
    if target.ndim != rank:
        raise tifinaghocr.errors.DimensionError(
            'Expected %s of rank %d %s, got shape %s.' % (name, rank, layout, target.shape)
        )


def check_axis(axis_name: str, found: int, expected: int, context: str):
    """Check that an axis has the size required by another operand.

    Args:
        axis_name: Name of the axis like "channel axis (C)".
        found: Observed size.
        expected: Required size.
        context: Description of where the mismatch was found.

    Raises:
        DimensionError: Raised if found and expected differ.
    """
    if found != expected:
        raise tifinaghocr.errors.DimensionError(
            'Mismatch on %s in %s: got %d, expected %d.' % (axis_name, context, found, expected)
        )


def get_conv_output_size(size: int, kernel: int, stride: int, pad: int, axis_name: str) -> int:
    """Determine the output length of a convolution along one spatial axis.

    Args:
        size: Input length along the axis.
        kernel: Kernel length along the axis.
        stride: Step between kernel placements.
        pad: Zero padding added to both ends of the axis.
        axis_name: Name of the axis for error messages.

    Returns:
        Output length (size + 2 * pad - kernel) / stride + 1.

    Raises:
        DimensionError: Raised if the kernel does not fit or the stride does not divide the span.
    """
    span = size + 2 * pad - kernel
    if span < 0:
        raise tifinaghocr.errors.DimensionError(
            'Kernel of %d does not fit %s of %d with padding %d.' % (kernel, axis_name, size, pad)
        )

    if span % stride != 0:
        raise tifinaghocr.errors.DimensionError(
            'Stride %d does not evenly cover %s (span %d).' % (stride, axis_name, span)
        )

    return span // stride + 1


def check_conv_args(input_tensor: TENSOR, weights: TENSOR, bias: TENSOR, stride: int,
    pad: int) -> typing.Tuple[int, int]:
    """Validate convolution operands.

    Args:
        input_tensor: Input of shape [N,C,H,W].
        weights: Kernels of shape [K,C,kh,kw].
        bias: Bias of shape [K].
        stride: Positive stride.
        pad: Non-negative padding.

    Returns:
        Tuple of output height and width.
    """
    if stride < 1:
        raise tifinaghocr.errors.ConfigError('Stride must be positive, got %d.' % stride)

    if pad < 0:
        raise tifinaghocr.errors.ConfigError('Padding must be non-negative, got %d.' % pad)

    check_rank(input_tensor, 4, 'input', '[N,C,H,W]')
    check_rank(weights, 4, 'weights', '[K,C,kh,kw]')
    check_rank(bias, 1, 'bias', '[K]')

    check_axis('channel axis (C)', weights.shape[1], input_tensor.shape[1], 'conv weights')
    check_axis('output channel axis (K)', bias.shape[0], weights.shape[0], 'conv bias')

    out_height = get_conv_output_size(
        input_tensor.shape[2],
        weights.shape[2],
        stride,
        pad,
        'height axis (H)'
    )
    out_width = get_conv_output_size(
        input_tensor.shape[3],
        weights.shape[3],
        stride,
        pad,
        'width axis (W)'
    )
    return (out_height, out_width)


def pad_spatial(target: TENSOR, pad: int) -> TENSOR:
    """Zero pad the two trailing axes of a [N,C,H,W] tensor."""
    if pad == 0:
        return target

    return numpy.pad(target, ((0, 0), (0, 0), (pad, pad), (pad, pad)))


def get_windows(padded: TENSOR, kernel_height: int, kernel_width: int, stride: int) -> TENSOR:
    """Get a read-only view of every kernel placement.

    Args:
        padded: Padded input of shape [N,C,H,W].
        kernel_height: Kernel rows.
        kernel_width: Kernel columns.
        stride: Step between placements.

    Returns:
        View of shape [N,C,H',W',kh,kw].
    """
    windows = numpy.lib.stride_tricks.sliding_window_view(
        padded,
        (kernel_height, kernel_width),
        axis=(2, 3)
    )
    return windows[:, :, ::stride, ::stride]


def conv2d_forward(input_tensor: TENSOR, weights: TENSOR, bias: TENSOR, stride: int = 1,
    pad: int = 0) -> TENSOR:
    """Compute a 2D cross-correlation with bias.

    Args:
        input_tensor: Input of shape [N,C,H,W].
        weights: Kernels of shape [K,C,kh,kw].
        bias: Per output channel bias of shape [K].
        stride: Positive stride shared by both spatial axes.
        pad: Zero padding added on every side.

    Returns:
        Output of shape [N,K,H',W'] with H' = (H + 2 * pad - kh) / stride + 1.

    Raises:
        DimensionError: Raised if operand shapes are inconsistent, naming the offending axis.
    """
    check_conv_args(input_tensor, weights, bias, stride, pad)

    padded = pad_spatial(input_tensor, pad)
    windows = get_windows(padded, weights.shape[2], weights.shape[3], stride)
    output = numpy.tensordot(windows, weights, axes=([1, 4, 5], [1, 2, 3]))
    output = output.transpose(0, 3, 1, 2) + bias[None, :, None, None]
    return numpy.ascontiguousarray(output)


def conv2d_backward(input_tensor: TENSOR, weights: TENSOR, d_output: TENSOR, stride: int = 1,
    pad: int = 0) -> CONV_GRADS:
    """Compute the gradients of conv2d_forward.

    Args:
        input_tensor: The input given to the forward call.
        weights: The kernels given to the forward call.
        d_output: Gradient of the loss with respect to the forward output [N,K,H',W'].
        stride: Stride used in the forward call.
        pad: Padding used in the forward call.

    Returns:
        Tuple of gradients with respect to the input, the weights and the bias.
    """
    bias_stub = numpy.zeros(weights.shape[0], dtype=weights.dtype)
    out_height, out_width = check_conv_args(input_tensor, weights, bias_stub, stride, pad)

    check_rank(d_output, 4, 'output gradient', '[N,K,H\',W\']')
    check_axis('batch axis (N)', d_output.shape[0], input_tensor.shape[0], 'output gradient')
    check_axis('output channel axis (K)', d_output.shape[1], weights.shape[0], 'output gradient')
    check_axis('height axis (H\')', d_output.shape[2], out_height, 'output gradient')
    check_axis('width axis (W\')', d_output.shape[3], out_width, 'output gradient')

    kernel_height = weights.shape[2]
    kernel_width = weights.shape[3]

    d_bias = d_output.sum(axis=(0, 2, 3))

    padded = pad_spatial(input_tensor, pad)
    windows = get_windows(padded, kernel_height, kernel_width, stride)
    d_weights = numpy.tensordot(d_output, windows, axes=([0, 2, 3], [0, 2, 3]))

    # [N,H',W',C,kh,kw]
    d_columns = numpy.tensordot(d_output, weights, axes=([1], [0]))
    d_padded = numpy.zeros(padded.shape, dtype=d_columns.dtype)
    row_end = stride * (out_height - 1) + 1
    col_end = stride * (out_width - 1) + 1
    for i in range(kernel_height):
        for j in range(kernel_width):
            d_padded[:, :, i:i + row_end:stride, j:j + col_end:stride] += \
                d_columns[:, :, :, :, i, j].transpose(0, 3, 1, 2)

    if pad > 0:
        d_input = d_padded[:, :, pad:-pad, pad:-pad]
    else:
        d_input = d_padded

    return (numpy.ascontiguousarray(d_input), d_weights, d_bias)


def to_pool_windows(input_tensor: TENSOR) -> TENSOR:
    """Rearrange a [N,C,H,W] tensor into [N,C,H/2,W/2,4] windows in row-major window order."""
    n, c, height, width = input_tensor.shape
    shaped = input_tensor.reshape(n, c, height // POOL_SIZE, POOL_SIZE, width // POOL_SIZE,
        POOL_SIZE)
    return shaped.transpose(0, 1, 2, 4, 3, 5).reshape(n, c, height // POOL_SIZE,
        width // POOL_SIZE, POOL_WINDOW)


def from_pool_windows(windows: TENSOR) -> TENSOR:
    """Invert to_pool_windows."""
    n, c, out_height, out_width, _ = windows.shape
    shaped = windows.reshape(n, c, out_height, out_width, POOL_SIZE, POOL_SIZE)
    return shaped.transpose(0, 1, 2, 4, 3, 5).reshape(n, c, out_height * POOL_SIZE,
        out_width * POOL_SIZE)


def maxpool2_forward(input_tensor: TENSOR) -> POOL_RESULT:
    """Apply 2x2 max pooling with stride 2.

    Args:
        input_tensor: Input of shape [N,C,H,W] with even H and W.

    Returns:
        Tuple of the pooled tensor [N,C,H/2,W/2] and the argmax of each window as a linear index
        in [0, 4) (row-major within the window). Ties go to the lowest index.

    Raises:
        DimensionError: Raised if H or W is odd.
    """
    check_rank(input_tensor, 4, 'input', '[N,C,H,W]')

    if input_tensor.shape[2] % POOL_SIZE != 0:
        raise tifinaghocr.errors.DimensionError(
            'Height axis (H) must be even for pooling, got %d.' % input_tensor.shape[2]
        )

    if input_tensor.shape[3] % POOL_SIZE != 0:
        raise tifinaghocr.errors.DimensionError(
            'Width axis (W) must be even for pooling, got %d.' % input_tensor.shape[3]
        )

    windows = to_pool_windows(input_tensor)
    indices = numpy.argmax(windows, axis=-1)
    pooled = numpy.take_along_axis(windows, indices[..., None], axis=-1)[..., 0]
    return (pooled, indices)


def maxpool2_backward(argmax_indices: TENSOR, d_output: TENSOR) -> TENSOR:
    """Route pooled gradients back to the window maxima.

    Args:
        argmax_indices: Indices returned by the matching maxpool2_forward call.
        d_output: Gradient with respect to the pooled output.

    Returns:
        Gradient with respect to the pooling input, zero except at each window's argmax.

    Raises:
        DimensionError: Raised if the indices and gradient shapes differ.
        InternalConsistencyError: Raised if an index is outside of the 2x2 window.
    """
    check_rank(d_output, 4, 'output gradient', '[N,C,H/2,W/2]')
    if argmax_indices.shape != d_output.shape:
        raise tifinaghocr.errors.DimensionError(
            'Pooling indices of shape %s do not match output gradient of shape %s.' % (
                argmax_indices.shape,
                d_output.shape
            )
        )

    if argmax_indices.size > 0:
        low = int(argmax_indices.min())
        high = int(argmax_indices.max())
        if low < 0 or high >= POOL_WINDOW:
            raise tifinaghocr.errors.InternalConsistencyError(
                'Pooling index out of range [0, %d): found %d to %d.' % (POOL_WINDOW, low, high)
            )

    d_windows = numpy.zeros(d_output.shape + (POOL_WINDOW,), dtype=d_output.dtype)
    numpy.put_along_axis(d_windows, argmax_indices[..., None], d_output[..., None], axis=-1)
    return from_pool_windows(d_windows)


def relu_forward(x: TENSOR) -> TENSOR:
    """Elementwise max(x, 0)."""
    return numpy.maximum(x, numpy.zeros_like(x))


def relu_backward(x: TENSOR, d_y: TENSOR) -> TENSOR:
    """Gradient of relu_forward using a subgradient of 0 at exactly 0.

    Args:
        x: The input given to relu_forward.
        d_y: Gradient with respect to the relu output.

    Returns:
        d_y where x is positive and 0 elsewhere.
    """
    if x.shape != d_y.shape:
        raise tifinaghocr.errors.DimensionError(
            'ReLU gradient shape %s does not match input shape %s.' % (d_y.shape, x.shape)
        )

    return numpy.where(x > 0, d_y, numpy.zeros_like(d_y))


def check_dense_args(input_tensor: TENSOR, weights: TENSOR):
    """Validate the input and weights of a dense layer."""
    check_rank(input_tensor, 2, 'input', '[N,F]')
    check_rank(weights, 2, 'weights', '[O,F]')
    check_axis('feature axis (F)', input_tensor.shape[1], weights.shape[1], 'dense input')


def dense_forward(input_tensor: TENSOR, weights: TENSOR, bias: TENSOR) -> TENSOR:
    """Compute input times transposed weights plus bias.

    Args:
        input_tensor: Input of shape [N,F].
        weights: Weights of shape [O,F].
        bias: Bias of shape [O].

    Returns:
        Output of shape [N,O].
    """
    check_dense_args(input_tensor, weights)
    check_rank(bias, 1, 'bias', '[O]')
    check_axis('output axis (O)', bias.shape[0], weights.shape[0], 'dense bias')
    return input_tensor @ weights.T + bias


def dense_backward(input_tensor: TENSOR, weights: TENSOR, d_output: TENSOR) -> DENSE_GRADS:
    """Compute the gradients of dense_forward.

    Args:
        input_tensor: The input given to the forward call [N,F].
        weights: The weights given to the forward call [O,F].
        d_output: Gradient with respect to the output [N,O].

    Returns:
        Tuple of gradients with respect to the input, the weights and the bias.
    """
    check_dense_args(input_tensor, weights)
    check_rank(d_output, 2, 'output gradient', '[N,O]')
    check_axis('batch axis (N)', d_output.shape[0], input_tensor.shape[0], 'dense gradient')
    check_axis('output axis (O)', d_output.shape[1], weights.shape[0], 'dense gradient')

    d_input = d_output @ weights
    d_weights = d_output.T @ input_tensor
    d_bias = d_output.sum(axis=0)
    return (d_input, d_weights, d_bias)


def log_softmax(logits: TENSOR) -> TENSOR:
    """Row-wise log of the softmax, stabilized by subtracting each row's maximum.

    Args:
        logits: Scores of shape [N,C].

    Returns:
        Log probabilities of shape [N,C].
    """
    check_rank(logits, 2, 'logits', '[N,C]')
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - numpy.log(numpy.exp(shifted).sum(axis=1, keepdims=True))


def softmax(logits: TENSOR) -> TENSOR:
    """Row-wise softmax probabilities of shape [N,C]."""
    return numpy.exp(log_softmax(logits))


def check_labels(labels: LABELS, batch_size: int, num_classes: int) -> numpy.ndarray:
    """Validate a vector of class labels.

    Args:
        labels: One integer label per batch row.
        batch_size: Expected number of labels.
        num_classes: Number of classes C such that labels must be in [0, C).

    Returns:
        The labels as an integer numpy array.

    Raises:
        LabelError: Raised for the first row with an out of range label.
    """
    labels_array = numpy.asarray(labels, dtype=numpy.int64)
    check_rank(labels_array, 1, 'labels', '[N]')
    check_axis('batch axis (N)', labels_array.shape[0], batch_size, 'labels')

    invalid = numpy.nonzero((labels_array < 0) | (labels_array >= num_classes))[0]
    if invalid.size > 0:
        row = int(invalid[0])
        raise tifinaghocr.errors.LabelError(
            'Label %d in row %d is outside [0, %d).' % (labels_array[row], row, num_classes),
            row
        )

    return labels_array


def softmax_cross_entropy(logits: TENSOR, labels: LABELS) -> LOSS_RESULT:
    """Mean softmax cross-entropy loss and its gradient.

    Args:
        logits: Scores of shape [N,C].
        labels: True class per row in [0, C).

    Returns:
        Tuple of the mean loss over the batch and the gradient with respect to the logits, equal
        to (softmax - onehot) / N.
    """
    check_rank(logits, 2, 'logits', '[N,C]')
    batch_size, num_classes = logits.shape
    labels_array = check_labels(labels, batch_size, num_classes)

    log_probs = log_softmax(logits)
    rows = numpy.arange(batch_size)
    loss = float(-log_probs[rows, labels_array].mean())

    d_logits = numpy.exp(log_probs)
    d_logits[rows, labels_array] -= 1
    d_logits /= batch_size
    return (loss, d_logits)


def sgd_momentum_step(params: TENSORS, grads: TENSORS,
    state: tifinaghocr.numeric_model.OptimState) -> STEP_RESULT:
    """Take one classical momentum step.

    Uses v <- momentum * v - lr * g followed by p <- p + v. Inputs are not modified.

    Args:
        params: Current parameter tensors.
        grads: Gradients in the same order and shapes as params.
        state: Optimizer state holding one velocity per parameter.

    Returns:
        Tuple of the updated parameters and the updated state.
    """
    lr = state.get_lr()
    momentum = state.get_momentum()
    velocity = state.get_velocity()

    if not lr > 0:
        raise tifinaghocr.errors.ConfigError('Learning rate must be positive, got %s.' % lr)

    if len(params) != len(grads) or len(params) != len(velocity):
        raise tifinaghocr.errors.DimensionError(
            'Got %d parameters, %d gradients and %d velocities.' % (
                len(params),
                len(grads),
                len(velocity)
            )
        )

    new_params = []
    new_velocity = []
    for index, (param, grad, prior) in enumerate(zip(params, grads, velocity)):
        if param.shape != grad.shape or param.shape != prior.shape:
            raise tifinaghocr.errors.DimensionError(
                'Parameter %d has shape %s but gradient %s and velocity %s.' % (
                    index,
                    param.shape,
                    grad.shape,
                    prior.shape
                )
            )

        updated_velocity = momentum * prior - lr * grad
        new_velocity.append(updated_velocity.astype(param.dtype, copy=False))
        new_params.append((param + updated_velocity).astype(param.dtype, copy=False))

    return (new_params, state.replace_velocity(new_velocity))


def finite_difference_grad(scalar_function: SCALAR_FUNCTION, x: TENSOR,
    eps: float = 1e-5) -> TENSOR:
    """Estimate a gradient with central differences.

    Args:
        scalar_function: Function from a tensor shaped like x to a scalar.
        x: Point at which to estimate the gradient. Not modified.
        eps: Positive step.

    Returns:
        Tensor shaped like x with (f(x + eps e_i) - f(x - eps e_i)) / (2 eps) per element.
    """
    if not eps > 0:
        raise tifinaghocr.errors.ConfigError('Step must be positive, got %s.' % eps)

    point = numpy.array(x, copy=True)
    grad = numpy.zeros(point.shape, dtype=numpy.float64)
    flat_point = point.reshape(-1)
    flat_grad = grad.reshape(-1)

    for i in range(flat_point.size):
        original = flat_point[i]

        flat_point[i] = original + eps
        value_plus = float(scalar_function(point))

        flat_point[i] = original - eps
        value_minus = float(scalar_function(point))

        flat_point[i] = original
        flat_grad[i] = (value_plus - value_minus) / (2 * eps)

    return grad.astype(point.dtype, copy=False)


def gradient_error(analytic: TENSOR, numeric: TENSOR, floor: float = 1e-8) -> float:
    """Largest discrepancy between an analytic and a numeric gradient.

    Elements are compared by relative error |a - n| / max(|a|, |n|) except those whose analytic
    magnitude is below floor which are compared by absolute error.

    Args:
        analytic: Gradient from a backward kernel.
        numeric: Gradient from finite_difference_grad.
        floor: Magnitude below which absolute error is used.

    Returns:
        Maximum error over all elements or 0 for empty tensors.
    """
    if analytic.shape != numeric.shape:
        raise tifinaghocr.errors.DimensionError(
            'Cannot compare gradients of shapes %s and %s.' % (analytic.shape, numeric.shape)
        )

    if analytic.size == 0:
        return 0.0

    analytic_64 = analytic.astype(numpy.float64)
    numeric_64 = numeric.astype(numpy.float64)
    difference = numpy.abs(analytic_64 - numeric_64)
    scale = numpy.maximum(numpy.abs(analytic_64), numpy.abs(numeric_64))
    relative = numpy.divide(
        difference,
        scale,
        out=numpy.zeros_like(difference),
        where=scale > 0
    )
    errors = numpy.where(numpy.abs(analytic_64) < floor, difference, relative)
    return float(errors.max())
