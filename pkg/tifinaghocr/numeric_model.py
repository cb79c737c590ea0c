"""
Data structures used by the numeric kernels.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import typing

import numpy

import tifinaghocr.errors

from tifinaghocr.typesdef import TENSOR
from tifinaghocr.typesdef import TENSORS


class GradPair:
    """A parameter value together with the gradient of the loss with respect to it."""

    def __init__(self, value: TENSOR, grad: TENSOR):
        """Create a new value / gradient pair.

        Args:
            value: The parameter tensor.
            grad: Gradient of the same shape as value.

        Raises:
            DimensionError: Raised if the two shapes differ.
        """
        if value.shape != grad.shape:
            raise tifinaghocr.errors.DimensionError(
                'Gradient shape %s does not match value shape %s.' % (grad.shape, value.shape)
            )

        self._value = value
        self._grad = grad

    def get_value(self) -> TENSOR:
        """Get the parameter tensor.

        Returns:
            The value for which the gradient was computed.
        """
        return self._value

    def get_grad(self) -> TENSOR:
        """Get the gradient tensor.

        Returns:
            Gradient with the same shape as get_value().
        """
        return self._grad


class OptimState:
    """State of the classical momentum optimizer.

    Holds one velocity tensor per parameter along with the learning rate and momentum used on each
    step. Instances are not modified by the optimizer which returns a new state instead.
    """

    def __init__(self, velocity: TENSORS, lr: float, momentum: float):
        """Create a new optimizer state.

        Args:
            velocity: One tensor per parameter holding the running update.
            lr: Learning rate which must be positive.
            momentum: Momentum coefficient in [0, 1).

        Raises:
            ConfigError: Raised if lr or momentum are out of range.
        """
        if not lr > 0:
            raise tifinaghocr.errors.ConfigError('Learning rate must be positive, got %s.' % lr)

        if not (0 <= momentum < 1):
            raise tifinaghocr.errors.ConfigError('Momentum must be in [0, 1), got %s.' % momentum)

        self._velocity = list(velocity)
        self._lr = float(lr)
        self._momentum = float(momentum)

    def get_velocity(self) -> TENSORS:
        """Get the per-parameter velocity tensors.

        Returns:
            List of velocity tensors in parameter order.
        """
        return self._velocity

    def get_lr(self) -> float:
        """Get the learning rate.

        Returns:
            Positive learning rate.
        """
        return self._lr

    def get_momentum(self) -> float:
        """Get the momentum coefficient.

        Returns:
            Momentum in [0, 1).
        """
        return self._momentum

    def replace_velocity(self, velocity: TENSORS) -> 'OptimState':
        """Make a copy of this state with new velocities.

        Args:
            velocity: The velocities for the new state.

        Returns:
            New state sharing this state's lr and momentum.
        """
        return OptimState(velocity, self._lr, self._momentum)


def make_optim_state(params: TENSORS, lr: float, momentum: float) -> OptimState:
    """Create an optimizer state with zero velocity for the given parameters.

    Args:
        params: The parameters to be optimized.
        lr: Learning rate.
        momentum: Momentum coefficient.

    Returns:
        Newly built state.
    """
    velocity: typing.List[numpy.ndarray] = [numpy.zeros_like(x) for x in params]
    return OptimState(velocity, lr, momentum)
