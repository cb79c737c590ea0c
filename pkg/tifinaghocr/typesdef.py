"""
Type definitions for the tifinaghocr project.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import typing

import numpy


OPT_INT = typing.Optional[int]
OPT_STR = typing.Optional[str]

TENSOR = numpy.ndarray
TENSORS = typing.List[numpy.ndarray]
LABELS = typing.Sequence[int]
SCALAR_FUNCTION = typing.Callable[[numpy.ndarray], float]
SCALE_RANGE = typing.Tuple[float, float]
PARAMS_DICT = typing.Dict[str, numpy.ndarray]
SEED = typing.Union[int, typing.Sequence[int]]
