"""
Root file for the tests directory for tifinaghocr.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""

# pylint: disable=C0115, C0116
