"""
Exceptions raised by tifinaghocr.

Every error carries the process exit code the command line tool uses when the error escapes a
subcommand: 2 for usage, format and configuration problems and 3 for problems with the data itself.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import typing

EXIT_USAGE = 2
EXIT_DATA = 3


class TifinaghError(RuntimeError):
    """Root of all errors raised intentionally by this package."""

    exit_code = EXIT_USAGE


class ConfigError(TifinaghError):
    """A configuration value or argument is outside its allowed range."""
    pass


class DimensionError(TifinaghError):
    """Tensor shapes are not consistent with the requested operation."""
    pass


class StateError(TifinaghError):
    """An operation was requested before the state it depends on exists."""
    pass


class InternalConsistencyError(TifinaghError):
    """Bookkeeping passed between two operations does not line up."""
    pass


class LabelError(TifinaghError):
    """A class label is outside of the range allowed by the classifier."""

    def __init__(self, message: str, row: int):
        """Create a new label error.

        Args:
            message: Description of the issue.
            row: The batch row holding the offending label.
        """
        super().__init__(message)
        self._row = row

    def get_row(self) -> int:
        """Get the row with the invalid label.

        Returns:
            Zero-based batch row index.
        """
        return self._row


class FormatError(TifinaghError):
    """A binary or text file does not follow its expected format."""

    def __init__(self, message: str, offset: typing.Optional[int] = None):
        """Create a new format error.

        Args:
            message: Description of the issue.
            offset: Byte offset at which the problem was found or None if not applicable.
        """
        if offset is not None:
            message = '%s (at byte offset %d)' % (message, offset)

        super().__init__(message)
        self._offset = offset

    def get_offset(self) -> typing.Optional[int]:
        """Get the byte offset where the issue was found.

        Returns:
            The offset or None if the error is not tied to a position.
        """
        return self._offset


class NoForegroundError(TifinaghError):
    """No pixel of an image rises above the foreground threshold."""

    exit_code = EXIT_DATA

    def __init__(self, message: str, path: typing.Optional[str] = None):
        """Create a new error for a blank image.

        Args:
            message: Description of the issue.
            path: The file from which the image was read if known.
        """
        if path is not None:
            message = '%s: %s' % (path, message)

        super().__init__(message)
        self._path = path

    def get_path(self) -> typing.Optional[str]:
        """Get the path of the blank image.

        Returns:
            File path or None if the image did not come from a file.
        """
        return self._path


class IngestionError(TifinaghError):
    """A file in an ingestion directory could not be turned into an example."""

    exit_code = EXIT_DATA

    def __init__(self, message: str, path: str):
        """Create a new ingestion error.

        Args:
            message: Description of the issue.
            path: The offending file or directory.
        """
        super().__init__('%s: %s' % (path, message))
        self._path = path

    def get_path(self) -> str:
        """Get the path which could not be ingested.

        Returns:
            File or directory path.
        """
        return self._path


class DegenerateGlyphError(TifinaghError):
    """A glyph was requested from an image without any ink left."""

    exit_code = EXIT_DATA
