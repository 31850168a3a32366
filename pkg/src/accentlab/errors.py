"""Exception types shared across the package.

The CLI maps these onto stable exit codes, so new error conditions should
reuse one of the classes below rather than raising bare ValueError.
"""


class AccentLabError(Exception):
    """Base class for all package errors."""


class FormatError(AccentLabError):
    """Malformed container or corrupt file contents."""


class UnsupportedFormatError(AccentLabError):
    """Well-formed file, but an encoding this package refuses to handle."""


class TooShortError(AccentLabError):
    """Signal shorter than one analysis frame."""


class ShapeError(AccentLabError):
    """Tensor or layer shape mismatch."""


class StateError(AccentLabError):
    """Operation requires a fitted/initialized state object."""


class LabelError(AccentLabError):
    """Class label outside the configured range, or a non-one-hot vector."""


class DataError(AccentLabError):
    """Manifest or dataset violates a precondition (empty, missing classes)."""


class UnknownProvinceError(DataError):
    """Province not covered by the five-class grouping."""


class CheckpointError(AccentLabError):
    """Checkpoint file corrupt or incompatible with the target graph."""


class WiringError(AccentLabError):
    """Incompatible graphs passed to a composite trainer."""


class NumericError(AccentLabError):
    """Non-finite loss or activation during training."""


class MetricError(AccentLabError):
    """Score set degenerate for the requested metric."""
