"""Normalized compression distance for multisets.

Items are byte strings (``str`` is encoded as UTF-8). Every operation runs
through an :class:`Engine`, which fixes the compressor and memoizes
compressed sizes.
"""

from ._core import (
    BackendUnavailable,
    DegenerateInput,
    Engine,
    Error,
    InvalidArgument,
    LoadError,
    image_to_bitstream,
    otsu_threshold,
    wilson_ci,
)

__all__ = [
    "BackendUnavailable",
    "DegenerateInput",
    "Engine",
    "Error",
    "InvalidArgument",
    "LoadError",
    "image_to_bitstream",
    "otsu_threshold",
    "wilson_ci",
]

__version__ = "0.1.0"
