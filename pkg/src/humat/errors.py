"""Exception hierarchy shared by every humat module."""

from __future__ import annotations


class HumatError(Exception):
    """Base class for all errors raised by this package."""


class ZeroImportance(HumatError):
    """All motive importances of an agent are zero, so evaluation is undefined."""


class NoSocialMotive(HumatError):
    """The scenario defines no motive in the Social group."""


class UnknownAgent(HumatError, KeyError):
    pass


class NotNeighbor(HumatError):
    pass


class NoNeighbors(HumatError):
    """The ego network is empty; callers treat this as "do nothing"."""


class InvalidSpec(HumatError, ValueError):
    """Bad network generator parameters."""


class PathError(HumatError):
    """An error tied to a location inside a nested document."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class InvalidConfig(PathError, ValueError):
    pass


class SchemaMismatch(HumatError, ValueError):
    """A snapshot or trace document cannot be parsed or has an unknown schema."""


class ValidationFailure(PathError, ValueError):
    """An imported document parsed but violates a type invariant."""


class ShapeMismatch(HumatError, ValueError):
    """Two traces or a trace and a scenario disagree on N, M, K or T."""


class IoFailure(HumatError, OSError):
    pass
