"""Exception types shared across the library."""


class KmoMatchError(Exception):
    """Base class for every error raised by this package."""


class EmptySetError(KmoMatchError):
    """An operation needs at least one point and got none."""


class InvalidInputError(KmoMatchError, ValueError):
    """A value is outside the contract of the operation (NaN, bad range, bad shape)."""


class TooManyGroundTruthsError(KmoMatchError):
    """More ground-truth points than predictions; an injective assignment cannot exist."""


class MissingFeatureError(KmoMatchError):
    """A prediction lacks a neighbor feature that the requested cost needs."""


class OracleTooLargeError(KmoMatchError):
    """The exhaustive assignment oracle refuses instances it cannot enumerate quickly."""


class MissingBoxError(KmoMatchError):
    """A ground-truth point lacks box extents required by the box-derived threshold."""


class InvalidSpecError(KmoMatchError, ValueError):
    """A generator spec is internally inconsistent or out of range."""


class SchemaError(KmoMatchError):
    """A scene or report file does not conform to the documented JSON schema."""


class IoError(KmoMatchError):
    """A file could not be read or written."""
