"""Exception types raised across the package."""


class LaneVoteError(ValueError):
    """Base class for all domain errors."""


class DegeneratePolylineError(LaneVoteError):
    pass


class DegenerateBoxError(LaneVoteError):
    pass


class NoViableCandidatesError(LaneVoteError):
    pass


class DimensionMismatchError(LaneVoteError):
    pass


class SeedOutOfBoundsError(LaneVoteError):
    pass


class PlacementError(LaneVoteError):
    pass


class ParseError(LaneVoteError):
    """Malformed annotation text. ``location`` names where it went wrong."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class GridFormatError(LaneVoteError):
    pass


class NotAGridFileError(GridFormatError):
    pass


class UnsupportedVersionError(GridFormatError):
    pass


class TruncatedPayloadError(GridFormatError):
    pass


class DimensionOverflowError(GridFormatError):
    pass


class ConfigError(LaneVoteError):
    pass
