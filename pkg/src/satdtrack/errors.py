"""Exception types shared across the pipeline."""


class SatdTrackError(Exception):
    """Base class for all errors raised by this package."""


class NotARepository(SatdTrackError):
    """The given path holds no git object database."""


class BareOrCorrupt(SatdTrackError):
    """The git object store exists but cannot be read."""


class UnknownBranch(SatdTrackError):
    """The requested branch name does not resolve to a commit."""


class DiffFailure(SatdTrackError):
    """git could not produce a diff for a commit pair."""


class SchemaViolation(SatdTrackError):
    """A fixture file does not conform to the expected schema."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DanglingDeletion(SatdTrackError):
    """A tag-carrying deleted line matched no alive SATD.

    On well-formed input every deleted SATD line was previously added by
    some hunk, so this signals corrupted or reordered ingestion data.
    """


class CyclicChain(SatdTrackError):
    """A follower chain revisited a SATD (impossible on valid matches)."""


class EmptyLabelSet(SatdTrackError):
    """Grid search was given no labeled cases."""


class DuplicateGoldKey(SatdTrackError):
    """Two gold records share the same identity key."""
