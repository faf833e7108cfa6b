"""Exception hierarchy shared across the package."""


class SplatlabError(Exception):
    """Base class for all errors raised by this package."""


class InvalidPrimitiveError(SplatlabError):
    """A Gaussian primitive violates its invariants (non-finite, bad norm, ...)."""


class SceneCompositionError(SplatlabError):
    """Scene composition failed, e.g. duplicate component ids."""


class InvalidCameraError(SplatlabError):
    """Camera parameters are degenerate or out of range."""


class RenderError(SplatlabError):
    """Rendering could not produce a frame."""


class EmbeddingDimensionError(SplatlabError):
    """Embedding vectors of mismatched dimension were combined."""


class UndefinedSimilarityError(SplatlabError):
    """Cosine similarity requested for a zero-norm vector."""


class ProviderError(SplatlabError):
    """A remote provider (embedding/chat/stylization) failed; carries the cause."""


class ProviderTimeoutError(ProviderError):
    """A remote provider did not answer in time."""


class BundleFormatError(SplatlabError):
    """A scene bundle on disk is malformed, truncated or corrupt."""


class IngestError(SplatlabError):
    """Multi-view ingestion input was inconsistent (frame/pose mismatch, ...)."""


class UnknownSceneError(SplatlabError):
    """Requested scene id is not registered."""


class CommandError(SplatlabError):
    """Base class for command wire-format errors."""


class CommandSyntaxError(CommandError):
    """Payload is not valid JSON. ``offset`` is the byte position of the failure."""

    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.offset = offset


class UnknownCommandError(CommandError):
    """Unrecognized ``cmd`` discriminator. ``valid`` lists the accepted names."""

    def __init__(self, name: str, valid: tuple[str, ...]):
        super().__init__(f"unknown command {name!r}; valid commands: {', '.join(valid)}")
        self.name = name
        self.valid = valid


class CommandFieldError(CommandError):
    """A command field is missing, unknown, or has the wrong type."""

    def __init__(self, message: str, field: str):
        super().__init__(message)
        self.field = field


class PlanningError(SplatlabError):
    """An agent plan referenced an unregistered tool."""
