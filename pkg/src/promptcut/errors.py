"""Exception types shared across the package."""


class PromptcutError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidBoxError(PromptcutError):
    """Bounding box is empty or falls outside its image."""


class CoordinateError(PromptcutError):
    """Point coordinates fall outside the expected frame."""


class DegenerateInputError(PromptcutError):
    """Input too degenerate for the requested operation (e.g. fewer
    distinct colors than clusters)."""


class NoBackgroundError(PromptcutError):
    """Distance transform requires at least one background pixel."""


class EmptyMarkersError(PromptcutError):
    """No foreground markers could be extracted (empty foreground)."""


class ModelDegenerateError(PromptcutError):
    """Mixture covariance is not positive-definite even after
    regularization."""


class ShapeMismatchError(PromptcutError):
    """Array dimensions disagree where they must match."""


class EmptyInputError(PromptcutError):
    """An aggregate was asked for on an empty collection."""


class SceneSpecError(PromptcutError):
    """Synthetic scene description cannot be satisfied."""
