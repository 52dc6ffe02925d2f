"""Exception types raised across the package."""


class IterativeRSAError(Exception):
    """Base class for all errors raised by this package."""


class SceneParseError(IterativeRSAError, ValueError):
    """A scene document is malformed.  ``path`` names the offending location."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SceneValidationError(IterativeRSAError, ValueError):
    """A scene is well-formed but violates a data-model invariant."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SemanticsError(IterativeRSAError):
    pass


class GenerationError(IterativeRSAError):
    """Speaker or listener computation could not proceed."""


class NoUtterableDescriptor(GenerationError):
    pass


class ConfigError(IterativeRSAError, ValueError):
    pass
